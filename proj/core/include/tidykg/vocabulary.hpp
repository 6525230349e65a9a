#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tidykg {

enum class LocationKind { supporter, container };
enum class GoalRelation { on, in };

std::string to_string(LocationKind k);
std::string to_string(GoalRelation r);
LocationKind location_kind_from_string(const std::string& s);
GoalRelation goal_relation_from_string(const std::string& s);

struct VocabObject {
    std::string name;
    std::string goal_location;
    GoalRelation goal_relation = GoalRelation::on;
};

struct VocabLocation {
    std::string name;
    LocationKind kind = LocationKind::supporter;
    std::string room;
};

// Entity pool games are generated from. Invariants checked by validate():
// unique names, every goal location exists, supporter goals use "on" and
// container goals use "in", adjacency names valid.
struct EntityVocabulary {
    std::vector<VocabObject> objects;
    std::vector<VocabLocation> locations;
    std::vector<std::string> rooms;
    std::vector<std::pair<std::string, std::string>> adjacency;

    void validate() const;

    const VocabObject* find_object(const std::string& name) const;
    const VocabLocation* find_location(const std::string& name) const;
    std::vector<const VocabLocation*> locations_in_room(const std::string& room) const;
    std::vector<std::string> adjacent_rooms(const std::string& room) const;

    // Objects whose goal location lies in one of the given rooms.
    std::vector<const VocabObject*> objects_with_goal_in(
        const std::vector<std::string>& rooms) const;
};

EntityVocabulary load_vocabulary(const std::string& path);

struct SplitVocabularies {
    EntityVocabulary train;
    EntityVocabulary in_test;  // same object names as train
    EntityVocabulary out_test; // object names disjoint from train
};

// Partition objects into train (fraction) and out (rest); locations and rooms
// are shared. Objects are shuffled within each room and interleaved across
// rooms so the out split covers every room.
SplitVocabularies make_splits(const EntityVocabulary& vocab, double fraction, std::uint64_t seed);

}  // namespace tidykg
