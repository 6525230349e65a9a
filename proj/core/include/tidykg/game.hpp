#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tidykg/vocabulary.hpp"

namespace tidykg {

enum class Level { easy, medium, hard };
enum class Split { train, in_test, out_test };

std::string to_string(Level l);
std::string to_string(Split s);
Level level_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct PlacedRoom {
    std::string name;
    std::map<std::string, std::string> exits;  // direction -> room
};

struct PlacedLocation {
    std::string name;
    LocationKind kind = LocationKind::supporter;
    std::string room;
    bool starts_open = true;  // meaningful for containers only
};

// Where an object is, either initially (spec) or at runtime (state).
struct ObjectPosition {
    enum class Place { at_location, floor, inventory };
    Place place = Place::floor;
    std::string where;  // location name, or room name for floor; empty for inventory

    bool operator==(const ObjectPosition&) const = default;
};

struct PlacedObject {
    std::string name;
    GoalRelation goal_relation = GoalRelation::on;
    std::string goal_location;
    ObjectPosition initial;
};

// A fully generated cleanup game. Serialization is stable so identical
// (level, vocab, seed, split) inputs produce byte-identical JSON.
struct GameSpec {
    Level level = Level::easy;
    Split split = Split::train;
    std::uint64_t seed = 0;
    int max_steps = 50;
    int inventory_capacity = 1;
    std::string start_room;
    std::vector<PlacedRoom> rooms;
    std::vector<PlacedLocation> locations;
    std::vector<PlacedObject> objects;

    const PlacedLocation* find_location(const std::string& name) const;
    const PlacedObject* find_object(const std::string& name) const;
    const PlacedRoom* find_room(const std::string& name) const;
    std::vector<std::string> misplaced_objects() const;

    std::string to_json() const;
    static GameSpec from_json(const std::string& text);
};

void save_game(const GameSpec& spec, const std::string& path);
GameSpec load_game(const std::string& path);

struct Observation {
    std::string text;      // current room only
    std::string feedback;  // result of the last command

    std::string full_text() const {
        return feedback.empty() ? text : feedback + " " + text;
    }
};

struct Action {
    std::string text;
    bool operator==(const Action&) const = default;
    bool operator<(const Action& o) const { return text < o.text; }
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
};

// Mutable runtime state of one episode. Deterministic: identical action
// sequences yield identical states and observations.
class GameState {
public:
    explicit GameState(GameSpec spec);

    const GameSpec& spec() const { return spec_; }
    int t() const { return t_; }
    bool done() const { return done_; }
    const std::string& agent_room() const { return agent_room_; }
    const std::set<std::string>& placed_correctly() const { return placed_correctly_; }
    const std::vector<std::string>& inventory() const { return inventory_; }
    const ObjectPosition& position(const std::string& object) const;
    bool is_open(const std::string& container) const;

    Observation observe() const;  // render current room, empty feedback

    // Grammar: look, go <dir>, open <container>, take <object>,
    // put <object> on <supporter>, insert <object> into <container>.
    // Sorted lexicographically, never empty while the game is running.
    std::vector<Action> admissible_actions() const;

    StepResult step(const Action& action);

    // |placed & initially misplaced| / |initially misplaced|; 1.0 when
    // nothing started misplaced.
    double normalized_score() const;

    // Objects visible from the agent's room: on supporters, in open
    // containers, on the floor, or held.
    std::vector<std::string> visible_objects() const;

private:
    std::string render_room() const;
    bool object_visible(const std::string& name) const;
    void place_object(const std::string& name, const ObjectPosition& pos);
    StepResult fail_step(const std::string& message);

    GameSpec spec_;
    std::string agent_room_;
    std::map<std::string, ObjectPosition> positions_;
    std::map<std::string, bool> open_;
    std::vector<std::string> inventory_;
    std::set<std::string> placed_correctly_;
    std::set<std::string> initially_misplaced_;
    int t_ = 0;
    bool done_ = false;
};

// Engine entry point used by the rollout loop.
std::pair<GameState, Observation> reset(const GameSpec& spec);

}  // namespace tidykg
