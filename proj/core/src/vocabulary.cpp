#include "tidykg/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/rng.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using json = nlohmann::json;

std::string to_string(LocationKind k) {
    return k == LocationKind::supporter ? "supporter" : "container";
}
std::string to_string(GoalRelation r) { return r == GoalRelation::on ? "on" : "in"; }

LocationKind location_kind_from_string(const std::string& s) {
    if (s == "supporter") return LocationKind::supporter;
    if (s == "container") return LocationKind::container;
    throw DataError("unknown location kind: " + s);
}

GoalRelation goal_relation_from_string(const std::string& s) {
    if (s == "on") return GoalRelation::on;
    if (s == "in") return GoalRelation::in;
    throw DataError("unknown goal relation: " + s);
}

void EntityVocabulary::validate() const {
    std::set<std::string> names;
    std::set<std::string> room_set(rooms.begin(), rooms.end());
    if (room_set.size() != rooms.size()) throw DataError("vocabulary: duplicate room name");

    auto check_grammar_safe = [](const std::string& name) {
        // Names appear inside command strings; these infixes would make the
        // command grammar ambiguous.
        for (const char* bad : {" on ", " into "}) {
            if (name.find(bad) != std::string::npos)
                throw DataError("vocabulary: name \"" + name + "\" contains reserved phrase \"" +
                                bad + "\"");
        }
        if (name.empty()) throw DataError("vocabulary: empty entity name");
    };

    for (const auto& loc : locations) {
        check_grammar_safe(loc.name);
        if (!names.insert(loc.name).second)
            throw DataError("vocabulary: duplicate name \"" + loc.name + "\"");
        if (room_set.count(loc.room) == 0)
            throw DataError("vocabulary: location \"" + loc.name + "\" references unknown room \"" +
                            loc.room + "\"");
    }
    for (const auto& obj : objects) {
        check_grammar_safe(obj.name);
        if (!names.insert(obj.name).second)
            throw DataError("vocabulary: duplicate name \"" + obj.name + "\"");
        const VocabLocation* goal = find_location(obj.goal_location);
        if (goal == nullptr)
            throw DataError("vocabulary: object \"" + obj.name + "\" has unknown goal location \"" +
                            obj.goal_location + "\"");
        bool ok = (goal->kind == LocationKind::container && obj.goal_relation == GoalRelation::in) ||
                  (goal->kind == LocationKind::supporter && obj.goal_relation == GoalRelation::on);
        if (!ok)
            throw DataError("vocabulary: object \"" + obj.name + "\" pairs relation \"" +
                            to_string(obj.goal_relation) + "\" with a " + to_string(goal->kind));
    }
    for (const auto& [a, b] : adjacency) {
        if (room_set.count(a) == 0 || room_set.count(b) == 0)
            throw DataError("vocabulary: adjacency references unknown room");
        if (a == b) throw DataError("vocabulary: room adjacent to itself");
    }
}

const VocabObject* EntityVocabulary::find_object(const std::string& name) const {
    for (const auto& o : objects)
        if (o.name == name) return &o;
    return nullptr;
}

const VocabLocation* EntityVocabulary::find_location(const std::string& name) const {
    for (const auto& l : locations)
        if (l.name == name) return &l;
    return nullptr;
}

std::vector<const VocabLocation*> EntityVocabulary::locations_in_room(
    const std::string& room) const {
    std::vector<const VocabLocation*> out;
    for (const auto& l : locations)
        if (l.room == room) out.push_back(&l);
    return out;
}

std::vector<std::string> EntityVocabulary::adjacent_rooms(const std::string& room) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : adjacency) {
        if (a == room) out.push_back(b);
        if (b == room) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<const VocabObject*> EntityVocabulary::objects_with_goal_in(
    const std::vector<std::string>& in_rooms) const {
    std::set<std::string> wanted(in_rooms.begin(), in_rooms.end());
    std::vector<const VocabObject*> out;
    for (const auto& o : objects) {
        const VocabLocation* goal = find_location(o.goal_location);
        if (goal != nullptr && wanted.count(goal->room) != 0) out.push_back(&o);
    }
    return out;
}

EntityVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw DataError("vocabulary file is not valid JSON: " + path);

    EntityVocabulary vocab;
    try {
        for (const auto& r : doc.at("rooms")) {
            vocab.rooms.push_back(normalize_name(r.at("name").get<std::string>()));
            for (const auto& adj : r.value("adjacent", json::array())) {
                std::string a = vocab.rooms.back();
                std::string b = normalize_name(adj.get<std::string>());
                if (a > b) std::swap(a, b);
                vocab.adjacency.emplace_back(a, b);
            }
        }
        std::sort(vocab.adjacency.begin(), vocab.adjacency.end());
        vocab.adjacency.erase(std::unique(vocab.adjacency.begin(), vocab.adjacency.end()),
                              vocab.adjacency.end());
        for (const auto& l : doc.at("locations")) {
            vocab.locations.push_back(
                {normalize_name(l.at("name").get<std::string>()),
                 location_kind_from_string(l.at("kind").get<std::string>()),
                 normalize_name(l.at("room").get<std::string>())});
        }
        for (const auto& o : doc.at("objects")) {
            vocab.objects.push_back(
                {normalize_name(o.at("name").get<std::string>()),
                 normalize_name(o.at("goal_location").get<std::string>()),
                 goal_relation_from_string(o.at("goal_relation").get<std::string>())});
        }
    } catch (const json::exception& e) {
        throw DataError("vocabulary file " + path + ": " + e.what());
    }
    vocab.validate();
    return vocab;
}

SplitVocabularies make_splits(const EntityVocabulary& vocab, double fraction,
                              std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw UsageError("split fraction must be in (0,1)");
    const std::size_t n = vocab.objects.size();
    const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * fraction);
    if (n_train == 0 || n_train == n)
        throw DataError("too few objects (" + std::to_string(n) + ") to split at fraction " +
                        format_double(fraction, 2));

    // Group objects by goal room, shuffle within each group, then interleave
    // groups so both ends of the ordering hit every room.
    std::map<std::string, std::vector<const VocabObject*>> by_room;
    for (const auto& o : vocab.objects) {
        const VocabLocation* goal = vocab.find_location(o.goal_location);
        by_room[goal->room].push_back(&o);
    }
    Rng rng(Rng::derive(seed, 0x5117ULL));
    for (auto& [room, objs] : by_room) rng.shuffle(objs);

    std::vector<const VocabObject*> ordered;
    ordered.reserve(n);
    for (std::size_t i = 0; ordered.size() < n; ++i) {
        for (auto& [room, objs] : by_room) {
            if (i < objs.size()) ordered.push_back(objs[i]);
        }
    }

    SplitVocabularies out;
    out.train = vocab;
    out.train.objects.clear();
    out.out_test = vocab;
    out.out_test.objects.clear();
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? out.train : out.out_test).objects.push_back(*ordered[i]);
    }
    auto by_name = [](const VocabObject& a, const VocabObject& b) { return a.name < b.name; };
    std::sort(out.train.objects.begin(), out.train.objects.end(), by_name);
    std::sort(out.out_test.objects.begin(), out.out_test.objects.end(), by_name);
    out.in_test = out.train;
    return out;
}

}  // namespace tidykg
