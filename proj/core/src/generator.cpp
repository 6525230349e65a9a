#include "tidykg/generator.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <map>
#include <set>

#include "tidykg/errors.hpp"
#include "tidykg/rng.hpp"

namespace tidykg {

LevelCounts level_counts(Level level) {
    switch (level) {
        case Level::easy: return {{1}, {1}, {1}};
        case Level::medium: return {{2, 3}, {1, 2, 3}, {1}};
        case Level::hard: return {{6, 7}, {5, 6, 7}, {1, 2}};
    }
    return {{1}, {1}, {1}};
}

namespace {

const char* opposite(const std::string& dir) {
    if (dir == "north") return "south";
    if (dir == "south") return "north";
    if (dir == "east") return "west";
    return "east";
}

// A spot a misplaced object can start in. Kept visible (floor, supporter, or
// open container) so every game is discoverable without prior knowledge.
struct StartSpot {
    ObjectPosition position;
    std::string location_name;  // empty for floor spots
};

}  // namespace

GameSpec generate_game(Level level, const EntityVocabulary& vocab, std::uint64_t seed,
                       Split split) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(level),
                        static_cast<std::uint64_t>(split)));
    const LevelCounts counts = level_counts(level);

    const int n_obj = rng.pick(counts.objects);
    std::vector<int> find_choices;
    for (int f : counts.to_find)
        if (f <= n_obj) find_choices.push_back(f);
    const int n_find = rng.pick(find_choices);
    const int n_rooms = rng.pick(counts.rooms);

    // Rooms with enough objects for the sampled count.
    std::vector<std::vector<std::string>> room_choices;
    if (n_rooms == 1) {
        for (const auto& r : vocab.rooms) {
            if (static_cast<int>(vocab.objects_with_goal_in({r}).size()) >= n_obj)
                room_choices.push_back({r});
        }
    } else {
        for (const auto& [a, b] : vocab.adjacency) {
            if (static_cast<int>(vocab.objects_with_goal_in({a, b}).size()) >= n_obj)
                room_choices.push_back({a, b});
        }
    }
    if (room_choices.empty()) {
        throw DataError("insufficient vocabulary: no " + std::string(n_rooms == 1 ? "room" : "adjacent room pair") +
                        " offers " + std::to_string(n_obj) + " objects (level " + to_string(level) +
                        ", split " + to_string(split) + ")");
    }
    const std::vector<std::string> chosen_rooms = rng.pick(room_choices);

    GameSpec spec;
    spec.level = level;
    spec.split = split;
    spec.seed = seed;

    for (const auto& name : chosen_rooms) spec.rooms.push_back({name, {}});
    if (chosen_rooms.size() == 2) {
        static const std::vector<std::string> dirs = {"north", "east", "south", "west"};
        const std::string dir = rng.pick(dirs);
        spec.rooms[0].exits[dir] = chosen_rooms[1];
        spec.rooms[1].exits[opposite(dir)] = chosen_rooms[0];
    }

    // Every vocabulary location of a chosen room is placed; containers start
    // open or closed on a coin flip.
    for (const auto& room : chosen_rooms) {
        for (const VocabLocation* l : vocab.locations_in_room(room)) {
            bool starts_open = l->kind == LocationKind::supporter ? true : rng.coin();
            spec.locations.push_back({l->name, l->kind, l->room, starts_open});
        }
    }

    std::vector<const VocabObject*> pool = vocab.objects_with_goal_in(chosen_rooms);
    rng.shuffle(pool);
    std::vector<const VocabObject*> chosen(pool.begin(), pool.begin() + n_obj);

    // First n_find start misplaced, the rest start at their goals.
    bool inventory_used = false;
    for (int i = 0; i < n_obj; ++i) {
        const VocabObject* o = chosen[i];
        PlacedObject po;
        po.name = o->name;
        po.goal_relation = o->goal_relation;
        po.goal_location = o->goal_location;

        if (i >= n_find) {
            po.initial = {ObjectPosition::Place::at_location, o->goal_location};
        } else if (!inventory_used && rng.next_below(8) == 0) {
            po.initial = {ObjectPosition::Place::inventory, ""};
            inventory_used = true;
        } else {
            std::vector<StartSpot> spots;
            for (const auto& room : chosen_rooms)
                spots.push_back({{ObjectPosition::Place::floor, room}, ""});
            for (const auto& l : spec.locations) {
                if (l.name == o->goal_location) continue;
                bool visible = l.kind == LocationKind::supporter || l.starts_open;
                if (visible)
                    spots.push_back({{ObjectPosition::Place::at_location, l.name}, l.name});
            }
            po.initial = spots[rng.index(spots.size())].position;
        }
        spec.objects.push_back(std::move(po));
    }

    spec.start_room = chosen_rooms[rng.index(chosen_rooms.size())];

    // Certify solvability; throws when the plan cannot reach score 1.0.
    oracle_policy(spec);
    return spec;
}

namespace {

// First direction of a shortest exit path from `from` to `to`.
std::string first_step_toward(const GameSpec& spec, const std::string& from,
                              const std::string& to) {
    std::deque<std::string> queue{from};
    std::map<std::string, std::pair<std::string, std::string>> came;  // room -> (prev, dir)
    std::set<std::string> seen{from};
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        if (cur == to) {
            std::string room = to;
            while (came.at(room).first != from) room = came.at(room).first;
            return came.at(room).second;
        }
        const PlacedRoom* r = spec.find_room(cur);
        if (r == nullptr) continue;
        for (const auto& [dir, next] : r->exits) {
            if (seen.insert(next).second) {
                came[next] = {cur, dir};
                queue.push_back(next);
            }
        }
    }
    throw NumericError("oracle: room \"" + to + "\" unreachable from \"" + from + "\"");
}

std::string object_room(const GameSpec& spec, const GameState& state, const std::string& name) {
    const ObjectPosition& pos = state.position(name);
    switch (pos.place) {
        case ObjectPosition::Place::floor: return pos.where;
        case ObjectPosition::Place::at_location: {
            const PlacedLocation* l = spec.find_location(pos.where);
            return l != nullptr ? l->room : "";
        }
        case ObjectPosition::Place::inventory: return state.agent_room();
    }
    return "";
}

}  // namespace

std::vector<Action> oracle_policy(const GameSpec& spec) {
    GameState state(spec);
    std::vector<Action> plan;

    auto act = [&](const std::string& text) {
        plan.push_back({text});
        state.step({text});
        if (static_cast<int>(plan.size()) > spec.max_steps) {
            throw NumericError("oracle: plan exceeds max_steps on seed " +
                               std::to_string(spec.seed));
        }
    };

    while (!state.done()) {
        if (!state.inventory().empty()) {
            const std::string held = state.inventory().front();
            const PlacedObject* o = spec.find_object(held);
            const PlacedLocation* goal = spec.find_location(o->goal_location);
            if (goal->room != state.agent_room()) {
                act("go " + first_step_toward(spec, state.agent_room(), goal->room));
            } else if (goal->kind == LocationKind::container && !state.is_open(goal->name)) {
                act("open " + goal->name);
            } else if (goal->kind == LocationKind::container) {
                act("insert " + held + " into " + goal->name);
            } else {
                act("put " + held + " on " + goal->name);
            }
            continue;
        }

        // Next misplaced object in this room: take it, opening its container
        // if needed; otherwise walk toward one.
        std::string to_open, to_take, target_room;
        for (const auto& o : spec.objects) {
            if (state.placed_correctly().count(o.name) != 0) continue;
            const std::string room = object_room(spec, state, o.name);
            if (room != state.agent_room()) {
                if (target_room.empty()) target_room = room;
                continue;
            }
            const ObjectPosition& pos = state.position(o.name);
            if (pos.place == ObjectPosition::Place::at_location) {
                const PlacedLocation* l = spec.find_location(pos.where);
                if (l->kind == LocationKind::container && !state.is_open(l->name)) {
                    if (to_open.empty()) to_open = l->name;
                    continue;
                }
            }
            to_take = o.name;
            break;
        }

        if (!to_take.empty()) {
            act("take " + to_take);
        } else if (!to_open.empty()) {
            act("open " + to_open);
        } else if (!target_room.empty()) {
            act("go " + first_step_toward(spec, state.agent_room(), target_room));
        } else {
            throw NumericError("oracle: no progress possible on seed " +
                               std::to_string(spec.seed));
        }
    }

    if (state.normalized_score() != 1.0) {
        throw NumericError("oracle: game not solved within max_steps on seed " +
                           std::to_string(spec.seed));
    }
    return plan;
}

std::vector<std::string> generate_games_to_dir(Level level, const EntityVocabulary& vocab,
                                               std::uint64_t first_seed, int count, Split split,
                                               const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(out_dir) / to_string(level) / to_string(split);
    fs::create_directories(dir);
    std::vector<std::string> paths;
    for (int i = 0; i < count; ++i) {
        std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
        GameSpec spec = generate_game(level, vocab, seed, split);
        fs::path file = dir / (std::to_string(seed) + ".json");
        save_game(spec, file.string());
        paths.push_back(file.string());
    }
    return paths;
}

}  // namespace tidykg
