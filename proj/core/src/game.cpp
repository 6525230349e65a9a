#include "tidykg/game.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Level l) {
    switch (l) {
        case Level::easy: return "easy";
        case Level::medium: return "medium";
        case Level::hard: return "hard";
    }
    return "easy";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::in_test: return "in";
        case Split::out_test: return "out";
    }
    return "train";
}

Level level_from_string(const std::string& s) {
    if (s == "easy") return Level::easy;
    if (s == "medium") return Level::medium;
    if (s == "hard") return Level::hard;
    throw UsageError("unknown level: " + s);
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "in") return Split::in_test;
    if (s == "out") return Split::out_test;
    throw UsageError("unknown split: " + s);
}

const PlacedLocation* GameSpec::find_location(const std::string& name) const {
    for (const auto& l : locations)
        if (l.name == name) return &l;
    return nullptr;
}

const PlacedObject* GameSpec::find_object(const std::string& name) const {
    for (const auto& o : objects)
        if (o.name == name) return &o;
    return nullptr;
}

const PlacedRoom* GameSpec::find_room(const std::string& name) const {
    for (const auto& r : rooms)
        if (r.name == name) return &r;
    return nullptr;
}

std::vector<std::string> GameSpec::misplaced_objects() const {
    std::vector<std::string> out;
    for (const auto& o : objects) {
        bool at_goal = o.initial.place == ObjectPosition::Place::at_location &&
                       o.initial.where == o.goal_location;
        if (!at_goal) out.push_back(o.name);
    }
    return out;
}

namespace {

ordered_json position_to_json(const ObjectPosition& p) {
    ordered_json j;
    switch (p.place) {
        case ObjectPosition::Place::at_location: j["place"] = "location"; break;
        case ObjectPosition::Place::floor: j["place"] = "floor"; break;
        case ObjectPosition::Place::inventory: j["place"] = "inventory"; break;
    }
    if (!p.where.empty()) j["where"] = p.where;
    return j;
}

ObjectPosition position_from_json(const ordered_json& j) {
    ObjectPosition p;
    std::string place = j.at("place").get<std::string>();
    if (place == "location") p.place = ObjectPosition::Place::at_location;
    else if (place == "floor") p.place = ObjectPosition::Place::floor;
    else if (place == "inventory") p.place = ObjectPosition::Place::inventory;
    else throw DataError("bad object position: " + place);
    p.where = j.value("where", "");
    return p;
}

}  // namespace

std::string GameSpec::to_json() const {
    ordered_json j;
    j["level"] = tidykg::to_string(level);
    j["split"] = tidykg::to_string(split);
    j["seed"] = seed;
    j["max_steps"] = max_steps;
    j["inventory_capacity"] = inventory_capacity;
    j["start_room"] = start_room;
    j["rooms"] = ordered_json::array();
    for (const auto& r : rooms) {
        ordered_json jr;
        jr["name"] = r.name;
        jr["exits"] = ordered_json::object();
        for (const auto& [dir, room] : r.exits) jr["exits"][dir] = room;
        j["rooms"].push_back(jr);
    }
    j["locations"] = ordered_json::array();
    for (const auto& l : locations) {
        ordered_json jl;
        jl["name"] = l.name;
        jl["kind"] = tidykg::to_string(l.kind);
        jl["room"] = l.room;
        jl["starts_open"] = l.starts_open;
        j["locations"].push_back(jl);
    }
    j["objects"] = ordered_json::array();
    for (const auto& o : objects) {
        ordered_json jo;
        jo["name"] = o.name;
        jo["goal_relation"] = tidykg::to_string(o.goal_relation);
        jo["goal_location"] = o.goal_location;
        jo["initial"] = position_to_json(o.initial);
        j["objects"].push_back(jo);
    }
    return j.dump(2) + "\n";
}

GameSpec GameSpec::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("game spec is not valid JSON");
    GameSpec spec;
    try {
        spec.level = level_from_string(j.at("level").get<std::string>());
        spec.split = split_from_string(j.at("split").get<std::string>());
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.max_steps = j.at("max_steps").get<int>();
        spec.inventory_capacity = j.value("inventory_capacity", 1);
        spec.start_room = j.at("start_room").get<std::string>();
        for (const auto& jr : j.at("rooms")) {
            PlacedRoom r;
            r.name = jr.at("name").get<std::string>();
            for (const auto& [dir, room] : jr.at("exits").items())
                r.exits[dir] = room.get<std::string>();
            spec.rooms.push_back(std::move(r));
        }
        for (const auto& jl : j.at("locations")) {
            spec.locations.push_back({jl.at("name").get<std::string>(),
                                      location_kind_from_string(jl.at("kind").get<std::string>()),
                                      jl.at("room").get<std::string>(),
                                      jl.at("starts_open").get<bool>()});
        }
        for (const auto& jo : j.at("objects")) {
            spec.objects.push_back(
                {jo.at("name").get<std::string>(),
                 goal_relation_from_string(jo.at("goal_relation").get<std::string>()),
                 jo.at("goal_location").get<std::string>(),
                 position_from_json(jo.at("initial"))});
        }
    } catch (const ordered_json::exception& e) {
        throw DataError(std::string("game spec: ") + e.what());
    }
    return spec;
}

void save_game(const GameSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write game spec: " + path);
    out << spec.to_json();
}

GameSpec load_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open game spec: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return GameSpec::from_json(text);
}

GameState::GameState(GameSpec spec) : spec_(std::move(spec)) {
    agent_room_ = spec_.start_room;
    for (const auto& l : spec_.locations) {
        if (l.kind == LocationKind::container) open_[l.name] = l.starts_open;
    }
    for (const auto& o : spec_.objects) {
        if (o.initial.place == ObjectPosition::Place::inventory) {
            inventory_.push_back(o.name);
            positions_[o.name] = o.initial;
        } else {
            positions_[o.name] = o.initial;
        }
        bool at_goal = o.initial.place == ObjectPosition::Place::at_location &&
                       o.initial.where == o.goal_location;
        if (at_goal) {
            placed_correctly_.insert(o.name);
        } else {
            initially_misplaced_.insert(o.name);
        }
    }
}

const ObjectPosition& GameState::position(const std::string& object) const {
    auto it = positions_.find(object);
    if (it == positions_.end()) throw DataError("unknown object: " + object);
    return it->second;
}

bool GameState::is_open(const std::string& container) const {
    auto it = open_.find(container);
    return it != open_.end() && it->second;
}

bool GameState::object_visible(const std::string& name) const {
    const ObjectPosition& pos = position(name);
    switch (pos.place) {
        case ObjectPosition::Place::inventory:
            return true;
        case ObjectPosition::Place::floor:
            return pos.where == agent_room_;
        case ObjectPosition::Place::at_location: {
            const PlacedLocation* loc = spec_.find_location(pos.where);
            if (loc == nullptr || loc->room != agent_room_) return false;
            return loc->kind == LocationKind::supporter || is_open(loc->name);
        }
    }
    return false;
}

std::vector<std::string> GameState::visible_objects() const {
    std::vector<std::string> out;
    for (const auto& o : spec_.objects) {
        if (object_visible(o.name)) out.push_back(o.name);
    }
    return out;
}

std::string GameState::render_room() const {
    std::string text = "You are in the " + agent_room_ + ".";

    auto objects_at = [&](const std::string& loc) {
        std::vector<std::string> names;
        for (const auto& o : spec_.objects) {
            const ObjectPosition& p = position(o.name);
            if (p.place == ObjectPosition::Place::at_location && p.where == loc)
                names.push_back(o.name);
        }
        return names;
    };

    for (const auto& l : spec_.locations) {
        if (l.room != agent_room_) continue;
        if (l.kind == LocationKind::supporter) {
            text += " On the " + l.name + " you see " + join_names(objects_at(l.name)) + ".";
        } else if (is_open(l.name)) {
            text += " The " + l.name + " is open. In the " + l.name + " you see " +
                    join_names(objects_at(l.name)) + ".";
        } else {
            text += " The " + l.name + " is closed.";
        }
    }

    std::vector<std::string> floor_names;
    for (const auto& o : spec_.objects) {
        const ObjectPosition& p = position(o.name);
        if (p.place == ObjectPosition::Place::floor && p.where == agent_room_)
            floor_names.push_back(o.name);
    }
    if (!floor_names.empty()) {
        text += " On the floor you see " + join_names(floor_names) + ".";
    }

    for (const auto& held : inventory_) {
        text += " You are carrying " + join_names({held}) + ".";
    }

    const PlacedRoom* room = spec_.find_room(agent_room_);
    if (room != nullptr && !room->exits.empty()) {
        std::vector<std::string> dirs;
        for (const auto& [dir, _] : room->exits) dirs.push_back(dir);
        std::string joined;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            if (i > 0) joined += (i + 1 == dirs.size()) ? " and " : ", ";
            joined += dirs[i];
        }
        text += dirs.size() == 1 ? " There is an exit leading " + joined + "."
                                 : " There are exits leading " + joined + ".";
    }
    return text;
}

Observation GameState::observe() const { return {render_room(), ""}; }

std::vector<Action> GameState::admissible_actions() const {
    std::vector<Action> actions;
    actions.push_back({"look"});

    const PlacedRoom* room = spec_.find_room(agent_room_);
    if (room != nullptr) {
        for (const auto& [dir, _] : room->exits) actions.push_back({"go " + dir});
    }

    for (const auto& l : spec_.locations) {
        if (l.room != agent_room_ || l.kind != LocationKind::container) continue;
        if (!is_open(l.name)) actions.push_back({"open " + l.name});
    }

    if (static_cast<int>(inventory_.size()) < spec_.inventory_capacity) {
        for (const auto& o : spec_.objects) {
            if (position(o.name).place == ObjectPosition::Place::inventory) continue;
            if (placed_correctly_.count(o.name) != 0) continue;  // take disabled once placed
            if (object_visible(o.name)) actions.push_back({"take " + o.name});
        }
    }

    for (const auto& held : inventory_) {
        for (const auto& l : spec_.locations) {
            if (l.room != agent_room_) continue;
            if (l.kind == LocationKind::supporter) {
                actions.push_back({"put " + held + " on " + l.name});
            } else if (is_open(l.name)) {
                actions.push_back({"insert " + held + " into " + l.name});
            }
        }
    }

    std::sort(actions.begin(), actions.end());
    return actions;
}

StepResult GameState::fail_step(const std::string& message) {
    ++t_;
    if (t_ >= spec_.max_steps) done_ = true;
    Observation obs = observe();
    obs.feedback = message;
    return {obs, 0.0, done_};
}

void GameState::place_object(const std::string& name, const ObjectPosition& pos) {
    positions_[name] = pos;
}

StepResult GameState::step(const Action& action) {
    if (done_) throw DataError("step on a finished game");

    std::vector<Action> legal = admissible_actions();
    if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
        return fail_step("That is not possible here.");
    }

    double reward = 0.0;
    std::string feedback;
    std::vector<std::string> words = split(action.text, ' ');

    if (action.text == "look") {
        feedback = "You look around.";
    } else if (words[0] == "go") {
        const PlacedRoom* room = spec_.find_room(agent_room_);
        agent_room_ = room->exits.at(words[1]);
        feedback = "You go " + words[1] + ".";
    } else if (words[0] == "open") {
        std::string name = action.text.substr(5);
        open_[name] = true;
        feedback = "You open the " + name + ".";
    } else if (words[0] == "take") {
        std::string name = action.text.substr(5);
        inventory_.push_back(name);
        place_object(name, {ObjectPosition::Place::inventory, ""});
        feedback = "You take the " + name + ".";
    } else {  // put <obj> on <loc> | insert <obj> into <loc>
        bool is_put = words[0] == "put";
        std::string sep = is_put ? " on " : " into ";
        std::string rest = action.text.substr(is_put ? 4 : 7);
        std::size_t at = rest.rfind(sep);
        std::string obj = rest.substr(0, at);
        std::string loc = rest.substr(at + sep.size());

        inventory_.erase(std::find(inventory_.begin(), inventory_.end(), obj));
        place_object(obj, {ObjectPosition::Place::at_location, loc});
        feedback = is_put ? "You put the " + obj + " on the " + loc + "."
                          : "You insert the " + obj + " into the " + loc + ".";

        const PlacedObject* po = spec_.find_object(obj);
        if (po != nullptr && po->goal_location == loc &&
            placed_correctly_.count(obj) == 0) {
            placed_correctly_.insert(obj);
            reward = 1.0;
        }
    }

    ++t_;
    if (placed_correctly_.size() == spec_.objects.size() || t_ >= spec_.max_steps) done_ = true;

    Observation obs = observe();
    obs.feedback = feedback;
    return {obs, reward, done_};
}

double GameState::normalized_score() const {
    if (initially_misplaced_.empty()) return 1.0;
    std::size_t placed = 0;
    for (const auto& name : initially_misplaced_) {
        if (placed_correctly_.count(name) != 0) ++placed;
    }
    return static_cast<double>(placed) / static_cast<double>(initially_misplaced_.size());
}

std::pair<GameState, Observation> reset(const GameSpec& spec) {
    GameState state(spec);
    return {state, state.observe()};
}

}  // namespace tidykg
