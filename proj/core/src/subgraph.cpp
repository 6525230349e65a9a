#include "tidykg/subgraph.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using ordered_json = nlohmann::ordered_json;

void EntitySet::add(const std::string& name, EntityGroup group) {
    tags_.emplace(name, group);
}

EntityGroup EntitySet::group(const std::string& name) const {
    auto it = tags_.find(name);
    if (it == tags_.end()) throw DataError("entity not in set: " + name);
    return it->second;
}

std::vector<std::string> EntitySet::names() const {
    std::vector<std::string> out;
    out.reserve(tags_.size());
    for (const auto& [name, _] : tags_) out.push_back(name);
    return out;
}

std::size_t CommonsenseSubgraph::node_index(const std::string& name) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
    if (it == nodes.end() || *it != name) throw DataError("node not in subgraph: " + name);
    return static_cast<std::size_t>(it - nodes.begin());
}

bool CommonsenseSubgraph::linked(std::size_t a, std::size_t b) const {
    for (const auto& e : edges) {
        if ((e.src == a && e.dst == b) || (e.src == b && e.dst == a)) return true;
    }
    return false;
}

std::string CommonsenseSubgraph::to_json() const {
    ordered_json j;
    j["nodes"] = ordered_json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ordered_json n;
        n["name"] = nodes[i];
        n["group"] = groups[i] == EntityGroup::object ? "object" : "location";
        j["nodes"].push_back(n);
    }
    j["edges"] = ordered_json::array();
    for (const auto& e : edges) {
        ordered_json je;
        je["src"] = nodes[e.src];
        je["dst"] = nodes[e.dst];
        je["relation"] = e.relation;
        je["provenance"] = e.provenance == EdgeProvenance::knowledge ? "knowledge" : "cdc";
        j["edges"].push_back(je);
    }
    return j.dump(2) + "\n";
}

CdcMode cdc_mode_from_string(const std::string& s) {
    if (s == "all" || s == "all_pairs") return CdcMode::all_pairs;
    if (s == "kb" || s == "kb_supported") return CdcMode::kb_supported;
    throw UsageError("unknown cdc mode: " + s);
}

std::string to_string(CdcMode mode) {
    return mode == CdcMode::all_pairs ? "all_pairs" : "kb_supported";
}

std::set<std::string> extract_entities(const std::string& observation_text,
                                       const std::vector<std::string>& vocab) {
    std::string text = to_lower(observation_text);
    std::vector<bool> claimed(text.size(), false);

    std::vector<std::string> names = vocab;
    std::stable_sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });

    auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };

    std::set<std::string> found;
    for (const auto& name : names) {
        if (name.empty()) continue;
        std::string needle = to_lower(name);
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !is_word(static_cast<unsigned char>(text[pos - 1]));
            std::size_t end = pos + needle.size();
            bool right_ok = end == text.size() || !is_word(static_cast<unsigned char>(text[end]));
            bool free_span = true;
            for (std::size_t i = pos; i < end && free_span; ++i) free_span = !claimed[i];
            if (left_ok && right_ok && free_span) {
                for (std::size_t i = pos; i < end; ++i) claimed[i] = true;
                found.insert(name);
                pos = end;
            } else {
                ++pos;
            }
        }
    }
    return found;
}

CommonsenseSubgraph build_subgraph(const EntitySet& entities, const KnowledgeBase& kb) {
    CommonsenseSubgraph g;
    g.nodes = entities.names();  // already sorted
    g.groups.reserve(g.nodes.size());
    for (const auto& name : g.nodes) g.groups.push_back(entities.group(name));

    std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        for (const Triplet& t : kb.neighbors(g.nodes[i])) {
            if (!entities.contains(t.head) || !entities.contains(t.tail)) continue;
            std::size_t src = g.node_index(t.head);
            std::size_t dst = g.node_index(t.tail);
            if (seen.insert({src, dst, t.relation}).second) {
                g.edges.push_back({src, dst, t.relation, EdgeProvenance::knowledge});
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const SubgraphEdge& a, const SubgraphEdge& b) {
        return std::tie(a.src, a.dst, a.relation) < std::tie(b.src, b.dst, b.relation);
    });
    return g;
}

void apply_cdc(CommonsenseSubgraph& graph, CdcMode mode) {
    if (mode == CdcMode::kb_supported) return;  // supported pairs are already linked

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (graph.groups[i] != EntityGroup::object) continue;
        for (std::size_t j = 0; j < graph.nodes.size(); ++j) {
            if (graph.groups[j] != EntityGroup::location) continue;
            if (graph.linked(i, j)) continue;
            graph.edges.push_back({i, j, "context", EdgeProvenance::cdc});
        }
    }
}

EntityGroup tag_from_spec(const GameSpec& spec, const std::string& name) {
    if (spec.find_location(name) != nullptr) return EntityGroup::location;
    return EntityGroup::object;
}

}  // namespace tidykg
