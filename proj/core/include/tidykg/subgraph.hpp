#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tidykg/game.hpp"
#include "tidykg/knowledge.hpp"

namespace tidykg {

enum class EntityGroup { object, location };

// Cumulative set of entities the agent has seen this episode, with a stable
// group tag per entity. Grows monotonically; reset between episodes.
class EntitySet {
public:
    void add(const std::string& name, EntityGroup group);
    // Union with `extracted`; new entities are tagged via `tag_of`, existing
    // tags are never changed.
    template <typename TagFn>
    void update(const std::set<std::string>& extracted, TagFn&& tag_of) {
        for (const auto& name : extracted) {
            if (tags_.count(name) == 0) tags_[name] = tag_of(name);
        }
    }

    std::size_t size() const { return tags_.size(); }
    bool contains(const std::string& name) const { return tags_.count(name) != 0; }
    EntityGroup group(const std::string& name) const;
    // Sorted entity names.
    std::vector<std::string> names() const;
    const std::map<std::string, EntityGroup>& tags() const { return tags_; }

private:
    std::map<std::string, EntityGroup> tags_;
};

enum class EdgeProvenance { knowledge, cdc };

struct SubgraphEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    std::string relation;
    EdgeProvenance provenance = EdgeProvenance::knowledge;
};

// The agent's per-step commonsense subgraph over the cumulative entity set.
struct CommonsenseSubgraph {
    std::vector<std::string> nodes;  // sorted entity names
    std::vector<EntityGroup> groups;
    std::vector<SubgraphEdge> edges;

    std::size_t node_index(const std::string& name) const;
    bool linked(std::size_t a, std::size_t b) const;  // either direction
    std::string to_json() const;
};

// Whether Context Direct Connections add an edge for every object-location
// pair or only pairs the knowledge base already supports (in which case the
// augmentation adds nothing, by the no-duplicate rule).
enum class CdcMode { all_pairs, kb_supported };

CdcMode cdc_mode_from_string(const std::string& s);
std::string to_string(CdcMode mode);

// Vocabulary names found in the observation text, longest match first, word
// bounded, case insensitive. A longer name claims its span, so "dirty fork"
// suppresses "fork" at the same position.
std::set<std::string> extract_entities(const std::string& observation_text,
                                       const std::vector<std::string>& vocab);

// nodes = E_t; edges = all KB triplets with both endpoints in E_t.
CommonsenseSubgraph build_subgraph(const EntitySet& entities, const KnowledgeBase& kb);

// Adds "context" edges between object- and location-tagged nodes. In
// all_pairs mode every unlinked cross-group pair gets one; in kb_supported
// mode only already-linked pairs qualify, so no edge is added.
void apply_cdc(CommonsenseSubgraph& graph, CdcMode mode = CdcMode::all_pairs);

// Group tagger backed by game metadata: portable objects tag as objects,
// supporters/containers as locations, anything else defaults to object.
EntityGroup tag_from_spec(const GameSpec& spec, const std::string& name);

}  // namespace tidykg
