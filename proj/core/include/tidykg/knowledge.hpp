#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace tidykg {

// One knowledge edge: head --relation--> tail, with the number of times it
// occurred in the source.
struct Triplet {
    std::string head;
    std::string relation;
    std::string tail;
    std::uint64_t count = 1;

    std::tuple<const std::string&, const std::string&, const std::string&> key() const {
        return {head, relation, tail};
    }
    bool operator==(const Triplet& o) const {
        return head == o.head && relation == o.relation && tail == o.tail && count == o.count;
    }
};

struct KnowledgeStats {
    std::size_t n_entities = 0;
    std::size_t n_relations = 0;
    std::size_t n_triplets = 0;
    bool operator==(const KnowledgeStats&) const = default;
};

// Counters for rows a loader dropped instead of failing on.
struct SkipReport {
    std::size_t rows_total = 0;
    std::size_t malformed = 0;
    std::size_t non_english = 0;
    std::size_t missing_fields = 0;
    std::size_t kept = 0;
};

// Normalized, deduplicated triplet store. Immutable once built; duplicate
// (head, relation, tail) keys merge with summed counts.
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(std::string source_tag) : source_tag_(std::move(source_tag)) {}

    void add(const std::string& head, const std::string& relation, const std::string& tail,
             std::uint64_t count = 1);

    // Sorts triplets and builds the entity adjacency index. add() after
    // freeze() is a programming error.
    void freeze();

    const std::string& source_tag() const { return source_tag_; }
    void set_source_tag(std::string tag) { source_tag_ = std::move(tag); }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    std::size_t size() const { return triplets_.size(); }
    bool empty() const { return triplets_.empty(); }

    // All triplets with head == entity or tail == entity.
    std::vector<Triplet> neighbors(const std::string& entity) const;

    // Distinct entity names (heads and tails), sorted.
    std::vector<std::string> entities() const;

    KnowledgeStats stats() const;

    // Relations by descending total occurrence count, ties broken
    // lexicographically, truncated to top_k.
    std::vector<std::pair<std::string, std::uint64_t>> relation_histogram(std::size_t top_k) const;

    bool contains(const std::string& head, const std::string& relation,
                  const std::string& tail) const;

private:
    std::string source_tag_ = "other";
    bool frozen_ = false;
    std::map<std::tuple<std::string, std::string, std::string>, std::uint64_t> pending_;
    std::vector<Triplet> triplets_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_entity_;
};

// ConceptNet assertions dump: tab-separated, >=5 columns
// (assertion URI, relation URI, start URI, end URI, metadata). Keeps rows
// whose start and end are both English concepts.
KnowledgeBase load_conceptnet(const std::string& path, SkipReport* report = nullptr);

// Visual-Genome-style relationships JSON: an array of image records, each
// with a "relationships" list of {predicate, subject, object}. Streaming
// parse; the file never becomes a DOM.
KnowledgeBase load_scenegraph(const std::string& path, SkipReport* report = nullptr);

// JSONL interchange: {"head":...,"rel":...,"tail":...,"count":...} per line.
// Invalid JSON or a missing field is fatal with the line number.
KnowledgeBase load_jsonl(const std::string& path);

// Load by format name: "conceptnet" | "vg" | "jsonl".
KnowledgeBase load_knowledge(const std::string& path, const std::string& format,
                             SkipReport* report = nullptr);

void save_jsonl(const KnowledgeBase& kb, const std::string& path);

// 3-column CSV: source,metric,value.
std::string stats_csv(const KnowledgeBase& kb);

}  // namespace tidykg
