#pragma once

#include <string>
#include <vector>

#include "tidykg/embeddings.hpp"
#include "tidykg/knowledge.hpp"

namespace tidykg {

// Counting unit for pair similarity: distinct unordered entity pairs, or one
// unit per distinct triplet.
enum class PairUnit { pair, triplet };

struct EntityMatch {
    std::string entity;
    std::string best_manual;
    double score = 0.0;
};

struct SimilarityReport {
    std::string source;
    std::size_t entity_count = 0;
    std::size_t pair_count = 0;
    double entity_threshold = 0.7;
    double pair_threshold = 0.65;
    std::vector<EntityMatch> entity_matches;       // per resolved candidate entity
    std::vector<std::string> unresolved_entities;  // excluded from counts
    std::size_t candidate_entities = 0;
    std::size_t candidate_pairs = 0;
};

// Number of candidate entities whose max cosine similarity against the manual
// entities exceeds the threshold. Throws DataError on an empty manual KB.
SimilarityReport entity_similarity_count(const KnowledgeBase& candidate,
                                         const KnowledgeBase& manual,
                                         const EmbeddingStore& store, double threshold);

// Number of candidate pairs {e1,e2} whose max cosine of summed embeddings
// against manual triplet pairs exceeds the threshold. `threads` partitions
// the work; results are identical for any partitioning.
SimilarityReport pair_similarity_count(const KnowledgeBase& candidate,
                                       const KnowledgeBase& manual, const EmbeddingStore& store,
                                       double threshold, PairUnit unit = PairUnit::pair,
                                       int threads = 1);

// One report per candidate with both counts filled in.
std::vector<SimilarityReport> compare_report(const std::vector<const KnowledgeBase*>& candidates,
                                             const KnowledgeBase& manual,
                                             const EmbeddingStore& store, double entity_threshold,
                                             double pair_threshold,
                                             PairUnit unit = PairUnit::pair, int threads = 1);

// CSV: source,n_entities_similar,n_pairs_similar,entity_threshold,pair_threshold
std::string compare_csv(const std::vector<SimilarityReport>& reports);

}  // namespace tidykg
