#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tidykg {

// token -> d-dimensional vector, GloVe text format. Immutable after load.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(int dimension) : dimension_(dimension) {}

    int dimension() const { return dimension_; }
    std::size_t size() const { return table_.size(); }

    void insert(const std::string& token, Eigen::VectorXd vec);
    const Eigen::VectorXd* find(const std::string& token) const;

    const std::unordered_map<std::string, Eigen::VectorXd>& table() const { return table_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    int dimension_ = 0;
    std::unordered_map<std::string, Eigen::VectorXd> table_;
    std::vector<std::string> warnings_;
};

struct EntityEmbedding {
    std::string entity;
    Eigen::VectorXd vector;
    bool resolved = false;  // false when every token was out of vocabulary
};

// Plain text, one line per token: "token v1 v2 ... vd". The dimension comes
// from the first line unless expected_d is given. Inconsistent lines and an
// empty file are fatal; a duplicate token keeps the last occurrence and
// records a warning.
EmbeddingStore load_embeddings(const std::string& path,
                               std::optional<int> expected_d = std::nullopt);

// Mean of the vectors of in-vocabulary tokens of the (already normalized)
// entity name; zero vector with resolved=false when none are known.
EntityEmbedding embed_entity(const EmbeddingStore& store, const std::string& entity);

// Standard cosine; 0 when either vector has zero norm. Dimension mismatch is
// fatal.
double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace tidykg
