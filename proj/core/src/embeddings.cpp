#include "tidykg/embeddings.hpp"

#include <cstdlib>
#include <fstream>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

void EmbeddingStore::insert(const std::string& token, Eigen::VectorXd vec) {
    table_[token] = std::move(vec);
}

const Eigen::VectorXd* EmbeddingStore::find(const std::string& token) const {
    auto it = table_.find(token);
    return it == table_.end() ? nullptr : &it->second;
}

EmbeddingStore load_embeddings(const std::string& path, std::optional<int> expected_d) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file: " + path);

    std::unordered_map<std::string, Eigen::VectorXd> table;
    std::vector<std::string> warnings;
    int d = expected_d.value_or(0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        std::vector<std::string> parts = split_whitespace(line);
        if (parts.size() < 2) {
            throw DataError("embeddings line " + std::to_string(line_no) +
                            ": expected a token followed by numbers");
        }
        int line_d = static_cast<int>(parts.size()) - 1;
        if (d == 0) d = line_d;
        if (line_d != d) {
            throw DataError("embeddings line " + std::to_string(line_no) + ": dimension " +
                            std::to_string(line_d) + " does not match " + std::to_string(d));
        }
        Eigen::VectorXd vec(d);
        for (int i = 0; i < d; ++i) {
            char* end = nullptr;
            vec[i] = std::strtod(parts[i + 1].c_str(), &end);
            if (end == parts[i + 1].c_str() || *end != '\0') {
                throw DataError("embeddings line " + std::to_string(line_no) +
                                ": bad number \"" + parts[i + 1] + "\"");
            }
        }
        std::string token = to_lower(parts[0]);
        if (table.count(token) != 0) {
            warnings.push_back("duplicate token \"" + token + "\" on line " +
                               std::to_string(line_no) + ", keeping the last occurrence");
        }
        table[token] = std::move(vec);
    }
    if (table.empty()) throw DataError("embeddings file is empty: " + path);

    EmbeddingStore store(d);
    for (auto& [tok, vec] : table) store.insert(tok, std::move(vec));
    for (auto& w : warnings) store.add_warning(std::move(w));
    return store;
}

EntityEmbedding embed_entity(const EmbeddingStore& store, const std::string& entity) {
    EntityEmbedding e;
    e.entity = entity;
    e.vector = Eigen::VectorXd::Zero(store.dimension());
    int hits = 0;
    for (const std::string& token : tokenize(entity)) {
        if (const Eigen::VectorXd* vec = store.find(token)) {
            e.vector += *vec;
            ++hits;
        }
    }
    if (hits > 0) {
        e.vector /= static_cast<double>(hits);
        e.resolved = true;
    }
    return e;
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size()) {
        throw NumericError("cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()));
    }
    double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return u.dot(v) / (nu * nv);
}

}  // namespace tidykg
