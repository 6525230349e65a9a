#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tidykg/embeddings.hpp"
#include "tidykg/game.hpp"
#include "tidykg/nn.hpp"
#include "tidykg/rng.hpp"
#include "tidykg/subgraph.hpp"

namespace tidykg {

struct PolicyHyper {
    int embedding_dim = 100;
    int hidden = 64;
    int gat_rounds = 1;
    double leaky_slope = 0.2;

    bool operator==(const PolicyHyper&) const = default;
};

struct TensorRef {
    std::string name;
    double* data;
    std::size_t size;
    int rows, cols;
};

// All trainable weights. Token embeddings live in the (frozen) EmbeddingStore
// and are not part of this struct.
struct PolicyParameters {
    PolicyHyper hyper;
    nn::GruParams ctx_enc;  // observation/context encoder (hidden carried per episode)
    nn::GruParams act_enc;  // action encoder
    std::vector<nn::GatRound> gat;
    nn::Vector sentinel;
    nn::CoAttnParams co;
    nn::Matrix w_act;  // H x H
    nn::Vector b_act;  // H
    nn::Vector w_val;  // H
    double b_val = 0.0;

    static PolicyParameters init(const PolicyHyper& hyper, std::uint64_t seed);
    static PolicyParameters zeros(const PolicyHyper& hyper);

    std::vector<TensorRef> tensors();
    std::vector<TensorRef> tensors() const;  // refs stay mutable; const is logical
    std::size_t parameter_count() const;

    // Order-independent content digest, for carry-across-switch checks.
    std::uint64_t content_hash() const;
};

struct TextEncoding {
    nn::Matrix features;  // T x H, one row per token
    nn::Vector summary;   // final hidden state
};

// Recurrent sequence encoding with the context encoder. h0 defaults to zero;
// passing the previous step's summary makes C_t the running episode context.
// Empty input is padded with a single zero-vector token.
TextEncoding encode_text(const PolicyParameters& params, const EmbeddingStore& store,
                         const std::vector<std::string>& tokens,
                         const nn::Vector* h0 = nullptr);

// Node features from entity embeddings, gat_rounds of attention message
// passing over edges (treated as bidirectional) plus self loops, sentinel row
// appended last, untouched by message passing. Returns (N+1) x H.
nn::Matrix encode_graph(const PolicyParameters& params, const EmbeddingStore& store,
                        const CommonsenseSubgraph& graph);

// Integrated state vector from bidirectional attention between context token
// features and graph node features (sentinel included in normalization).
nn::Vector co_attention(const PolicyParameters& params, const nn::Matrix& context_feats,
                        const nn::Matrix& graph_feats);

struct ActionScores {
    nn::Vector probs;  // over the admissible list, sums to 1
    double value = 0.0;
};

// score_k = dot(action summary, w_act * integrated + b_act); softmax over the
// admissible set; critic value from the integrated state.
ActionScores action_scores(const PolicyParameters& params, const EmbeddingStore& store,
                           const nn::Vector& integrated, const std::vector<Action>& actions);

enum class ActMode { sample, greedy };

struct ActionChoice {
    std::size_t index = 0;
    double log_prob = 0.0;
    double value = 0.0;
};

ActionChoice act(const PolicyParameters& params, const EmbeddingStore& store,
                 const nn::Vector& integrated, const std::vector<Action>& actions, ActMode mode,
                 Rng& rng);

// ---------------------------------------------------------------------------
// Episode replay for training. A rollout captures per-step records; the loss
// re-runs the full pipeline on them as a pure function of the parameters,
// which is what both the analytic backward pass and the finite-difference
// oracle differentiate.
// ---------------------------------------------------------------------------
struct StepRecord {
    std::vector<std::string> obs_tokens;
    CommonsenseSubgraph graph;
    std::vector<Action> actions;
    int chosen = 0;
    double reward = 0.0;
    double log_prob = 0.0;  // filled at rollout time
    double value = 0.0;     // filled at rollout time
};

struct EpisodeRecord {
    std::vector<StepRecord> steps;
};

struct LossTerms {
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;  // mean entropy per step (reported)
    double total = 0.0;
};

// total = mean over episodes of
//   sum_t [ -A_t log pi(a_t) + value_coef (R_t - V_t)^2 - entropy_coef H(pi_t) ]
// Advantages are passed in as constants. When `grads` is non-null the
// analytic gradients are accumulated into it.
LossTerms episode_loss(const PolicyParameters& params, const EmbeddingStore& store,
                       const std::vector<EpisodeRecord>& episodes,
                       const std::vector<std::vector<double>>& returns,
                       const std::vector<std::vector<double>>& advantages, double value_coef,
                       double entropy_coef, PolicyParameters* grads);

// Checkpoint container: hyperparameters, all tensors, the embedding table and
// the knowledge-source tag. Save -> load -> save is byte-identical.
void save_checkpoint(const PolicyParameters& params, const EmbeddingStore& store,
                     const std::string& knowledge_source, const std::string& path);

struct Checkpoint {
    PolicyParameters params;
    EmbeddingStore store;
    std::string knowledge_source;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace tidykg
