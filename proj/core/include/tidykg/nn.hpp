#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "tidykg/rng.hpp"

namespace tidykg::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Vector softmax(const Vector& logits);
// dL/dlogits given dL/dprobs for p = softmax(z).
Vector softmax_backward(const Vector& probs, const Vector& d_probs);

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
void init_uniform(Matrix& m, int fan_in, Rng& rng);
void init_uniform(Vector& v, int fan_in, Rng& rng);

// ---------------------------------------------------------------------------
// GRU. Gate order [z; r; n] stacked in 3H rows:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + bn + r .* (Un h))
//   h' = (1 - z) .* n + z .* h
// ---------------------------------------------------------------------------
struct GruParams {
    Matrix w_x;   // 3H x d
    Matrix w_h;   // 3H x H
    Vector bias;  // 3H

    int hidden() const { return static_cast<int>(w_h.cols()); }
    int input() const { return static_cast<int>(w_x.cols()); }

    static GruParams init(int hidden, int input, Rng& rng);
    static GruParams zeros(int hidden, int input);
};

struct GruStepCache {
    Vector x, h_prev, z, r, n, uh_n;
};

struct GruSequence {
    Matrix outputs;  // T x H
    std::vector<GruStepCache> steps;
    Vector summary() const { return outputs.row(outputs.rows() - 1); }
};

// inputs: T x d (T >= 1).
GruSequence gru_forward(const GruParams& p, const Matrix& inputs, const Vector& h0);

// d_outputs: T x H upstream gradient for every hidden row. Accumulates
// parameter gradients into `grads` and returns dL/dh0. Input gradients are
// not produced (token embeddings are frozen).
Vector gru_backward(const GruParams& p, const GruSequence& seq, const Matrix& d_outputs,
                    GruParams& grads);

// ---------------------------------------------------------------------------
// Graph attention round. For node i with neighborhood N(i) = {i} + adjacent:
//   h = X W^T
//   e_ij = leaky_relu(a_src . h_i + a_dst . h_j)
//   alpha_i = softmax_{j in N(i)}(e_i.)
//   out_i = sum_j alpha_ij h_j
// ---------------------------------------------------------------------------
struct GatRound {
    Matrix w;      // H x F_in
    Vector a_src;  // H
    Vector a_dst;  // H

    static GatRound init(int hidden, int input, Rng& rng);
    static GatRound zeros(int hidden, int input);
};

struct GatCache {
    Matrix x;                                   // N x F_in
    Matrix h;                                   // N x H (transformed)
    std::vector<std::vector<int>> neighbors;    // sorted, self included
    std::vector<Vector> alpha;                  // per node, aligned with neighbors
    std::vector<Vector> pre;                    // pre-activation logits
    Matrix out;                                 // N x H
};

// neighbors[i] must be sorted and include i.
GatCache gat_forward(const GatRound& p, const Matrix& x,
                     const std::vector<std::vector<int>>& neighbors, double leaky_slope);

// Returns dL/dx for chaining rounds; accumulates into grads.
Matrix gat_backward(const GatRound& p, const GatCache& cache, const Matrix& d_out,
                    double leaky_slope, GatRound& grads);

// ---------------------------------------------------------------------------
// Co-attention between context features C (T x H) and graph features
// G (M x H, sentinel row included):
//   A = C Wco G^T
//   alpha = row softmax (over graph), beta = column softmax (over context)
//   gbar = G^T mean_rows(alpha)   (attended graph summary)
//   cbar = C^T mean_cols(beta)    (attended context summary)
//   u = [cbar; gbar; cbar .* gbar]
//   s = tanh(Wint u + bint)
// ---------------------------------------------------------------------------
struct CoAttnParams {
    Matrix w_co;   // H x H
    Matrix w_int;  // H x 3H
    Vector b_int;  // H

    static CoAttnParams init(int hidden, Rng& rng);
    static CoAttnParams zeros(int hidden);
};

struct CoAttnCache {
    Matrix c, g;          // inputs
    Matrix affinity;      // T x M
    Matrix alpha, beta;   // T x M
    Vector alpha_mean;    // M
    Vector beta_mean;     // T
    Vector gbar, cbar;    // H
    Vector u;             // 3H
    Vector s;             // H
};

CoAttnCache co_attention_forward(const CoAttnParams& p, const Matrix& context_feats,
                                 const Matrix& graph_feats);

struct CoAttnGradients {
    Matrix d_context;  // T x H
    Matrix d_graph;    // M x H
};

CoAttnGradients co_attention_backward(const CoAttnParams& p, const CoAttnCache& cache,
                                      const Vector& d_s, CoAttnParams& grads);

// ---------------------------------------------------------------------------
// Adam over a flat parameter vector.
// ---------------------------------------------------------------------------
class Adam {
public:
    Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    // One optimizer step over the full parameter set, given as (param ptr,
    // grad ptr, element count) slices whose total size matches the state.
    void step(const std::vector<std::tuple<double*, const double*, std::size_t>>& slices);
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    Vector m_, v_;
};

// Scale grads in place so the global L2 norm is at most max_norm. Returns the
// pre-clip norm.
double clip_global_norm(std::vector<std::pair<double*, std::size_t>>& tensors, double max_norm);

}  // namespace tidykg::nn
