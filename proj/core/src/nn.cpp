#include "tidykg/nn.hpp"

#include <cmath>

#include "tidykg/errors.hpp"

namespace tidykg::nn {

Vector softmax(const Vector& logits) {
    Vector out = logits;
    double m = out.maxCoeff();
    out = (out.array() - m).exp();
    out /= out.sum();
    return out;
}

Vector softmax_backward(const Vector& probs, const Vector& d_probs) {
    double dot = probs.dot(d_probs);
    return probs.array() * (d_probs.array() - dot);
}

void init_uniform(Matrix& m, int fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
}

void init_uniform(Vector& v, int fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-bound, bound);
}

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

GruParams GruParams::init(int hidden, int input, Rng& rng) {
    GruParams p;
    p.w_x = Matrix(3 * hidden, input);
    p.w_h = Matrix(3 * hidden, hidden);
    p.bias = Vector::Zero(3 * hidden);
    init_uniform(p.w_x, input, rng);
    init_uniform(p.w_h, hidden, rng);
    init_uniform(p.bias, hidden, rng);
    return p;
}

GruParams GruParams::zeros(int hidden, int input) {
    GruParams p;
    p.w_x = Matrix::Zero(3 * hidden, input);
    p.w_h = Matrix::Zero(3 * hidden, hidden);
    p.bias = Vector::Zero(3 * hidden);
    return p;
}

GruSequence gru_forward(const GruParams& p, const Matrix& inputs, const Vector& h0) {
    const int H = p.hidden();
    const Eigen::Index T = inputs.rows();
    GruSequence seq;
    seq.outputs = Matrix(T, H);
    seq.steps.resize(static_cast<std::size_t>(T));

    Vector h = h0;
    for (Eigen::Index t = 0; t < T; ++t) {
        GruStepCache& c = seq.steps[static_cast<std::size_t>(t)];
        c.x = inputs.row(t);
        c.h_prev = h;

        Vector ax = p.w_x * c.x + p.bias;  // 3H
        Vector ah = p.w_h * h;             // 3H

        c.z = Vector(H);
        c.r = Vector(H);
        c.uh_n = ah.segment(2 * H, H);
        for (int i = 0; i < H; ++i) {
            c.z[i] = sigmoid(ax[i] + ah[i]);
            c.r[i] = sigmoid(ax[H + i] + ah[H + i]);
        }
        c.n = (ax.segment(2 * H, H).array() + c.r.array() * c.uh_n.array()).tanh();

        h = ((1.0 - c.z.array()) * c.n.array() + c.z.array() * c.h_prev.array()).matrix();
        seq.outputs.row(t) = h;
    }
    return seq;
}

Vector gru_backward(const GruParams& p, const GruSequence& seq, const Matrix& d_outputs,
                    GruParams& grads) {
    const int H = p.hidden();
    const Eigen::Index T = seq.outputs.rows();

    Vector dh = Vector::Zero(H);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
        const GruStepCache& c = seq.steps[static_cast<std::size_t>(t)];
        dh += d_outputs.row(t).transpose();

        Vector dn = (dh.array() * (1.0 - c.z.array())).matrix();
        Vector dz = (dh.array() * (c.h_prev.array() - c.n.array())).matrix();
        Vector dh_prev = (dh.array() * c.z.array()).matrix();

        Vector da_n = (dn.array() * (1.0 - c.n.array().square())).matrix();
        Vector dr = (da_n.array() * c.uh_n.array()).matrix();
        Vector duh_n = (da_n.array() * c.r.array()).matrix();

        Vector da_z = (dz.array() * c.z.array() * (1.0 - c.z.array())).matrix();
        Vector da_r = (dr.array() * c.r.array() * (1.0 - c.r.array())).matrix();

        Vector da(3 * H);  // gradient of [az; ar; an] pre-activations
        da.segment(0, H) = da_z;
        da.segment(H, H) = da_r;
        da.segment(2 * H, H) = da_n;

        grads.w_x += da * c.x.transpose();
        grads.bias += da;

        // w_h rows: [Uz; Ur; Un], where Un multiplies through duh_n.
        Vector dah(3 * H);
        dah.segment(0, H) = da_z;
        dah.segment(H, H) = da_r;
        dah.segment(2 * H, H) = duh_n;
        grads.w_h += dah * c.h_prev.transpose();

        dh_prev += p.w_h.transpose() * dah;
        dh = dh_prev;
    }
    return dh;
}

GatRound GatRound::init(int hidden, int input, Rng& rng) {
    GatRound p;
    p.w = Matrix(hidden, input);
    p.a_src = Vector(hidden);
    p.a_dst = Vector(hidden);
    init_uniform(p.w, input, rng);
    init_uniform(p.a_src, hidden, rng);
    init_uniform(p.a_dst, hidden, rng);
    return p;
}

GatRound GatRound::zeros(int hidden, int input) {
    GatRound p;
    p.w = Matrix::Zero(hidden, input);
    p.a_src = Vector::Zero(hidden);
    p.a_dst = Vector::Zero(hidden);
    return p;
}

GatCache gat_forward(const GatRound& p, const Matrix& x,
                     const std::vector<std::vector<int>>& neighbors, double leaky_slope) {
    const Eigen::Index n = x.rows();
    const int H = static_cast<int>(p.w.rows());

    GatCache cache;
    cache.x = x;
    cache.h = x * p.w.transpose();  // N x H
    cache.neighbors = neighbors;
    cache.alpha.resize(static_cast<std::size_t>(n));
    cache.pre.resize(static_cast<std::size_t>(n));
    cache.out = Matrix::Zero(n, H);

    Vector src_score = cache.h * p.a_src;  // N
    Vector dst_score = cache.h * p.a_dst;  // N

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nbrs = neighbors[static_cast<std::size_t>(i)];
        Vector pre(static_cast<Eigen::Index>(nbrs.size()));
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            double e = src_score[i] + dst_score[nbrs[k]];
            pre[static_cast<Eigen::Index>(k)] = e >= 0.0 ? e : leaky_slope * e;
        }
        Vector alpha = softmax(pre);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            cache.out.row(i) += alpha[static_cast<Eigen::Index>(k)] * cache.h.row(nbrs[k]);
        }
        cache.pre[static_cast<std::size_t>(i)] = std::move(pre);
        cache.alpha[static_cast<std::size_t>(i)] = std::move(alpha);
    }
    return cache;
}

Matrix gat_backward(const GatRound& p, const GatCache& cache, const Matrix& d_out,
                    double leaky_slope, GatRound& grads) {
    const Eigen::Index n = cache.x.rows();
    const int H = static_cast<int>(p.w.rows());

    Matrix dh = Matrix::Zero(n, H);
    Vector d_src_score = Vector::Zero(n);
    Vector d_dst_score = Vector::Zero(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nbrs = cache.neighbors[static_cast<std::size_t>(i)];
        const Vector& alpha = cache.alpha[static_cast<std::size_t>(i)];
        const Vector& pre = cache.pre[static_cast<std::size_t>(i)];

        Vector d_alpha(static_cast<Eigen::Index>(nbrs.size()));
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            d_alpha[static_cast<Eigen::Index>(k)] = d_out.row(i).dot(cache.h.row(nbrs[k]));
            dh.row(nbrs[k]) += alpha[static_cast<Eigen::Index>(k)] * d_out.row(i);
        }
        Vector d_pre = softmax_backward(alpha, d_alpha);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            // leaky relu: pre was already activated, recover slope from sign
            // of the stored post-activation value (zero maps to slope 1).
            double raw = pre[static_cast<Eigen::Index>(k)];
            double slope = raw >= 0.0 ? 1.0 : leaky_slope;
            double de = d_pre[static_cast<Eigen::Index>(k)] * slope;
            d_src_score[i] += de;
            d_dst_score[nbrs[k]] += de;
        }
    }

    // src_score = h a_src, dst_score = h a_dst
    grads.a_src += cache.h.transpose() * d_src_score;
    grads.a_dst += cache.h.transpose() * d_dst_score;
    dh += d_src_score * p.a_src.transpose();
    dh += d_dst_score * p.a_dst.transpose();

    grads.w += dh.transpose() * cache.x;
    return dh * p.w;
}

CoAttnParams CoAttnParams::init(int hidden, Rng& rng) {
    CoAttnParams p;
    p.w_co = Matrix(hidden, hidden);
    p.w_int = Matrix(hidden, 3 * hidden);
    p.b_int = Vector::Zero(hidden);
    init_uniform(p.w_co, hidden, rng);
    init_uniform(p.w_int, 3 * hidden, rng);
    init_uniform(p.b_int, 3 * hidden, rng);
    return p;
}

CoAttnParams CoAttnParams::zeros(int hidden) {
    CoAttnParams p;
    p.w_co = Matrix::Zero(hidden, hidden);
    p.w_int = Matrix::Zero(hidden, 3 * hidden);
    p.b_int = Vector::Zero(hidden);
    return p;
}

CoAttnCache co_attention_forward(const CoAttnParams& p, const Matrix& context_feats,
                                 const Matrix& graph_feats) {
    if (context_feats.cols() != graph_feats.cols()) {
        throw NumericError("co-attention: feature dimension mismatch");
    }
    CoAttnCache cache;
    cache.c = context_feats;
    cache.g = graph_feats;
    const Eigen::Index T = cache.c.rows();
    const Eigen::Index M = cache.g.rows();

    cache.affinity = cache.c * p.w_co * cache.g.transpose();  // T x M

    cache.alpha = Matrix(T, M);
    for (Eigen::Index t = 0; t < T; ++t) {
        cache.alpha.row(t) = softmax(cache.affinity.row(t).transpose()).transpose();
    }
    cache.beta = Matrix(T, M);
    for (Eigen::Index m = 0; m < M; ++m) {
        cache.beta.col(m) = softmax(cache.affinity.col(m));
    }

    cache.alpha_mean = cache.alpha.colwise().mean().transpose();  // M
    cache.beta_mean = cache.beta.rowwise().mean();                // T
    cache.gbar = cache.g.transpose() * cache.alpha_mean;          // H
    cache.cbar = cache.c.transpose() * cache.beta_mean;           // H

    const Eigen::Index H = cache.c.cols();
    cache.u = Vector(3 * H);
    cache.u.segment(0, H) = cache.cbar;
    cache.u.segment(H, H) = cache.gbar;
    cache.u.segment(2 * H, H) = (cache.cbar.array() * cache.gbar.array()).matrix();

    cache.s = (p.w_int * cache.u + p.b_int).array().tanh().matrix();
    return cache;
}

CoAttnGradients co_attention_backward(const CoAttnParams& p, const CoAttnCache& cache,
                                      const Vector& d_s, CoAttnParams& grads) {
    const Eigen::Index T = cache.c.rows();
    const Eigen::Index M = cache.g.rows();
    const Eigen::Index H = cache.c.cols();

    Vector d_pre = (d_s.array() * (1.0 - cache.s.array().square())).matrix();
    grads.w_int += d_pre * cache.u.transpose();
    grads.b_int += d_pre;

    Vector du = p.w_int.transpose() * d_pre;  // 3H
    Vector d_cbar = du.segment(0, H) + (du.segment(2 * H, H).array() * cache.gbar.array()).matrix();
    Vector d_gbar = du.segment(H, H) + (du.segment(2 * H, H).array() * cache.cbar.array()).matrix();

    CoAttnGradients out;
    out.d_context = Matrix::Zero(T, H);
    out.d_graph = Matrix::Zero(M, H);

    // gbar = G^T alpha_mean
    Vector d_alpha_mean = cache.g * d_gbar;           // M
    out.d_graph += cache.alpha_mean * d_gbar.transpose();

    // cbar = C^T beta_mean
    Vector d_beta_mean = cache.c * d_cbar;            // T
    out.d_context += cache.beta_mean * d_cbar.transpose();

    // alpha_mean = mean over rows of alpha; beta_mean = mean over cols of beta
    Matrix d_affinity = Matrix::Zero(T, M);
    const double inv_T = 1.0 / static_cast<double>(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        Vector d_alpha_row = d_alpha_mean * inv_T;
        d_affinity.row(t) +=
            softmax_backward(cache.alpha.row(t).transpose(), d_alpha_row).transpose();
    }
    const double inv_M = 1.0 / static_cast<double>(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        Vector d_beta_col = d_beta_mean * inv_M;
        d_affinity.col(m) += softmax_backward(cache.beta.col(m), d_beta_col);
    }

    // affinity = C Wco G^T
    out.d_context += d_affinity * cache.g * p.w_co.transpose();
    grads.w_co += cache.c.transpose() * d_affinity * cache.g;
    out.d_graph += d_affinity.transpose() * cache.c * p.w_co;
    return out;
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_ = Vector::Zero(static_cast<Eigen::Index>(size));
    v_ = Vector::Zero(static_cast<Eigen::Index>(size));
}

void Adam::step(const std::vector<std::tuple<double*, const double*, std::size_t>>& slices) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    Eigen::Index k = 0;
    for (const auto& [params, grad, size] : slices) {
        for (std::size_t i = 0; i < size; ++i, ++k) {
            if (k >= m_.size()) throw NumericError("adam: slice sizes exceed state size");
            double g = grad[i];
            m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g;
            v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g * g;
            double mhat = m_[k] / bc1;
            double vhat = v_[k] / bc2;
            params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

double clip_global_norm(std::vector<std::pair<double*, std::size_t>>& tensors, double max_norm) {
    double sq = 0.0;
    for (auto& [data, size] : tensors) {
        for (std::size_t i = 0; i < size; ++i) sq += data[i] * data[i];
    }
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double scale = max_norm / norm;
        for (auto& [data, size] : tensors) {
            for (std::size_t i = 0; i < size; ++i) data[i] *= scale;
        }
    }
    return norm;
}

}  // namespace tidykg::nn
