#include "tidykg/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using nn::Matrix;
using nn::Vector;
using ordered_json = nlohmann::ordered_json;

PolicyParameters PolicyParameters::init(const PolicyHyper& hyper, std::uint64_t seed) {
    if (hyper.gat_rounds < 1) throw UsageError("gat_rounds must be >= 1");
    Rng rng(Rng::derive(seed, 0xA6E17ULL));
    PolicyParameters p;
    p.hyper = hyper;
    const int H = hyper.hidden, d = hyper.embedding_dim;
    p.ctx_enc = nn::GruParams::init(H, d, rng);
    p.act_enc = nn::GruParams::init(H, d, rng);
    for (int r = 0; r < hyper.gat_rounds; ++r) {
        p.gat.push_back(nn::GatRound::init(H, r == 0 ? d : H, rng));
    }
    p.sentinel = Vector(H);
    nn::init_uniform(p.sentinel, H, rng);
    p.co = nn::CoAttnParams::init(H, rng);
    p.w_act = Matrix(H, H);
    p.b_act = Vector::Zero(H);
    nn::init_uniform(p.w_act, H, rng);
    nn::init_uniform(p.b_act, H, rng);
    p.w_val = Vector(H);
    nn::init_uniform(p.w_val, H, rng);
    p.b_val = 0.0;
    return p;
}

PolicyParameters PolicyParameters::zeros(const PolicyHyper& hyper) {
    PolicyParameters p;
    p.hyper = hyper;
    const int H = hyper.hidden, d = hyper.embedding_dim;
    p.ctx_enc = nn::GruParams::zeros(H, d);
    p.act_enc = nn::GruParams::zeros(H, d);
    for (int r = 0; r < hyper.gat_rounds; ++r) {
        p.gat.push_back(nn::GatRound::zeros(H, r == 0 ? d : H));
    }
    p.sentinel = Vector::Zero(H);
    p.co = nn::CoAttnParams::zeros(H);
    p.w_act = Matrix::Zero(H, H);
    p.b_act = Vector::Zero(H);
    p.w_val = Vector::Zero(H);
    p.b_val = 0.0;
    return p;
}

namespace {

template <typename Params>
std::vector<TensorRef> collect_tensors(Params& p) {
    std::vector<TensorRef> refs;
    auto add_m = [&](const std::string& name, Matrix& m) {
        refs.push_back({name, const_cast<double*>(m.data()), static_cast<std::size_t>(m.size()),
                        static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    };
    auto add_v = [&](const std::string& name, Vector& v) {
        refs.push_back({name, const_cast<double*>(v.data()), static_cast<std::size_t>(v.size()),
                        static_cast<int>(v.size()), 1});
    };
    auto& q = const_cast<PolicyParameters&>(p);
    add_m("ctx_enc.w_x", q.ctx_enc.w_x);
    add_m("ctx_enc.w_h", q.ctx_enc.w_h);
    add_v("ctx_enc.bias", q.ctx_enc.bias);
    add_m("act_enc.w_x", q.act_enc.w_x);
    add_m("act_enc.w_h", q.act_enc.w_h);
    add_v("act_enc.bias", q.act_enc.bias);
    for (std::size_t r = 0; r < q.gat.size(); ++r) {
        std::string base = "gat." + std::to_string(r) + ".";
        add_m(base + "w", q.gat[r].w);
        add_v(base + "a_src", q.gat[r].a_src);
        add_v(base + "a_dst", q.gat[r].a_dst);
    }
    add_v("sentinel", q.sentinel);
    add_m("co.w_co", q.co.w_co);
    add_m("co.w_int", q.co.w_int);
    add_v("co.b_int", q.co.b_int);
    add_m("w_act", q.w_act);
    add_v("b_act", q.b_act);
    add_v("w_val", q.w_val);
    refs.push_back({"b_val", &q.b_val, 1, 1, 1});
    return refs;
}

}  // namespace

std::vector<TensorRef> PolicyParameters::tensors() { return collect_tensors(*this); }
std::vector<TensorRef> PolicyParameters::tensors() const { return collect_tensors(*this); }

std::size_t PolicyParameters::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += t.size;
    return n;
}

std::uint64_t PolicyParameters::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tensors()) {
        for (std::size_t i = 0; i < t.size; ++i) {
            std::uint64_t bits;
            static_assert(sizeof(double) == sizeof(std::uint64_t));
            std::memcpy(&bits, &t.data[i], sizeof(bits));
            h ^= bits;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

namespace {

Matrix embed_tokens(const EmbeddingStore& store, const std::vector<std::string>& tokens) {
    const int d = store.dimension();
    const Eigen::Index T = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(tokens.size()));
    Matrix out = Matrix::Zero(T, d);  // pad/OOV rows stay zero
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (const Vector* v = store.find(tokens[i])) out.row(static_cast<Eigen::Index>(i)) = *v;
    }
    return out;
}

Matrix node_features(const EmbeddingStore& store, const CommonsenseSubgraph& graph) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(graph.nodes.size()), store.dimension());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = embed_entity(store, graph.nodes[i]).vector;
    }
    return out;
}

std::vector<std::vector<int>> neighbor_lists(const CommonsenseSubgraph& graph) {
    std::vector<std::vector<int>> nbrs(graph.nodes.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) nbrs[i].push_back(static_cast<int>(i));
    for (const auto& e : graph.edges) {
        nbrs[e.src].push_back(static_cast<int>(e.dst));
        nbrs[e.dst].push_back(static_cast<int>(e.src));
    }
    for (auto& list : nbrs) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return nbrs;
}

struct GraphForward {
    Matrix feats;  // (N+1) x H, sentinel last
    std::vector<nn::GatCache> rounds;
};

GraphForward graph_forward(const PolicyParameters& params, const EmbeddingStore& store,
                           const CommonsenseSubgraph& graph) {
    GraphForward gf;
    const int H = params.hyper.hidden;
    const Eigen::Index n = static_cast<Eigen::Index>(graph.nodes.size());
    Matrix x = node_features(store, graph);
    if (n > 0) {
        auto nbrs = neighbor_lists(graph);
        for (const auto& round : params.gat) {
            gf.rounds.push_back(nn::gat_forward(round, x, nbrs, params.hyper.leaky_slope));
            x = gf.rounds.back().out;
        }
    }
    gf.feats = Matrix(n + 1, H);
    if (n > 0) gf.feats.topRows(n) = x;
    gf.feats.row(n) = params.sentinel;
    return gf;
}

// Returns d_sentinel contribution and accumulates GAT grads.
void graph_backward(const PolicyParameters& params, const GraphForward& gf,
                    const Matrix& d_feats, PolicyParameters& grads) {
    const Eigen::Index n = d_feats.rows() - 1;
    grads.sentinel += d_feats.row(n).transpose();
    if (n == 0) return;
    Matrix d = d_feats.topRows(n);
    for (std::size_t r = gf.rounds.size(); r-- > 0;) {
        d = nn::gat_backward(params.gat[r], gf.rounds[r], d, params.hyper.leaky_slope,
                             grads.gat[r]);
    }
    // d now holds gradients w.r.t. the frozen entity embeddings; dropped.
}

struct HeadForward {
    Vector proj;    // w_act s + b_act
    Vector scores;  // K
    Vector probs;   // K
    double value = 0.0;
};

HeadForward head_forward(const PolicyParameters& params, const Vector& s, const Matrix& q) {
    HeadForward hf;
    hf.proj = params.w_act * s + params.b_act;
    hf.scores = q * hf.proj;
    hf.probs = nn::softmax(hf.scores);
    hf.value = params.w_val.dot(s) + params.b_val;
    return hf;
}

}  // namespace

TextEncoding encode_text(const PolicyParameters& params, const EmbeddingStore& store,
                         const std::vector<std::string>& tokens, const Vector* h0) {
    Matrix inputs = embed_tokens(store, tokens);
    Vector start = h0 != nullptr ? *h0 : Vector::Zero(params.hyper.hidden);
    nn::GruSequence seq = nn::gru_forward(params.ctx_enc, inputs, start);
    return {seq.outputs, seq.summary()};
}

Matrix encode_graph(const PolicyParameters& params, const EmbeddingStore& store,
                    const CommonsenseSubgraph& graph) {
    return graph_forward(params, store, graph).feats;
}

Vector co_attention(const PolicyParameters& params, const Matrix& context_feats,
                    const Matrix& graph_feats) {
    return nn::co_attention_forward(params.co, context_feats, graph_feats).s;
}

ActionScores action_scores(const PolicyParameters& params, const EmbeddingStore& store,
                           const Vector& integrated, const std::vector<Action>& actions) {
    if (actions.empty()) throw NumericError("action_scores: empty admissible set");
    const int H = params.hyper.hidden;
    Matrix q(static_cast<Eigen::Index>(actions.size()), H);
    for (std::size_t k = 0; k < actions.size(); ++k) {
        Matrix inputs = embed_tokens(store, tokenize(actions[k].text));
        nn::GruSequence seq = nn::gru_forward(params.act_enc, inputs, Vector::Zero(H));
        q.row(static_cast<Eigen::Index>(k)) = seq.summary();
    }
    HeadForward hf = head_forward(params, integrated, q);
    return {hf.probs, hf.value};
}

ActionChoice act(const PolicyParameters& params, const EmbeddingStore& store,
                 const Vector& integrated, const std::vector<Action>& actions, ActMode mode,
                 Rng& rng) {
    ActionScores scored = action_scores(params, store, integrated, actions);
    std::size_t idx = 0;
    if (mode == ActMode::greedy) {
        double best = scored.probs[0];
        for (Eigen::Index k = 1; k < scored.probs.size(); ++k) {
            if (scored.probs[k] > best) {
                best = scored.probs[k];
                idx = static_cast<std::size_t>(k);
            }
        }
    } else {
        double u = rng.next_double();
        double cum = 0.0;
        idx = static_cast<std::size_t>(scored.probs.size()) - 1;
        for (Eigen::Index k = 0; k < scored.probs.size(); ++k) {
            cum += scored.probs[k];
            if (u < cum) {
                idx = static_cast<std::size_t>(k);
                break;
            }
        }
    }
    return {idx, std::log(scored.probs[static_cast<Eigen::Index>(idx)]), scored.value};
}

// ---------------------------------------------------------------------------
// Episode replay: forward with caches, then analytic backward.
// ---------------------------------------------------------------------------

namespace {

struct StepTape {
    nn::GruSequence ctx;
    GraphForward graph;
    nn::CoAttnCache coattn;
    std::vector<int> action_ids;
    HeadForward head;
};

struct ActionTable {
    std::vector<std::string> texts;
    std::vector<nn::GruSequence> seqs;
    std::map<std::string, int> index;

    int intern(const PolicyParameters& params, const EmbeddingStore& store,
               const std::string& text) {
        auto it = index.find(text);
        if (it != index.end()) return it->second;
        Matrix inputs = embed_tokens(store, tokenize(text));
        seqs.push_back(nn::gru_forward(params.act_enc, inputs,
                                       Vector::Zero(params.hyper.hidden)));
        texts.push_back(text);
        int id = static_cast<int>(texts.size()) - 1;
        index[text] = id;
        return id;
    }
};

double entropy_of(const Vector& probs) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) h -= probs[i] * std::log(probs[i]);
    }
    return h;
}

}  // namespace

LossTerms episode_loss(const PolicyParameters& params, const EmbeddingStore& store,
                       const std::vector<EpisodeRecord>& episodes,
                       const std::vector<std::vector<double>>& returns,
                       const std::vector<std::vector<double>>& advantages, double value_coef,
                       double entropy_coef, PolicyParameters* grads) {
    if (episodes.empty()) throw UsageError("episode_loss: no episodes");
    const int H = params.hyper.hidden;
    const double inv_b = 1.0 / static_cast<double>(episodes.size());

    LossTerms terms;
    double entropy_sum = 0.0;
    std::size_t total_steps = 0;

    ActionTable table;
    std::vector<Vector> d_action_summary;  // aligned with table, lazily sized

    for (std::size_t e = 0; e < episodes.size(); ++e) {
        const EpisodeRecord& ep = episodes[e];
        if (ep.steps.empty()) continue;
        std::vector<StepTape> tapes;
        tapes.reserve(ep.steps.size());

        // Forward.
        Vector carry = Vector::Zero(H);
        for (const StepRecord& step : ep.steps) {
            StepTape tape;
            Matrix inputs = embed_tokens(store, step.obs_tokens);
            tape.ctx = nn::gru_forward(params.ctx_enc, inputs, carry);
            carry = tape.ctx.summary();

            tape.graph = graph_forward(params, store, step.graph);
            tape.coattn = nn::co_attention_forward(params.co, tape.ctx.outputs, tape.graph.feats);

            Matrix q(static_cast<Eigen::Index>(step.actions.size()), H);
            for (std::size_t k = 0; k < step.actions.size(); ++k) {
                int id = table.intern(params, store, step.actions[k].text);
                tape.action_ids.push_back(id);
                q.row(static_cast<Eigen::Index>(k)) = table.seqs[static_cast<std::size_t>(id)].summary();
            }
            tape.head = head_forward(params, tape.coattn.s, q);
            tapes.push_back(std::move(tape));
        }

        // Loss and per-step upstream gradients.
        std::vector<Vector> d_scores(tapes.size());
        std::vector<double> d_value(tapes.size());
        for (std::size_t t = 0; t < tapes.size(); ++t) {
            const StepRecord& step = ep.steps[t];
            const Vector& probs = tapes[t].head.probs;
            const double v = tapes[t].head.value;
            const double adv = advantages[e][t];
            const double ret = returns[e][t];
            const double h = entropy_of(probs);
            const double log_p = std::log(probs[step.chosen]);

            terms.policy += inv_b * (-adv * log_p);
            terms.value += inv_b * value_coef * (ret - v) * (ret - v);
            entropy_sum += h;
            terms.total += inv_b * (-adv * log_p + value_coef * (ret - v) * (ret - v) -
                                    entropy_coef * h);
            ++total_steps;

            if (grads != nullptr) {
                Vector dz = probs * adv;
                dz[step.chosen] -= adv;
                // entropy term: d(-c_e H)/dz = c_e * p .* (log p + H)
                for (Eigen::Index k = 0; k < probs.size(); ++k) {
                    double lp = probs[k] > 0.0 ? std::log(probs[k]) : 0.0;
                    dz[k] += entropy_coef * probs[k] * (lp + h);
                }
                d_scores[t] = dz * inv_b;
                d_value[t] = inv_b * value_coef * 2.0 * (v - ret);
            }
        }

        if (grads == nullptr) continue;

        // Backward, steps reversed; hidden-state gradient carried across.
        Vector d_carry = Vector::Zero(H);
        for (std::size_t t = tapes.size(); t-- > 0;) {
            const StepTape& tape = tapes[t];
            const StepRecord& step = ep.steps[t];

            // Heads.
            Vector d_proj = Vector::Zero(H);
            Vector d_s = Vector::Zero(H);
            for (std::size_t k = 0; k < step.actions.size(); ++k) {
                const double dzk = d_scores[t][static_cast<Eigen::Index>(k)];
                const Vector& qk =
                    table.seqs[static_cast<std::size_t>(tape.action_ids[k])].summary();
                d_proj += dzk * qk;
                if (d_action_summary.size() < table.seqs.size())
                    d_action_summary.resize(table.seqs.size(), Vector::Zero(H));
                d_action_summary[static_cast<std::size_t>(tape.action_ids[k])] +=
                    dzk * tape.head.proj;
            }
            grads->w_act += d_proj * tape.coattn.s.transpose();
            grads->b_act += d_proj;
            d_s += params.w_act.transpose() * d_proj;
            d_s += d_value[t] * params.w_val;
            grads->w_val += d_value[t] * tape.coattn.s;
            grads->b_val += d_value[t];

            // Co-attention.
            nn::CoAttnGradients co_grads =
                nn::co_attention_backward(params.co, tape.coattn, d_s, grads->co);

            // Graph side.
            graph_backward(params, tape.graph, co_grads.d_graph, *grads);

            // Context GRU with the carried hidden gradient on the last row.
            Matrix d_outputs = co_grads.d_context;
            d_outputs.row(d_outputs.rows() - 1) += d_carry.transpose();
            d_carry = nn::gru_backward(params.ctx_enc, tape.ctx, d_outputs, grads->ctx_enc);
        }
    }

    if (grads != nullptr) {
        // Action encoder: one backward per unique action with the accumulated
        // summary gradient on the final row.
        for (std::size_t a = 0; a < table.seqs.size(); ++a) {
            if (a >= d_action_summary.size()) break;
            if (d_action_summary[a].size() == 0 || d_action_summary[a].isZero(0.0)) continue;
            Matrix d_outputs = Matrix::Zero(table.seqs[a].outputs.rows(), H);
            d_outputs.row(d_outputs.rows() - 1) = d_action_summary[a].transpose();
            nn::gru_backward(params.act_enc, table.seqs[a], d_outputs, grads->act_enc);
        }
    }

    terms.entropy = total_steps > 0 ? entropy_sum / static_cast<double>(total_steps) : 0.0;
    if (!std::isfinite(terms.total)) {
        throw NumericError("episode_loss: non-finite loss (policy=" +
                           std::to_string(terms.policy) + ", value=" +
                           std::to_string(terms.value) + ")");
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Checkpoint IO.
// ---------------------------------------------------------------------------

void save_checkpoint(const PolicyParameters& params, const EmbeddingStore& store,
                     const std::string& knowledge_source, const std::string& path) {
    ordered_json j;
    j["format_version"] = 1;
    j["knowledge_source"] = knowledge_source;
    j["hyper"] = {{"embedding_dim", params.hyper.embedding_dim},
                  {"hidden", params.hyper.hidden},
                  {"gat_rounds", params.hyper.gat_rounds},
                  {"leaky_slope", params.hyper.leaky_slope}};
    j["tensors"] = ordered_json::object();
    for (const auto& t : params.tensors()) {
        ordered_json jt;
        jt["rows"] = t.rows;
        jt["cols"] = t.cols;
        jt["data"] = std::vector<double>(t.data, t.data + t.size);
        j["tensors"][t.name] = std::move(jt);
    }
    ordered_json emb;
    emb["dimension"] = store.dimension();
    emb["table"] = ordered_json::object();
    std::vector<std::string> tokens;
    tokens.reserve(store.table().size());
    for (const auto& [tok, _] : store.table()) tokens.push_back(tok);
    std::sort(tokens.begin(), tokens.end());
    for (const auto& tok : tokens) {
        const Vector& v = *store.find(tok);
        emb["table"][tok] = std::vector<double>(v.data(), v.data() + v.size());
    }
    j["embeddings"] = std::move(emb);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("checkpoint is not valid JSON: " + path);

    Checkpoint ck;
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw DataError("unsupported checkpoint format version");
        }
        ck.knowledge_source = j.at("knowledge_source").get<std::string>();
        PolicyHyper hyper;
        hyper.embedding_dim = j.at("hyper").at("embedding_dim").get<int>();
        hyper.hidden = j.at("hyper").at("hidden").get<int>();
        hyper.gat_rounds = j.at("hyper").at("gat_rounds").get<int>();
        hyper.leaky_slope = j.at("hyper").at("leaky_slope").get<double>();
        ck.params = PolicyParameters::zeros(hyper);
        for (auto& t : ck.params.tensors()) {
            const auto& jt = j.at("tensors").at(t.name);
            if (jt.at("rows").get<int>() != t.rows || jt.at("cols").get<int>() != t.cols) {
                throw DataError("checkpoint tensor shape mismatch for " + t.name);
            }
            const auto data = jt.at("data").get<std::vector<double>>();
            if (data.size() != t.size) throw DataError("checkpoint tensor size mismatch for " + t.name);
            std::copy(data.begin(), data.end(), t.data);
        }
        const auto& emb = j.at("embeddings");
        EmbeddingStore store(emb.at("dimension").get<int>());
        for (const auto& [tok, vec] : emb.at("table").items()) {
            auto data = vec.get<std::vector<double>>();
            store.insert(tok, Eigen::Map<Vector>(data.data(),
                                                 static_cast<Eigen::Index>(data.size())));
        }
        ck.store = std::move(store);
    } catch (const ordered_json::exception& e) {
        throw DataError(std::string("checkpoint ") + path + ": " + e.what());
    }
    return ck;
}

}  // namespace tidykg
