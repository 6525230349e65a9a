#include "tidykg/a2c.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

using ordered_json = nlohmann::ordered_json;

Trajectory run_episode(const PolicyParameters& params, const EmbeddingStore& store,
                       const GameSpec& spec, const KnowledgeBase& kb,
                       const RolloutOptions& options, Rng& rng) {
    auto [state, obs] = reset(spec);

    std::vector<std::string> extract_vocab;
    for (const auto& o : spec.objects) extract_vocab.push_back(o.name);
    for (const auto& l : spec.locations) extract_vocab.push_back(l.name);

    std::ofstream transcript;
    if (!options.transcript_path.empty()) {
        transcript.open(options.transcript_path, std::ios::binary);
        if (!transcript) throw DataError("cannot write transcript: " + options.transcript_path);
    }
    if (!options.subgraph_dump_dir.empty()) {
        std::filesystem::create_directories(options.subgraph_dump_dir);
    }

    Trajectory traj;
    EntitySet entities;
    nn::Vector carry = nn::Vector::Zero(params.hyper.hidden);

    while (!state.done()) {
        StepRecord rec;
        rec.obs_tokens = tokenize(obs.full_text());

        std::set<std::string> extracted = extract_entities(obs.full_text(), extract_vocab);
        entities.update(extracted, [&](const std::string& n) { return tag_from_spec(spec, n); });
        rec.graph = build_subgraph(entities, kb);
        apply_cdc(rec.graph, options.cdc);
        if (!options.subgraph_dump_dir.empty()) {
            std::ofstream dump(std::filesystem::path(options.subgraph_dump_dir) /
                               ("step_" + std::to_string(state.t()) + ".json"));
            dump << rec.graph.to_json();
        }

        TextEncoding enc = encode_text(params, store, rec.obs_tokens, &carry);
        carry = enc.summary;
        nn::Matrix graph_feats = encode_graph(params, store, rec.graph);
        nn::Vector integrated = co_attention(params, enc.features, graph_feats);

        rec.actions = state.admissible_actions();
        ActionChoice choice = act(params, store, integrated, rec.actions, options.mode, rng);
        rec.chosen = static_cast<int>(choice.index);
        rec.log_prob = choice.log_prob;
        rec.value = choice.value;

        StepResult result = state.step(rec.actions[choice.index]);
        rec.reward = result.reward;
        traj.rewards.push_back(result.reward);
        traj.episode_return += result.reward;

        if (transcript.is_open()) {
            ordered_json line;
            line["observation"] = obs.full_text();
            line["action"] = rec.actions[choice.index].text;
            line["reward"] = result.reward;
            line["score"] = state.normalized_score();
            transcript << line.dump() << '\n';
        }

        obs = result.observation;
        traj.record.steps.push_back(std::move(rec));
    }

    traj.steps = state.t();
    traj.score = state.normalized_score();
    return traj;
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
    std::vector<double> returns(rewards.size());
    double acc = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        acc = rewards[i] + gamma * acc;
        returns[i] = acc;
    }
    return returns;
}

A2cTrainer::A2cTrainer(PolicyParameters& params, double learning_rate)
    : params_(params), adam_(params.parameter_count(), learning_rate) {}

UpdateResult A2cTrainer::update(const std::vector<Trajectory>& trajectories,
                                const UpdateConfig& config, const EmbeddingStore& store) {
    if (trajectories.empty()) throw UsageError("a2c update: no trajectories");

    std::vector<EpisodeRecord> episodes;
    std::vector<std::vector<double>> returns, advantages;
    for (const Trajectory& t : trajectories) {
        episodes.push_back(t.record);
        std::vector<double> ret = discounted_returns(t.rewards, config.gamma);
        std::vector<double> adv(ret.size());
        for (std::size_t i = 0; i < ret.size(); ++i) {
            adv[i] = ret[i] - t.record.steps[i].value;  // advantage held constant
        }
        returns.push_back(std::move(ret));
        advantages.push_back(std::move(adv));
    }

    PolicyParameters grads = PolicyParameters::zeros(params_.hyper);
    UpdateResult result;
    result.loss = episode_loss(params_, store, episodes, returns, advantages, config.value_coef,
                               config.entropy_coef, &grads);

    std::vector<std::pair<double*, std::size_t>> flat;
    for (auto& t : grads.tensors()) flat.emplace_back(t.data, t.size);
    result.grad_norm = nn::clip_global_norm(flat, config.grad_clip);
    if (!std::isfinite(result.grad_norm)) {
        throw NumericError("a2c update: non-finite gradient norm");
    }

    auto param_refs = params_.tensors();
    auto grad_refs = grads.tensors();
    std::vector<std::tuple<double*, const double*, std::size_t>> slices;
    for (std::size_t i = 0; i < param_refs.size(); ++i) {
        slices.emplace_back(param_refs[i].data, grad_refs[i].data, param_refs[i].size);
    }
    adam_.step(slices);
    return result;
}

}  // namespace tidykg
