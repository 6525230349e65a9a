#pragma once

#include <string>
#include <vector>

#include "tidykg/agent.hpp"
#include "tidykg/game.hpp"
#include "tidykg/knowledge.hpp"

namespace tidykg {

// One episode's transitions plus summary metrics.
struct Trajectory {
    EpisodeRecord record;
    std::vector<double> rewards;
    double episode_return = 0.0;
    double score = 0.0;
    int steps = 0;
};

struct RolloutOptions {
    ActMode mode = ActMode::sample;
    CdcMode cdc = CdcMode::all_pairs;
    std::string transcript_path;    // JSONL transcript when non-empty
    std::string subgraph_dump_dir;  // per-step subgraph JSON when non-empty
};

// Plays one episode: extract entities -> update E_t -> build subgraph + CDC
// -> encode -> co-attend -> act -> env.step, until done.
Trajectory run_episode(const PolicyParameters& params, const EmbeddingStore& store,
                       const GameSpec& spec, const KnowledgeBase& kb,
                       const RolloutOptions& options, Rng& rng);

// R_t = sum_k gamma^k r_{t+k}.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

struct UpdateConfig {
    double gamma = 0.9;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    double grad_clip = 5.0;
};

struct UpdateResult {
    LossTerms loss;
    double grad_norm = 0.0;  // pre-clip global norm
};

// Owns the optimizer state for one set of parameters. One update() per
// completed episode batch: Monte-Carlo returns, advantage = R - V, a single
// clipped Adam step.
class A2cTrainer {
public:
    A2cTrainer(PolicyParameters& params, double learning_rate);

    UpdateResult update(const std::vector<Trajectory>& trajectories, const UpdateConfig& config,
                        const EmbeddingStore& store);

private:
    PolicyParameters& params_;
    nn::Adam adam_;
};

}  // namespace tidykg
