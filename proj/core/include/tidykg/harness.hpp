#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tidykg/a2c.hpp"
#include "tidykg/agent.hpp"
#include "tidykg/game.hpp"
#include "tidykg/knowledge.hpp"
#include "tidykg/vocabulary.hpp"

namespace tidykg {

struct KnowledgeScheduleEntry {
    std::string path;
    std::string format;  // conceptnet | vg | jsonl
    std::string tag;     // defaults from format: conceptnet / scenegraph / manual
    int episodes = 0;    // 0 -> use TrainConfig::episodes
};

struct TrainConfig {
    Level level = Level::easy;
    int episodes = 100;  // per schedule entry default
    int runs = 5;
    std::vector<std::uint64_t> seeds;  // empty -> 1..runs
    std::vector<KnowledgeScheduleEntry> knowledge;
    double gamma = 0.9;
    double learning_rate = 1e-3;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    double grad_clip = 5.0;
    int max_steps = 50;
    std::string embeddings_path;
    std::optional<int> embedding_dim;
    int hidden = 64;
    int gat_rounds = 1;
    double leaky_slope = 0.2;
    CdcMode cdc = CdcMode::all_pairs;
    int rollouts_per_update = 4;
    std::string vocab_path;
    double split_fraction = 0.8;
    std::uint64_t split_seed = 7;
    std::string out_dir;

    void validate() const;
    static TrainConfig from_json_file(const std::string& path);
};

// Exact header required of every metrics file.
inline constexpr const char* kMetricsHeader =
    "run,episode,level,knowledge_source,score,steps,loss_policy,loss_value,entropy";

struct TrainResult {
    std::string metrics_path;
    std::string log_path;
    std::vector<std::string> checkpoint_paths;  // one per run seed
};

// Full multi-seed training: fresh parameters per run, one a2c update per
// episode over rollouts_per_update sampled training games, knowledge source
// switched at schedule boundaries with parameters carried across.
TrainResult train(const TrainConfig& config);

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

enum class PolicyKind { nn, random, oracle };

struct EvalPolicy {
    PolicyKind kind = PolicyKind::nn;
    std::string checkpoint_path;  // nn only
    std::uint64_t seed = 1;       // random only
};

struct EvalOptions {
    int episodes_per_game = 1;
    CdcMode cdc = CdcMode::all_pairs;
    std::string kb_path;    // knowledge for nn rollouts; empty -> empty KB
    std::string kb_format = "jsonl";
    std::string transcripts_dir;  // JSONL transcripts when non-empty
};

struct EvalRow {
    std::string level, split, method;
    int runs = 0;
    int games = 0;
    double steps_mean = 0.0, steps_std = 0.0;
    double score_mean = 0.0, score_std = 0.0;
};

// Greedy evaluation over every game under games_dir/<level>/<split>/. Rows
// aggregate per (level, split): mean and population std across policies
// (runs) of the per-run game means.
std::vector<EvalRow> evaluate(const std::vector<EvalPolicy>& policies,
                              const std::string& games_dir, const EvalOptions& options);

// CSV with "mean +/- std" formatted columns (two decimals, Table-style).
std::string eval_csv(const std::vector<EvalRow>& rows);

// Baseline rollouts used by tests and the random/oracle eval paths.
struct BaselineOutcome {
    double score = 0.0;
    int steps = 0;
};
BaselineOutcome rollout_random(const GameSpec& spec, Rng& rng);
BaselineOutcome rollout_oracle(const GameSpec& spec);

}  // namespace tidykg
