#include "tidykg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/generator.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string default_tag(const std::string& format) {
    if (format == "conceptnet") return "conceptnet";
    if (format == "vg") return "scenegraph";
    return "manual";
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

void TrainConfig::validate() const {
    if (episodes < 1) throw UsageError("config: episodes must be >= 1");
    if (runs < 1) throw UsageError("config: runs must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw UsageError("config: gamma must be in [0,1]");
    if (knowledge.empty()) throw UsageError("config: knowledge schedule is empty");
    for (const auto& k : knowledge) {
        if (k.episodes < 0) throw UsageError("config: schedule episode count must be >= 1");
    }
    if (rollouts_per_update < 1) throw UsageError("config: rollouts_per_update must be >= 1");
    if (embeddings_path.empty()) throw UsageError("config: embeddings path missing");
    if (vocab_path.empty()) throw UsageError("config: vocab path missing");
    if (out_dir.empty()) throw UsageError("config: out_dir missing");
    if (gat_rounds < 1) throw UsageError("config: gat_rounds must be >= 1");
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("config is not valid JSON: " + path);

    TrainConfig c;
    try {
        c.level = level_from_string(j.value("level", "easy"));
        c.episodes = j.value("episodes", 100);
        c.runs = j.value("runs", 5);
        if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        for (const auto& k : j.at("knowledge")) {
            KnowledgeScheduleEntry entry;
            entry.path = k.at("path").get<std::string>();
            entry.format = k.at("format").get<std::string>();
            entry.tag = k.value("tag", default_tag(entry.format));
            entry.episodes = k.value("episodes", 0);
            c.knowledge.push_back(std::move(entry));
        }
        c.gamma = j.value("gamma", 0.9);
        c.learning_rate = j.value("learning_rate", 1e-3);
        c.value_coef = j.value("value_coef", 0.5);
        c.entropy_coef = j.value("entropy_coef", 0.01);
        c.grad_clip = j.value("grad_clip", 5.0);
        c.max_steps = j.value("max_steps", 50);
        c.embeddings_path = j.at("embeddings").get<std::string>();
        if (j.contains("embedding_dim")) c.embedding_dim = j["embedding_dim"].get<int>();
        c.hidden = j.value("hidden", 64);
        c.gat_rounds = j.value("gat_rounds", 1);
        c.leaky_slope = j.value("leaky_slope", 0.2);
        c.cdc = cdc_mode_from_string(j.value("cdc", "all_pairs"));
        c.rollouts_per_update = j.value("rollouts_per_update", 4);
        c.vocab_path = j.at("vocab").get<std::string>();
        c.split_fraction = j.value("split_fraction", 0.8);
        c.split_seed = j.value("split_seed", 7ULL);
        c.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(std::string("config ") + path + ": " + e.what());
    }
    c.validate();
    return c;
}

TrainResult train(const TrainConfig& config) {
    config.validate();

    // Everything loads before any training so missing resources fail fast.
    EmbeddingStore store = load_embeddings(config.embeddings_path, config.embedding_dim);
    EntityVocabulary vocab = load_vocabulary(config.vocab_path);
    SplitVocabularies splits = make_splits(vocab, config.split_fraction, config.split_seed);

    struct LoadedEntry {
        KnowledgeBase kb;
        std::string tag;
        int episodes;
    };
    std::vector<LoadedEntry> schedule;
    std::string method;
    for (const auto& entry : config.knowledge) {
        LoadedEntry le{load_knowledge(entry.path, entry.format), entry.tag,
                       entry.episodes > 0 ? entry.episodes : config.episodes};
        le.kb.set_source_tag(entry.tag);
        if (!method.empty()) method += "+";
        method += entry.tag;
        schedule.push_back(std::move(le));
    }
    int total_episodes = 0;
    for (const auto& s : schedule) total_episodes += s.episodes;

    fs::create_directories(config.out_dir);
    TrainResult result;
    result.metrics_path = (fs::path(config.out_dir) / "metrics.csv").string();
    result.log_path = (fs::path(config.out_dir) / "run_log.txt").string();

    std::ofstream metrics(result.metrics_path, std::ios::binary);
    std::ofstream log(result.log_path, std::ios::binary);
    if (!metrics || !log) throw DataError("cannot write outputs under " + config.out_dir);
    metrics << kMetricsHeader << "\n";

    PolicyHyper hyper{store.dimension(), config.hidden, config.gat_rounds, config.leaky_slope};
    UpdateConfig update_config{config.gamma, config.value_coef, config.entropy_coef,
                               config.grad_clip};

    std::vector<std::uint64_t> seeds = config.seeds;
    if (seeds.empty()) {
        for (int r = 1; r <= config.runs; ++r) seeds.push_back(static_cast<std::uint64_t>(r));
    }
    if (static_cast<int>(seeds.size()) != config.runs) {
        throw UsageError("config: seeds list length must equal runs");
    }

    for (std::uint64_t run_seed : seeds) {
        PolicyParameters params = PolicyParameters::init(hyper, run_seed);
        A2cTrainer trainer(params, config.learning_rate);
        log << "run=" << run_seed << " start method=" << method << "\n";

        std::size_t schedule_pos = 0;
        int episodes_into_entry = 0;
        for (int episode = 1; episode <= total_episodes; ++episode) {
            if (episodes_into_entry == schedule[schedule_pos].episodes) {
                std::uint64_t before = params.content_hash();
                ++schedule_pos;
                episodes_into_entry = 0;
                std::uint64_t after = params.content_hash();
                log << "run=" << run_seed << " episode=" << episode
                    << " knowledge_switch from=" << schedule[schedule_pos - 1].tag
                    << " to=" << schedule[schedule_pos].tag
                    << " hash_before=" << hash_hex(before)
                    << " hash_after=" << hash_hex(after) << "\n";
            }
            const LoadedEntry& entry = schedule[schedule_pos];

            std::vector<Trajectory> batch;
            double score_sum = 0.0, steps_sum = 0.0;
            for (int b = 0; b < config.rollouts_per_update; ++b) {
                std::uint64_t game_seed =
                    Rng::derive(run_seed, static_cast<std::uint64_t>(episode),
                                static_cast<std::uint64_t>(b));
                GameSpec spec = generate_game(config.level, splits.train, game_seed, Split::train);
                spec.max_steps = config.max_steps;
                Rng rollout_rng(Rng::derive(game_seed, 0x5011ULL, 1));
                RolloutOptions options;
                options.mode = ActMode::sample;
                options.cdc = config.cdc;
                Trajectory traj = run_episode(params, store, spec, entry.kb, options, rollout_rng);
                score_sum += traj.score;
                steps_sum += traj.steps;
                batch.push_back(std::move(traj));
            }
            UpdateResult update = trainer.update(batch, update_config, store);

            const double inv = 1.0 / config.rollouts_per_update;
            metrics << run_seed << "," << episode << "," << to_string(config.level) << ","
                    << entry.tag << "," << format_double(score_sum * inv, 6) << ","
                    << format_double(steps_sum * inv, 6) << ","
                    << format_double(update.loss.policy, 6) << ","
                    << format_double(update.loss.value, 6) << ","
                    << format_double(update.loss.entropy, 6) << "\n";
            ++episodes_into_entry;
        }

        std::string ck_path =
            (fs::path(config.out_dir) / ("checkpoint_seed" + std::to_string(run_seed) + ".json"))
                .string();
        save_checkpoint(params, store, method, ck_path);
        result.checkpoint_paths.push_back(ck_path);
        log << "run=" << run_seed << " done hash=" << hash_hex(params.content_hash()) << "\n";
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

BaselineOutcome rollout_random(const GameSpec& spec, Rng& rng) {
    auto [state, obs] = reset(spec);
    while (!state.done()) {
        std::vector<Action> actions = state.admissible_actions();
        state.step(actions[rng.index(actions.size())]);
    }
    return {state.normalized_score(), state.t()};
}

BaselineOutcome rollout_oracle(const GameSpec& spec) {
    std::vector<Action> plan = oracle_policy(spec);
    auto [state, obs] = reset(spec);
    for (const Action& a : plan) state.step(a);
    return {state.normalized_score(), state.t()};
}

namespace {

struct GameFile {
    std::string level, split, path;
};

std::vector<GameFile> find_games(const std::string& games_dir) {
    std::vector<GameFile> files;
    if (!fs::is_directory(games_dir)) throw DataError("games directory not found: " + games_dir);
    for (const auto& entry : fs::recursive_directory_iterator(games_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        fs::path rel = fs::relative(entry.path(), games_dir);
        std::vector<std::string> parts;
        for (const auto& p : rel) parts.push_back(p.string());
        if (parts.size() < 3) continue;  // expect <level>/<split>/<seed>.json
        files.push_back({parts[0], parts[1], entry.path().string()});
    }
    std::sort(files.begin(), files.end(),
              [](const GameFile& a, const GameFile& b) { return a.path < b.path; });
    if (files.empty()) throw DataError("no game files under " + games_dir);
    return files;
}

struct RunStats {
    double steps_sum = 0.0, score_sum = 0.0;
    int games = 0;
};

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Population standard deviation (divisor N), as in "average +/- std" tables.
double std_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<EvalRow> evaluate(const std::vector<EvalPolicy>& policies,
                              const std::string& games_dir, const EvalOptions& options) {
    if (policies.empty()) throw UsageError("evaluate: no policies");
    std::vector<GameFile> files = find_games(games_dir);

    KnowledgeBase kb;
    if (!options.kb_path.empty()) {
        kb = load_knowledge(options.kb_path, options.kb_format);
    } else {
        kb.freeze();
    }

    // per (level, split) -> per policy -> stats
    std::map<std::pair<std::string, std::string>, std::vector<RunStats>> table;
    std::string method;

    for (std::size_t p = 0; p < policies.size(); ++p) {
        const EvalPolicy& policy = policies[p];
        Checkpoint ck;
        if (policy.kind == PolicyKind::nn) {
            ck = load_checkpoint(policy.checkpoint_path);
            if (method.empty()) method = ck.knowledge_source;
        } else {
            method = policy.kind == PolicyKind::random ? "random" : "oracle";
        }

        for (const GameFile& file : files) {
            GameSpec spec = load_game(file.path);
            RunStats& stats = [&]() -> RunStats& {
                auto& runs = table[{file.level, file.split}];
                if (runs.size() < policies.size()) runs.resize(policies.size());
                return runs[p];
            }();

            for (int e = 0; e < options.episodes_per_game; ++e) {
                BaselineOutcome outcome;
                if (policy.kind == PolicyKind::nn) {
                    RolloutOptions ro;
                    ro.mode = ActMode::greedy;
                    ro.cdc = options.cdc;
                    if (!options.transcripts_dir.empty()) {
                        fs::create_directories(options.transcripts_dir);
                        ro.transcript_path =
                            (fs::path(options.transcripts_dir) /
                             (file.level + "_" + file.split + "_" +
                              fs::path(file.path).stem().string() + "_run" + std::to_string(p) +
                              ".jsonl"))
                                .string();
                    }
                    Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(e), 0xEA11));
                    Trajectory traj = run_episode(ck.params, ck.store, spec, kb, ro, rng);
                    outcome = {traj.score, traj.steps};
                } else if (policy.kind == PolicyKind::random) {
                    Rng rng(Rng::derive(policy.seed, spec.seed, static_cast<std::uint64_t>(e)));
                    outcome = rollout_random(spec, rng);
                } else {
                    outcome = rollout_oracle(spec);
                }
                stats.steps_sum += outcome.steps;
                stats.score_sum += outcome.score;
                ++stats.games;
            }
        }
    }

    std::vector<EvalRow> rows;
    for (const auto& [key, runs] : table) {
        EvalRow row;
        row.level = key.first;
        row.split = key.second;
        row.method = method;
        std::vector<double> steps_means, score_means;
        int games = 0;
        for (const RunStats& r : runs) {
            if (r.games == 0) continue;
            steps_means.push_back(r.steps_sum / r.games);
            score_means.push_back(r.score_sum / r.games);
            games = r.games;
        }
        row.runs = static_cast<int>(steps_means.size());
        row.games = games;
        row.steps_mean = mean_of(steps_means);
        row.steps_std = std_of(steps_means);
        row.score_mean = mean_of(score_means);
        row.score_std = std_of(score_means);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string eval_csv(const std::vector<EvalRow>& rows) {
    std::string csv = "level,split,method,runs,games,steps,score\n";
    for (const EvalRow& r : rows) {
        csv += r.level + "," + r.split + "," + r.method + "," + std::to_string(r.runs) + "," +
               std::to_string(r.games) + "," + format_double(r.steps_mean, 2) + " ± " +
               format_double(r.steps_std, 2) + "," + format_double(r.score_mean, 2) + " ± " +
               format_double(r.score_std, 2) + "\n";
    }
    return csv;
}

}  // namespace tidykg
