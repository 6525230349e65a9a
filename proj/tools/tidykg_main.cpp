// tidykg: knowledge acquisition, cleanup-game generation, and agent
// training/evaluation in one CLI.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tidykg/errors.hpp"
#include "tidykg/generator.hpp"
#include "tidykg/harness.hpp"
#include "tidykg/knowledge.hpp"
#include "tidykg/plot.hpp"
#include "tidykg/similarity.hpp"

namespace {

using namespace tidykg;

void write_file(const std::string& path, const std::string& content) {
    if (!path.empty()) {
        std::filesystem::path p(path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path);
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"commonsense knowledge graphs for text-based cleanup games"};
    app.require_subcommand(1);

    // ---- analyze ----
    CLI::App* analyze = app.add_subcommand("analyze", "knowledge statistics and comparisons");
    analyze->require_subcommand(1);

    CLI::App* stats_cmd = analyze->add_subcommand("stats", "entity/relation/triplet counts");
    std::string stats_kb, stats_format = "jsonl", stats_out;
    stats_cmd->add_option("--kb", stats_kb, "knowledge file")->required();
    stats_cmd->add_option("--format", stats_format, "conceptnet|vg|jsonl")
        ->check(CLI::IsMember({"conceptnet", "vg", "jsonl"}));
    stats_cmd->add_option("--out", stats_out, "output CSV")->required();
    std::string stats_jsonl_out;
    stats_cmd->add_option("--jsonl-out", stats_jsonl_out,
                          "also save the normalized triplets as JSONL");
    int stats_top = 0;
    stats_cmd->add_option("--top-relations", stats_top,
                          "print the top-K relation histogram to stdout");

    CLI::App* compare_cmd =
        analyze->add_subcommand("compare", "similarity counts against a manual reference");
    std::vector<std::string> cmp_candidates, cmp_formats;
    std::string cmp_manual, cmp_embeddings, cmp_out, cmp_pair_unit = "pair";
    double cmp_entity_threshold = 0.7, cmp_pair_threshold = 0.65;
    int cmp_threads = 1;
    compare_cmd->add_option("--candidate", cmp_candidates, "candidate knowledge file")
        ->required();
    compare_cmd->add_option("--candidate-format", cmp_formats, "format per candidate")
        ->required();
    compare_cmd->add_option("--manual", cmp_manual, "manual reference (JSONL)")->required();
    compare_cmd->add_option("--embeddings", cmp_embeddings, "embedding text file")->required();
    compare_cmd->add_option("--entity-threshold", cmp_entity_threshold, "default 0.7");
    compare_cmd->add_option("--pair-threshold", cmp_pair_threshold, "default 0.65");
    compare_cmd->add_option("--pair-unit", cmp_pair_unit, "pair|triplet")
        ->check(CLI::IsMember({"pair", "triplet"}));
    compare_cmd->add_option("--threads", cmp_threads, "pair-count worker threads");
    compare_cmd->add_option("--out", cmp_out, "output CSV")->required();

    // ---- games ----
    CLI::App* games = app.add_subcommand("games", "cleanup game management");
    games->require_subcommand(1);
    CLI::App* generate_cmd = games->add_subcommand("generate", "generate seeded games");
    std::string gen_level = "easy", gen_split = "train", gen_vocab, gen_out;
    int gen_count = 1;
    std::uint64_t gen_seed = 1, gen_split_seed = 7;
    double gen_fraction = 0.8;
    generate_cmd->add_option("--level", gen_level, "easy|medium|hard")
        ->check(CLI::IsMember({"easy", "medium", "hard"}));
    generate_cmd->add_option("--split", gen_split, "train|in|out")
        ->check(CLI::IsMember({"train", "in", "out"}));
    generate_cmd->add_option("--count", gen_count, "number of games")->required();
    generate_cmd->add_option("--seed", gen_seed, "first seed")->required();
    generate_cmd->add_option("--vocab", gen_vocab, "vocabulary JSON")->required();
    generate_cmd->add_option("--out", gen_out, "output directory")->required();
    generate_cmd->add_option("--split-fraction", gen_fraction, "train fraction (default 0.8)");
    generate_cmd->add_option("--split-seed", gen_split_seed, "split shuffle seed (default 7)");

    // ---- train ----
    CLI::App* train_cmd = app.add_subcommand("train", "A2C training from a JSON config");
    std::string train_config;
    train_cmd->add_option("--config", train_config, "TrainConfig JSON")->required();

    // ---- eval ----
    CLI::App* eval_cmd = app.add_subcommand("eval", "greedy evaluation on generated games");
    std::vector<std::string> eval_checkpoints;
    std::string eval_games, eval_out, eval_policy = "nn", eval_kb, eval_kb_format = "jsonl";
    std::string eval_transcripts, eval_cdc = "all_pairs";
    int eval_episodes = 1, eval_runs = 1;
    eval_cmd->add_option("--checkpoint", eval_checkpoints, "checkpoint path (repeatable)");
    eval_cmd->add_option("--games", eval_games, "games directory")->required();
    eval_cmd->add_option("--out", eval_out, "output CSV")->required();
    eval_cmd->add_option("--policy", eval_policy, "nn|random|oracle")
        ->check(CLI::IsMember({"nn", "random", "oracle"}));
    eval_cmd->add_option("--kb", eval_kb, "knowledge file for nn rollouts");
    eval_cmd->add_option("--kb-format", eval_kb_format, "conceptnet|vg|jsonl");
    eval_cmd->add_option("--episodes", eval_episodes, "episodes per game (default 1)");
    eval_cmd->add_option("--runs", eval_runs, "seeded runs for the random policy");
    eval_cmd->add_option("--cdc", eval_cdc, "all_pairs|kb_supported");
    eval_cmd->add_option("--transcripts", eval_transcripts, "write JSONL transcripts here");

    // ---- plot ----
    CLI::App* plot_cmd = app.add_subcommand("plot", "training-curve SVGs from a metrics CSV");
    std::string plot_metrics, plot_out;
    double plot_alpha = 0.1;
    plot_cmd->add_option("--metrics", plot_metrics, "metrics CSV")->required();
    plot_cmd->add_option("--alpha", plot_alpha, "EMA smoothing (default 0.1)");
    plot_cmd->add_option("--out", plot_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (stats_cmd->parsed()) {
        SkipReport report;
        KnowledgeBase kb = load_knowledge(stats_kb, stats_format, &report);
        write_file(stats_out, stats_csv(kb));
        if (!stats_jsonl_out.empty()) save_jsonl(kb, stats_jsonl_out);
        if (report.malformed + report.non_english > 0) {
            std::cerr << "skipped rows: " << report.malformed << " malformed, "
                      << report.non_english << " non-english\n";
        }
        if (stats_top > 0) {
            for (const auto& [rel, count] : kb.relation_histogram(stats_top)) {
                std::cout << rel << "," << count << "\n";
            }
        }
    } else if (compare_cmd->parsed()) {
        if (cmp_formats.size() == 1 && cmp_candidates.size() > 1) {
            cmp_formats.assign(cmp_candidates.size(), cmp_formats[0]);
        }
        if (cmp_formats.size() != cmp_candidates.size()) {
            throw UsageError("--candidate-format count must match --candidate count");
        }
        std::vector<KnowledgeBase> kbs;
        for (std::size_t i = 0; i < cmp_candidates.size(); ++i) {
            kbs.push_back(load_knowledge(cmp_candidates[i], cmp_formats[i]));
        }
        std::vector<const KnowledgeBase*> refs;
        for (const auto& kb : kbs) refs.push_back(&kb);
        KnowledgeBase manual = load_jsonl(cmp_manual);
        EmbeddingStore store = load_embeddings(cmp_embeddings);
        PairUnit unit = cmp_pair_unit == "pair" ? PairUnit::pair : PairUnit::triplet;
        auto reports = compare_report(refs, manual, store, cmp_entity_threshold,
                                      cmp_pair_threshold, unit, cmp_threads);
        write_file(cmp_out, compare_csv(reports));
        for (const auto& r : reports) {
            if (!r.unresolved_entities.empty()) {
                std::cerr << r.source << ": " << r.unresolved_entities.size()
                          << " entities had no embedding and were excluded\n";
            }
        }
    } else if (generate_cmd->parsed()) {
        EntityVocabulary vocab = load_vocabulary(gen_vocab);
        SplitVocabularies splits = make_splits(vocab, gen_fraction, gen_split_seed);
        Split split = split_from_string(gen_split);
        const EntityVocabulary& pool = split == Split::out_test ? splits.out_test : splits.train;
        auto paths = generate_games_to_dir(level_from_string(gen_level), pool, gen_seed,
                                           gen_count, split, gen_out);
        std::cout << "generated " << paths.size() << " games under " << gen_out << "\n";
    } else if (train_cmd->parsed()) {
        TrainConfig config = TrainConfig::from_json_file(train_config);
        TrainResult result = train(config);
        std::cout << "metrics: " << result.metrics_path << "\n";
        for (const auto& ck : result.checkpoint_paths) std::cout << "checkpoint: " << ck << "\n";
    } else if (eval_cmd->parsed()) {
        std::vector<EvalPolicy> policies;
        if (eval_policy == "nn") {
            if (eval_checkpoints.empty()) {
                throw UsageError("eval --policy nn requires --checkpoint");
            }
            for (const auto& ck : eval_checkpoints) {
                policies.push_back({PolicyKind::nn, ck, 0});
            }
        } else if (eval_policy == "random") {
            for (int r = 1; r <= eval_runs; ++r) {
                policies.push_back({PolicyKind::random, "", static_cast<std::uint64_t>(r)});
            }
        } else {
            policies.push_back({PolicyKind::oracle, "", 0});
        }
        EvalOptions options;
        options.episodes_per_game = eval_episodes;
        options.cdc = cdc_mode_from_string(eval_cdc);
        options.kb_path = eval_kb;
        options.kb_format = eval_kb_format;
        options.transcripts_dir = eval_transcripts;
        auto rows = evaluate(policies, eval_games, options);
        write_file(eval_out, eval_csv(rows));
        std::cout << eval_csv(rows);
    } else if (plot_cmd->parsed()) {
        auto files = plot_curves(plot_metrics, plot_alpha, plot_out);
        for (const auto& f : files) std::cout << "wrote " << f << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tidykg::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const tidykg::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const tidykg::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
