// Command-line front end: mine -> classify -> metrics -> entropy -> assemble
// -> split -> train -> evaluate -> explain -> repr -> stats, or `run` for the
// whole pipeline with stage caching.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "resfault/csv.hpp"
#include "resfault/errors.hpp"
#include "resfault/evalstats.hpp"
#include "resfault/pipeline.hpp"
#include "resfault/strutil.hpp"
#include "resfault/version.hpp"

namespace {

using resfault::PipelineConfig;

PipelineConfig make_config(const std::string& config_path, long long seed_override,
                           const std::string& out_override,
                           const std::vector<std::string>& repos) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = resfault::load_pipeline_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!repos.empty()) cfg.repos = repos;
    return cfg;
}

int run_mcnemar(const PipelineConfig& cfg, const std::string& preds_a,
                const std::string& preds_b) {
    auto load = [](const std::string& path) {
        resfault::CsvTable t = resfault::read_csv(path);
        int c_pred = t.column("pred");
        int c_label = t.column("label");
        if (c_pred < 0 || c_label < 0)
            throw resfault::InputError(path + ": needs pred and label columns");
        std::pair<std::vector<int>, std::vector<int>> out;
        for (const auto& row : t.rows) {
            out.first.push_back(std::atoi(row[static_cast<size_t>(c_pred)].c_str()));
            out.second.push_back(std::atoi(row[static_cast<size_t>(c_label)].c_str()));
        }
        return out;
    };
    auto [pa, la] = load(preds_a);
    auto [pb, lb] = load(preds_b);
    if (la != lb) throw resfault::InputError("mcnemar: label columns differ between files");
    resfault::McNemarResult r = resfault::mcnemar(pa, pb, la);
    std::printf("b=%lld c=%lld method=%s p=%.6g\n", static_cast<long long>(r.b),
                static_cast<long long>(r.c), r.method.c_str(), r.p_value);
    (void)cfg;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"residual fault prediction toolkit for Python repositories"};
    app.set_version_flag("--version", resfault::kToolVersion);

    std::string config_path;
    long long seed_override = -1;
    std::string out_override;
    std::vector<std::string> repos;
    app.add_option("--config", config_path, "pipeline config file (JSON)");
    app.add_option("--seed", seed_override, "seed override");
    app.add_option("--out", out_override, "output directory override");

    auto* mine = app.add_subcommand("mine", "scan repositories for bug-fix commits");
    mine->add_option("repos", repos, "repository paths");
    auto* classify = app.add_subcommand("classify", "label commits pre/post-release");
    auto* metrics = app.add_subcommand("metrics", "extract product and process metrics");
    auto* entropy = app.add_subcommand("entropy", "train the n-gram model and emit ENT");
    auto* assemble = app.add_subcommand("assemble", "join labels and metrics into a dataset");
    auto* split = app.add_subcommand("split", "commit-grouped train/test split");
    auto* train = app.add_subcommand("train", "train forest, gbt, iforest and lof models");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate models with bootstrap CIs");
    auto* mcnemar_cmd = app.add_subcommand("mcnemar", "paired test on two prediction files");
    std::string preds_a, preds_b;
    mcnemar_cmd->add_option("preds_a", preds_a, "first predictions csv")->required();
    mcnemar_cmd->add_option("preds_b", preds_b, "second predictions csv")->required();
    auto* explain = app.add_subcommand("explain", "feature importances and Shapley summary");
    auto* repr = app.add_subcommand("repr", "metric/embedding representation analysis");
    auto* stats = app.add_subcommand("stats", "dataset statement/token statistics");
    auto* run = app.add_subcommand("run", "run every stage with content-hash caching");
    run->add_option("repos", repos, "repository paths");

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = make_config(config_path, seed_override, out_override, repos);
        if (mine->parsed()) resfault::stage_mine(cfg);
        else if (classify->parsed()) resfault::stage_classify(cfg);
        else if (metrics->parsed()) resfault::stage_metrics(cfg);
        else if (entropy->parsed()) resfault::stage_entropy(cfg);
        else if (assemble->parsed()) resfault::stage_assemble(cfg);
        else if (split->parsed()) resfault::stage_split(cfg);
        else if (train->parsed()) resfault::stage_train(cfg);
        else if (evaluate->parsed()) resfault::stage_evaluate(cfg);
        else if (mcnemar_cmd->parsed()) return run_mcnemar(cfg, preds_a, preds_b);
        else if (explain->parsed()) resfault::stage_explain(cfg);
        else if (repr->parsed()) resfault::stage_repr(cfg);
        else if (stats->parsed()) resfault::stage_stats(cfg);
        else if (run->parsed()) resfault::run_pipeline(cfg);
    } catch (const resfault::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
