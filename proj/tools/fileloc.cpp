// fileloc - mine issue->commit links from git history, build file
// localisation datasets, rank snapshot files against issue text and analyse
// the results.
//
// Subcommands: mine, build, evaluate, rank, analyze, report.
// Exit codes: 0 success, 2 configuration error, 3 data/repo error,
// 4 internal error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "fileloc/config.hpp"
#include "fileloc/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config_file;
    std::string repo;
    std::string head;
    std::string prefix;
    std::string issues;
    std::string out_dir;
    std::string model;
    std::string eval_split;
    std::string markup_mode;
    double split_ratio = -1;
    long jobs = -1;
    long top_k = -1;
    long lsi_dims = -1;
};

fileloc::RunConfig resolve_config(const CliOverrides& o) {
    fileloc::RunConfig config;
    if (!o.config_file.empty()) config = fileloc::load_config(o.config_file);
    if (!o.repo.empty()) config.repo_path = o.repo;
    if (!o.head.empty()) config.head_ref = o.head;
    if (!o.prefix.empty()) config.project_prefix = o.prefix;
    if (!o.issues.empty()) config.issues_path = o.issues;
    if (!o.out_dir.empty()) config.output_dir = o.out_dir;
    if (!o.model.empty())
        config.model.model = fileloc::detail::parse_model_name(o.model, &config.all_models);
    if (!o.eval_split.empty()) {
        if (o.eval_split == "validation")
            config.eval_split = fileloc::EvalSplit::validation;
        else if (o.eval_split == "test")
            config.eval_split = fileloc::EvalSplit::test;
        else if (o.eval_split == "all")
            config.eval_split = fileloc::EvalSplit::all;
        else
            throw fileloc::ConfigError("unknown eval split '" + o.eval_split + "'");
    }
    if (!o.markup_mode.empty())
        config.preprocess.markup_mode = fileloc::detail::parse_markup_mode(o.markup_mode);
    if (o.split_ratio >= 0) config.split_ratio = o.split_ratio;
    if (o.jobs > 0) config.parallelism = static_cast<unsigned>(o.jobs);
    if (o.top_k > 0) config.top_k = static_cast<std::size_t>(o.top_k);
    if (o.lsi_dims > 0) config.model.lsi_dims = static_cast<std::size_t>(o.lsi_dims);
    return config;
}

void add_common_options(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("-c,--config", o.config_file, "JSON configuration file");
    cmd->add_option("--repo", o.repo, "path to the git repository");
    cmd->add_option("--head", o.head, "branch or ref to mine (default HEAD)");
    cmd->add_option("--prefix", o.prefix, "issue key prefix, e.g. AVRO");
    cmd->add_option("--issues", o.issues, "issue corpus JSONL");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--model", o.model, "vsm | lsi | rvsm | bm25 | all");
    cmd->add_option("--split", o.eval_split, "validation | test | all");
    cmd->add_option("--split-ratio", o.split_ratio, "validation share of the temporal split");
    cmd->add_option("--markup", o.markup_mode,
                    "keep_raw | strip_formatting | strip_blocks | blocks_to_marker");
    cmd->add_option("-j,--jobs", o.jobs, "parallel workers");
    cmd->add_option("-k,--top-k", o.top_k, "entries to print for rank");
    cmd->add_option("--lsi-dims", o.lsi_dims, "LSI dimensions");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"issue file localisation toolkit"};
    app.require_subcommand(1);

    CliOverrides overrides;
    std::string rank_commit;
    std::string rank_issue_file;

    CLI::App* mine = app.add_subcommand("mine", "mine and refine issue->commit links");
    CLI::App* build = app.add_subcommand("build", "build the labelled dataset from links");
    CLI::App* evaluate = app.add_subcommand("evaluate", "rank and score the dataset");
    CLI::App* rank = app.add_subcommand("rank", "rank one snapshot against ad-hoc issue text");
    CLI::App* analyze = app.add_subcommand("analyze", "statistical analysis of metrics");
    CLI::App* report = app.add_subcommand("report", "human-readable summary of artifacts");
    for (CLI::App* cmd : {mine, build, evaluate, rank, analyze, report})
        add_common_options(cmd, overrides);
    rank->add_option("commit", rank_commit, "commit whose tree to rank")->required();
    rank->add_option("issue_text", rank_issue_file, "file with the issue text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fileloc::RunConfig config = resolve_config(overrides);
        if (mine->parsed()) {
            auto artifacts = fileloc::cmd_mine(config);
            const auto& r = artifacts.outcome.report;
            std::cout << "links: " << r.linked << " kept (max linkable " << r.max_linkable
                      << ", path " << r.discarded_path << ", merge " << r.discarded_merge
                      << ", entry " << r.discarded_entry << ", unknown " << r.unknown_issues
                      << ")\nwrote " << artifacts.links_path.string() << '\n';
        } else if (build->parsed()) {
            auto artifacts = fileloc::cmd_build(config);
            std::cout << "dataset: " << artifacts.samples.size() << " samples\nwrote "
                      << artifacts.dataset_path.string() << '\n';
        } else if (evaluate->parsed()) {
            auto artifacts = fileloc::cmd_evaluate(config);
            std::cout << "evaluated " << artifacts.rows.size() << " (issue, model) pairs\nwrote "
                      << artifacts.metrics_path.string() << '\n';
        } else if (rank->parsed()) {
            fileloc::cmd_rank(config, rank_commit, rank_issue_file, std::cout);
        } else if (analyze->parsed()) {
            auto artifacts = fileloc::cmd_analyze(config);
            std::cout << "wrote analysis to " << artifacts.directory.string() << '\n';
        } else if (report->parsed()) {
            auto path = fileloc::cmd_report(config);
            std::ifstream in(path);
            std::cout << in.rdbuf();
            std::cout << "wrote " << path.string() << '\n';
        }
    } catch (const fileloc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case fileloc::ErrorKind::config: return 2;
            case fileloc::ErrorKind::data: return 3;
            case fileloc::ErrorKind::internal: return 4;
        }
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
