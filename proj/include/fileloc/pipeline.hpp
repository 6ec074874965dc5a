#pragma once

// End-to-end pipeline stages behind the CLI subcommands.  Every stage is a
// deterministic function of (config, input files, repo state); artifacts
// are JSONL/CSV files under the configured output directory.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fileloc/config.hpp"
#include "fileloc/dataset.hpp"
#include "fileloc/link_mining.hpp"
#include "fileloc/metrics.hpp"
#include "fileloc/retrieval.hpp"
#include "fileloc/stats.hpp"

namespace fileloc {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    threads.reserve(n);
    for (unsigned i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

struct SummaryStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0;
    double median = 0;
};

inline SummaryStats summarize(std::vector<std::size_t> values) {
    SummaryStats s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    double total = 0;
    for (auto v : values) total += static_cast<double>(v);
    s.mean = total / static_cast<double>(values.size());
    std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? static_cast<double>(values[mid])
                                 : (static_cast<double>(values[mid - 1]) +
                                    static_cast<double>(values[mid])) /
                                       2.0;
    return s;
}

inline nlohmann::json summary_json(const SummaryStats& s) {
    return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"median", s.median}};
}

}  // namespace detail

// --- mine ------------------------------------------------------------------------

struct MineArtifacts {
    MiningOutcome outcome;
    std::filesystem::path links_path;
    std::filesystem::path report_path;
};

inline MineArtifacts cmd_mine(const RunConfig& config) {
    if (config.repo_path.empty()) throw ConfigError("repo path is required");
    if (config.project_prefix.empty()) throw ConfigError("project prefix is required");
    if (config.issues_path.empty()) throw ConfigError("issues path is required");
    config.validate_common();

    CommitGraph graph = load_history(config.repo_path, config.head_ref);
    AncestorSets ancestors(graph);
    std::set<IssueKey> corpus_keys;
    for (const auto& issue : load_issues(config.issues_path)) corpus_keys.insert(issue.key);

    MineArtifacts artifacts;
    artifacts.outcome =
        run_mining_pipeline(graph, ancestors, config.project_prefix, corpus_keys);

    std::filesystem::create_directories(config.output_dir);
    artifacts.links_path = config.output_dir / "links.jsonl";
    artifacts.report_path = config.output_dir / "mining_report.json";
    write_links(artifacts.links_path, artifacts.outcome);

    const MiningReport& report = artifacts.outcome.report;
    std::ofstream out(artifacts.report_path);
    if (!out) throw IoError("cannot write " + artifacts.report_path.string());
    out << nlohmann::json{{"unknown_issues", report.unknown_issues},
                          {"max_linkable", report.max_linkable},
                          {"linked", report.linked},
                          {"discarded_path", report.discarded_path},
                          {"discarded_merge", report.discarded_merge},
                          {"discarded_entry", report.discarded_entry}}
               .dump(2)
        << '\n';
    return artifacts;
}

// --- build -----------------------------------------------------------------------

struct BuildArtifacts {
    std::vector<LabeledSample> samples;
    std::filesystem::path dataset_path;
    std::filesystem::path summary_path;
};

inline BuildArtifacts cmd_build(const RunConfig& config) {
    if (config.repo_path.empty()) throw ConfigError("repo path is required");
    if (config.issues_path.empty()) throw ConfigError("issues path is required");
    config.validate_common();

    std::filesystem::path links_path = config.output_dir / "links.jsonl";
    if (!std::filesystem::exists(links_path))
        throw IoError("links file not found: " + links_path.string() + " (run mine first)");

    GitRepo repo(config.repo_path);
    CommitGraph graph = load_history(config.repo_path, config.head_ref);
    AncestorSets ancestors(graph);
    auto links = read_links(links_path);
    auto issues = load_issues(config.issues_path);

    BuildArtifacts artifacts;
    artifacts.samples = build_dataset(repo, graph, ancestors, links, issues,
                                      config.extensions);
    if (artifacts.samples.empty())
        std::cerr << "warning: no issue produced a labelled sample; dataset is empty\n";

    std::filesystem::create_directories(config.output_dir);
    artifacts.dataset_path = config.output_dir / "dataset.jsonl";
    artifacts.summary_path = config.output_dir / "dataset_summary.json";
    write_dataset(artifacts.dataset_path, artifacts.samples);

    std::vector<std::size_t> files_per_issue, positives_per_issue;
    for (const auto& s : artifacts.samples) {
        files_per_issue.push_back(s.snapshot_file_count);
        positives_per_issue.push_back(s.positives.size());
    }
    std::ofstream out(artifacts.summary_path);
    if (!out) throw IoError("cannot write " + artifacts.summary_path.string());
    out << nlohmann::json{{"in_dataset", artifacts.samples.size()},
                          {"files_per_issue", detail::summary_json(detail::summarize(
                                                  std::move(files_per_issue)))},
                          {"positives_per_issue", detail::summary_json(detail::summarize(
                                                      std::move(positives_per_issue)))}}
               .dump(2)
        << '\n';
    return artifacts;
}

// --- evaluate ----------------------------------------------------------------------

struct EvaluatedRow {
    std::string model;
    std::string split;  // "validation" | "test"
    std::string issue_type;
    std::size_t identifier_count = 0;
    std::int64_t first_commit_time = 0;
    MetricsRow metrics;
};

struct EvaluateArtifacts {
    std::vector<EvaluatedRow> rows;
    std::filesystem::path metrics_path;
    std::filesystem::path aggregate_path;
    std::filesystem::path rankings_path;  // empty when rankings are not dumped
};

namespace detail {

inline nlohmann::json metrics_row_json(const EvaluatedRow& row) {
    nlohmann::json obj{{"issue", row.metrics.issue.str()},
                       {"model", row.model},
                       {"split", row.split},
                       {"issue_type", row.issue_type},
                       {"identifier_count", row.identifier_count},
                       {"first_commit_time", row.first_commit_time},
                       {"RP", row.metrics.r_precision},
                       {"RR", row.metrics.reciprocal_rank},
                       {"first_positive_rank", row.metrics.first_positive_rank}};
    for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k) {
        std::string suffix = std::to_string(kMetricCutoffs[k]);
        obj["hit@" + suffix] = row.metrics.hit[k];
        obj["P@" + suffix] = row.metrics.precision[k];
        obj["R@" + suffix] = row.metrics.recall[k];
    }
    return obj;
}

inline EvaluatedRow metrics_row_from_json(std::size_t line_no, const nlohmann::json& obj) {
    jsonl::require_keys(line_no, obj,
                        {"issue", "model", "split", "issue_type", "identifier_count",
                         "first_commit_time", "RP", "RR", "first_positive_rank", "hit@1",
                         "hit@5", "hit@10", "P@1", "P@5", "P@10", "R@1", "R@5", "R@10"});
    EvaluatedRow row;
    auto key = IssueKey::parse(obj.at("issue").get<std::string>());
    if (!key) throw SchemaError(line_no, "malformed issue key");
    row.metrics.issue = *key;
    row.model = obj.at("model").get<std::string>();
    row.split = obj.at("split").get<std::string>();
    row.issue_type = obj.at("issue_type").get<std::string>();
    row.identifier_count = obj.at("identifier_count").get<std::size_t>();
    row.first_commit_time = obj.at("first_commit_time").get<std::int64_t>();
    row.metrics.r_precision = obj.at("RP").get<double>();
    row.metrics.reciprocal_rank = obj.at("RR").get<double>();
    row.metrics.first_positive_rank = obj.at("first_positive_rank").get<std::size_t>();
    for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k) {
        std::string suffix = std::to_string(kMetricCutoffs[k]);
        row.metrics.hit[k] = obj.at("hit@" + suffix).get<double>();
        row.metrics.precision[k] = obj.at("P@" + suffix).get<double>();
        row.metrics.recall[k] = obj.at("R@" + suffix).get<double>();
    }
    return row;
}

// Table-3 row order.
inline const std::vector<std::string>& aggregate_metric_names() {
    static const std::vector<std::string> names = {"P@1", "P@5", "P@10", "H@5", "H@10",
                                                   "R@1", "R@5", "R@10", "RP",  "MRR"};
    return names;
}

}  // namespace detail

inline std::vector<Model> models_to_run(const RunConfig& config) {
    if (config.all_models)
        return {Model::vsm, Model::lsi, Model::rvsm, Model::bm25};
    return {config.model.model};
}

inline EvaluateArtifacts cmd_evaluate(const RunConfig& config) {
    if (config.repo_path.empty()) throw ConfigError("repo path is required");
    config.validate_common();

    std::filesystem::path dataset_path = config.output_dir / "dataset.jsonl";
    if (!std::filesystem::exists(dataset_path))
        throw IoError("dataset not found: " + dataset_path.string() + " (run build first)");
    auto samples = read_dataset(dataset_path);
    if (samples.empty()) throw EmptyInput("dataset is empty; nothing to evaluate");

    GitRepo repo(config.repo_path);
    CommitGraph graph = load_history(config.repo_path, config.head_ref);

    std::vector<TimedSample> timed;
    timed.reserve(samples.size());
    for (auto& sample : samples) {
        std::int64_t t = graph.contains(sample.snapshot.diff_commit)
                             ? graph.record(sample.snapshot.diff_commit).author_time
                             : repo.commit_time(sample.snapshot.diff_commit);
        timed.push_back({t, std::move(sample)});
    }
    Split split = temporal_split(std::move(timed), config.split_ratio);

    struct EvalItem {
        const LabeledSample* sample;
        const char* split_name;
        std::int64_t time;
    };
    std::vector<EvalItem> items;
    auto add_items = [&](const std::vector<LabeledSample>& set, const char* name) {
        for (const auto& s : set) {
            std::int64_t t = graph.contains(s.snapshot.diff_commit)
                                 ? graph.record(s.snapshot.diff_commit).author_time
                                 : repo.commit_time(s.snapshot.diff_commit);
            items.push_back({&s, name, t});
        }
    };
    if (config.eval_split == EvalSplit::validation || config.eval_split == EvalSplit::all)
        add_items(split.validation, "validation");
    if (config.eval_split == EvalSplit::test || config.eval_split == EvalSplit::all)
        add_items(split.test, "test");
    if (items.empty()) throw EmptyInput("selected split is empty");

    std::filesystem::create_directories(config.output_dir);
    EvaluateArtifacts artifacts;
    artifacts.metrics_path = config.output_dir / "metrics.jsonl";
    artifacts.aggregate_path = config.output_dir / "aggregate.csv";
    if (config.dump_rankings)
        artifacts.rankings_path = config.output_dir / "rankings.jsonl";

    SnapshotCache cache;
    std::vector<Model> models = models_to_run(config);
    std::unique_ptr<jsonl::Writer> ranking_writer;
    if (config.dump_rankings)
        ranking_writer = std::make_unique<jsonl::Writer>(artifacts.rankings_path);
    jsonl::Writer metrics_writer(artifacts.metrics_path);

    std::map<std::string, AggregateReport> aggregates;
    for (Model model : models) {
        ModelConfig model_config = config.model;
        model_config.model = model;
        std::vector<Ranking> rankings(items.size());
        detail::parallel_for(items.size(), config.parallelism, [&](std::size_t i) {
            rankings[i] = rank_for_sample(*items[i].sample, repo, model_config,
                                          config.preprocess, config.extensions, &cache);
        });
        std::vector<MetricsRow> metric_rows;
        metric_rows.reserve(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            const LabeledSample& sample = *items[i].sample;
            std::set<std::string> positives(sample.positives.begin(), sample.positives.end());
            MetricsRow row = metrics_for_issue(rankings[i], positives);
            row.issue = sample.issue;
            metric_rows.push_back(row);

            EvaluatedRow evaluated{model_name(model), items[i].split_name, sample.issue_type,
                                   count_identifiers(sample.issue_text(), config.extensions),
                                   items[i].time, row};
            metrics_writer.write(detail::metrics_row_json(evaluated));
            artifacts.rows.push_back(std::move(evaluated));

            if (ranking_writer) {
                nlohmann::json ranked = nlohmann::json::array();
                for (const auto& doc : rankings[i])
                    ranked.push_back({{"path", doc.path}, {"score", doc.score}});
                ranking_writer->write({{"issue", sample.issue.str()},
                                       {"model", model_name(model)},
                                       {"ranking", std::move(ranked)}});
            }
        }
        aggregates[model_name(model)] = aggregate(metric_rows);
    }

    std::ofstream agg(artifacts.aggregate_path);
    if (!agg) throw IoError("cannot write " + artifacts.aggregate_path.string());
    agg << "metric";
    for (Model model : models) agg << ',' << model_name(model);
    agg << '\n';
    auto metric_value = [](const AggregateReport& r, const std::string& name) {
        if (name == "P@1") return r.precision[0];
        if (name == "P@5") return r.precision[1];
        if (name == "P@10") return r.precision[2];
        if (name == "H@5") return r.hit[1];
        if (name == "H@10") return r.hit[2];
        if (name == "R@1") return r.recall[0];
        if (name == "R@5") return r.recall[1];
        if (name == "R@10") return r.recall[2];
        if (name == "RP") return r.r_precision;
        return r.mrr;  // MRR
    };
    for (const auto& name : detail::aggregate_metric_names()) {
        agg << name;
        for (Model model : models)
            agg << ',' << detail::fmt_double(metric_value(aggregates.at(model_name(model)),
                                                          name));
        agg << '\n';
    }
    return artifacts;
}

inline std::vector<EvaluatedRow> read_metrics(const std::filesystem::path& path) {
    std::vector<EvaluatedRow> rows;
    jsonl::read_file(path, [&](std::size_t line_no, const jsonl::json& obj) {
        rows.push_back(detail::metrics_row_from_json(line_no, obj));
    });
    return rows;
}

// --- analyze ----------------------------------------------------------------------

struct AnalyzeArtifacts {
    std::filesystem::path directory;
};

inline AnalyzeArtifacts cmd_analyze(const RunConfig& config) {
    config.validate_common();
    std::filesystem::path metrics_path = config.output_dir / "metrics.jsonl";
    if (!std::filesystem::exists(metrics_path))
        throw IoError("metrics not found: " + metrics_path.string() + " (run evaluate first)");
    auto all_rows = read_metrics(metrics_path);
    if (all_rows.empty()) throw EmptyInput("metrics file is empty");

    std::filesystem::path dir = config.output_dir / "analysis";
    std::filesystem::create_directories(dir);

    {
        std::ofstream meta(dir / "metadata.json");
        meta << nlohmann::json{{"kw_p_method", "chi-square approximation"},
                               {"conover_p_method", "two-sided Student t"},
                               {"spearman_p_method", "two-sided t approximation"},
                               {"alpha", kSignificanceAlpha}}
                    .dump(2)
             << '\n';
    }

    std::vector<std::string> models;
    for (const auto& row : all_rows)
        if (std::find(models.begin(), models.end(), row.model) == models.end())
            models.push_back(row.model);
    std::sort(models.begin(), models.end());
    if (!config.all_models) {
        std::string wanted = model_name(config.model.model);
        if (std::find(models.begin(), models.end(), wanted) == models.end())
            throw IoError("metrics file has no rows for model '" + wanted + "'");
        models = {wanted};
    }

    std::ofstream kw_isolate(dir / "kw_isolate.csv");
    std::ofstream kw_holdout(dir / "kw_holdout.csv");
    std::ofstream conover(dir / "conover.csv");
    std::ofstream spearman_all(dir / "spearman.csv");
    std::ofstream spearman_by_type(dir / "spearman_by_type.csv");
    std::ofstream long_values(dir / "metric_values_long.csv");
    for (auto* out : {&kw_isolate, &kw_holdout})
        *out << "model,metric,H,p,epsilon_sq,effect,significant,group_sizes,small_groups\n";
    conover << "model,mode,metric,category_a,category_b,p,significant\n";
    spearman_all << "model,metric,rho,p,n,strength,significant\n";
    spearman_by_type << "model,category,metric,rho,p,n,strength,significant,note\n";
    long_values << "model,issue,category,metric,value\n";

    for (const auto& model : models) {
        std::vector<CategorizedRow> rows;
        std::vector<std::size_t> identifier_counts;
        for (const auto& row : all_rows) {
            if (row.model != model) continue;
            rows.push_back({config.type_mapping.categorize(row.issue_type), row.metrics});
            identifier_counts.push_back(row.identifier_count);
        }
        if (rows.empty()) continue;

        for (const auto& r : rows)
            for (const auto& [metric, value] : ratio_metrics(r.row))
                long_values << model << ',' << r.row.issue.str() << ','
                            << category_name(r.category) << ',' << metric << ','
                            << detail::fmt_double(value) << '\n';

        for (GroupingMode mode : {GroupingMode::isolate, GroupingMode::holdout}) {
            std::ofstream& out = mode == GroupingMode::isolate ? kw_isolate : kw_holdout;
            std::vector<GroupedTest> tests;
            try {
                tests = holdout_compare(rows, mode);
            } catch (const InsufficientGroups& e) {
                std::cerr << "warning: " << model << " "
                          << (mode == GroupingMode::isolate ? "isolate" : "holdout") << ": "
                          << e.what() << "; skipped\n";
                continue;
            }
            for (const auto& test : tests) {
                bool small = std::any_of(test.test.group_sizes.begin(),
                                         test.test.group_sizes.end(),
                                         [](std::size_t s) { return s < 5; });
                out << model << ',' << test.metric << ','
                    << detail::fmt_double(test.test.H) << ','
                    << detail::fmt_double(test.test.p) << ','
                    << detail::fmt_double(test.test.epsilon_sq) << ','
                    << bin_epsilon_squared(test.test.epsilon_sq) << ','
                    << (significant(test.test.p) ? "*" : "") << ',';
                for (std::size_t i = 0; i < test.test.group_sizes.size(); ++i)
                    out << (i ? "|" : "") << test.test.group_sizes[i];
                out << ',' << (small ? "yes" : "no") << '\n';

                if (!significant(test.test.p)) continue;
                // Pairwise comparisons only where the omnibus test fires.
                std::vector<std::vector<double>> groups(test.group_labels.size());
                for (std::size_t gi = 0; gi < test.group_labels.size(); ++gi) {
                    for (const auto& r : rows) {
                        bool include = mode == GroupingMode::isolate
                                           ? r.category == test.group_labels[gi]
                                           : r.category != test.group_labels[gi];
                        if (!include) continue;
                        for (const auto& [metric, value] : ratio_metrics(r.row))
                            if (metric == test.metric) groups[gi].push_back(value);
                    }
                }
                auto pairwise = conover_posthoc(groups);
                for (std::size_t i = 0; i < pairwise.size(); ++i)
                    for (std::size_t j = i + 1; j < pairwise.size(); ++j)
                        conover << model << ','
                                << (mode == GroupingMode::isolate ? "isolate" : "holdout")
                                << ',' << test.metric << ','
                                << category_name(test.group_labels[i]) << ','
                                << category_name(test.group_labels[j]) << ','
                                << detail::fmt_double(pairwise[i][j]) << ','
                                << (significant(pairwise[i][j]) ? "*" : "") << '\n';
            }
        }

        // Identifier correlation, overall and per category.
        auto spearman_rows = [&](const std::vector<std::size_t>& indices, std::ostream& out,
                                 const std::string& label_prefix) {
            if (indices.size() < 3) {
                if (!label_prefix.empty())
                    out << model << ',' << label_prefix << ",,,," << indices.size()
                        << ",,,skipped: fewer than three issues\n";
                return;
            }
            auto metric_list = ratio_metrics(rows.front().row);
            for (std::size_t mi = 0; mi < metric_list.size(); ++mi) {
                std::vector<double> xs, ys;
                for (std::size_t idx : indices) {
                    xs.push_back(static_cast<double>(identifier_counts[idx]));
                    ys.push_back(ratio_metrics(rows[idx].row)[mi].second);
                }
                const std::string& metric = metric_list[mi].first;
                try {
                    CorrelationResult r = spearman(xs, ys);
                    if (label_prefix.empty())
                        out << model << ',' << metric << ',' << detail::fmt_double(r.rho)
                            << ',' << detail::fmt_double(r.p) << ',' << r.n << ','
                            << bin_rho(r.rho) << ',' << (significant(r.p) ? "*" : "") << '\n';
                    else
                        out << model << ',' << label_prefix << ',' << metric << ','
                            << detail::fmt_double(r.rho) << ',' << detail::fmt_double(r.p)
                            << ',' << r.n << ',' << bin_rho(r.rho) << ','
                            << (significant(r.p) ? "*" : "") << ",\n";
                } catch (const DegenerateInput& e) {
                    if (label_prefix.empty())
                        std::cerr << "warning: spearman " << model << "/" << metric << ": "
                                  << e.what() << "\n";
                    else
                        out << model << ',' << label_prefix << ',' << metric << ",,,"
                            << indices.size() << ",,," << "skipped: " << e.what() << '\n';
                }
            }
        };

        std::vector<std::size_t> all_indices(rows.size());
        std::iota(all_indices.begin(), all_indices.end(), std::size_t{0});
        spearman_rows(all_indices, spearman_all, "");
        for (IssueCategory c : kAllCategories) {
            std::vector<std::size_t> indices;
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (rows[i].category == c) indices.push_back(i);
            if (indices.empty()) continue;
            spearman_rows(indices, spearman_by_type, category_name(c));
        }
    }
    return {dir};
}

// --- rank -------------------------------------------------------------------------

inline Ranking cmd_rank(const RunConfig& config, const std::string& commit_ref,
                        const std::filesystem::path& issue_text_path, std::ostream& out) {
    if (config.repo_path.empty()) throw ConfigError("repo path is required");
    config.validate_common();

    GitRepo repo(config.repo_path);
    CommitId commit = repo.rev_parse(commit_ref);

    std::ifstream in(issue_text_path);
    if (!in) throw IoError("cannot open issue text " + issue_text_path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    auto docs = materialize_snapshot(repo, commit, config.extensions, config.preprocess);
    CorpusIndex index = CorpusIndex::build(docs);
    TokenStream query = preprocess_issue_text(buffer.str(), config.preprocess);
    Ranking ranking = score_with_model(query, index, config.model);

    std::size_t limit = std::min(config.top_k, ranking.size());
    for (std::size_t i = 0; i < limit; ++i)
        out << (i + 1) << '\t' << detail::fmt_double(ranking[i].score) << '\t'
            << ranking[i].path << '\n';
    return ranking;
}

// --- report -----------------------------------------------------------------------

inline std::filesystem::path cmd_report(const RunConfig& config) {
    config.validate_common();
    std::filesystem::path report_path = config.output_dir / "report.txt";
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write " + report_path.string());

    std::filesystem::path mining_path = config.output_dir / "mining_report.json";
    if (std::filesystem::exists(mining_path)) {
        std::ifstream in(mining_path);
        nlohmann::json mining = nlohmann::json::parse(in);
        out << "== Link mining ==\n";
        for (const char* key : {"unknown_issues", "max_linkable", "linked", "discarded_path",
                                "discarded_merge", "discarded_entry"})
            out << key << ": " << mining.at(key).get<std::size_t>() << '\n';
        out << '\n';
    }

    std::filesystem::path summary_path = config.output_dir / "dataset_summary.json";
    if (std::filesystem::exists(summary_path)) {
        std::ifstream in(summary_path);
        nlohmann::json summary = nlohmann::json::parse(in);
        out << "== Dataset ==\n";
        out << "in_dataset: " << summary.at("in_dataset").get<std::size_t>() << '\n';
        for (const char* section : {"files_per_issue", "positives_per_issue"}) {
            const auto& s = summary.at(section);
            out << section << ": min " << s.at("min").get<std::size_t>() << ", max "
                << s.at("max").get<std::size_t>() << ", mean "
                << detail::fmt_double(s.at("mean").get<double>()) << ", median "
                << detail::fmt_double(s.at("median").get<double>()) << '\n';
        }
        out << '\n';
    }

    // Commit-size proportions (Fig. 1 style), over refined links.
    std::filesystem::path links_path = config.output_dir / "links.jsonl";
    if (!config.repo_path.empty() && std::filesystem::exists(links_path)) {
        GitRepo repo(config.repo_path);
        CommitGraph graph = load_history(config.repo_path, config.head_ref);
        auto links = read_links(links_path);
        auto shares = commit_size_distribution(links, repo, graph);

        std::filesystem::path csv_path = config.output_dir / "commit_sizes.csv";
        std::ofstream csv(csv_path);
        csv << "issue,position,files_changed,share\n";
        for (const auto& row : shares)
            csv << row.issue.str() << ',' << row.position << ',' << row.files_changed << ','
                << detail::fmt_double(row.share) << '\n';

        out << "== Commit size proportions ==\n";
        std::map<std::size_t, std::vector<double>> by_position;
        for (const auto& row : shares) by_position[row.position].push_back(row.share);
        if (by_position.empty()) {
            out << "(no issue has more than one linked commit)\n";
        } else {
            for (auto& [position, values] : by_position) {
                std::sort(values.begin(), values.end());
                double total = 0;
                for (double v : values) total += v;
                double median = values.size() % 2
                                    ? values[values.size() / 2]
                                    : (values[values.size() / 2 - 1] +
                                       values[values.size() / 2]) /
                                          2.0;
                out << "position " << position << ": n=" << values.size() << ", mean_share="
                    << detail::fmt_double(total / static_cast<double>(values.size()))
                    << ", median_share=" << detail::fmt_double(median) << '\n';
            }
        }
        out << '\n';
    }

    // Directional sanity: BM25 is expected to beat rVSM on MRR (non-binding).
    std::filesystem::path metrics_path = config.output_dir / "metrics.jsonl";
    if (std::filesystem::exists(metrics_path)) {
        auto rows = read_metrics(metrics_path);
        std::map<std::string, std::pair<double, std::size_t>> mrr;
        for (const auto& row : rows) {
            auto& acc = mrr[row.model];
            acc.first += row.metrics.reciprocal_rank;
            acc.second += 1;
        }
        if (!mrr.empty()) {
            out << "== Models ==\n";
            for (const auto& [model, acc] : mrr)
                out << "mean MRR " << model << ": "
                    << detail::fmt_double(acc.first / static_cast<double>(acc.second)) << '\n';
            if (mrr.count("bm25") && mrr.count("rvsm")) {
                double bm25 = mrr["bm25"].first / static_cast<double>(mrr["bm25"].second);
                double rvsm = mrr["rvsm"].first / static_cast<double>(mrr["rvsm"].second);
                out << "expected mean MRR(bm25) >= mean MRR(rvsm): "
                    << (bm25 >= rvsm ? "holds" : "VIOLATED")
                    << " (directional expectation, non-binding)\n";
            }
            out << '\n';
        }
    }
    return report_path;
}

}  // namespace fileloc
