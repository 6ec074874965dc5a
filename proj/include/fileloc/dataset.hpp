#pragma once

// Issue corpus loading, a-priori snapshot resolution, positive/negative
// label extraction and the First-Commit-Only dataset builder, with JSONL
// persistence and the commit-size proportion analysis.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fileloc/commit_graph.hpp"
#include "fileloc/errors.hpp"
#include "fileloc/git.hpp"
#include "fileloc/jsonl.hpp"
#include "fileloc/link_mining.hpp"
#include "fileloc/text.hpp"

namespace fileloc {

struct Issue {
    IssueKey key;
    std::string raw_type;
    std::string title;
    std::string body;
    std::int64_t created = 0;

    std::string text() const { return title + "\n" + body; }
};

// Issue corpus input: JSONL {"key","type","title","body","created"}.
inline std::vector<Issue> load_issues(const std::filesystem::path& path) {
    std::vector<Issue> issues;
    std::set<IssueKey> seen;
    jsonl::read_file(path, [&](std::size_t line_no, const jsonl::json& obj) {
        jsonl::require_keys(line_no, obj, {"key", "type", "title", "body", "created"});
        auto key = IssueKey::parse(obj.at("key").get<std::string>());
        if (!key) throw SchemaError(line_no, "malformed issue key");
        if (!seen.insert(*key).second)
            throw SchemaError(line_no, "duplicate issue key " + key->str());
        if (!obj.at("created").is_number())
            throw SchemaError(line_no, "'created' must be a UTC timestamp in seconds");
        issues.push_back({*key, obj.at("type").get<std::string>(),
                          obj.at("title").get<std::string>(), obj.at("body").get<std::string>(),
                          obj.at("created").get<std::int64_t>()});
    });
    return issues;
}

struct ExtensionFilter {
    std::set<std::string> allowed;  // lowercase, without dot

    static ExtensionFilter defaults() {
        return {{"java", "py", "c", "h", "cpp", "hpp", "cs", "go", "js", "ts", "rb", "php",
                 "rs", "ml", "scala", "kt"}};
    }

    bool matches(std::string_view path) const {
        auto slash = path.rfind('/');
        auto base = slash == std::string_view::npos ? path : path.substr(slash + 1);
        auto dot = base.rfind('.');
        if (dot == std::string_view::npos || dot == 0 || dot + 1 >= base.size()) return false;
        return allowed.count(ascii_lower(std::string(base.substr(dot + 1)))) != 0;
    }
};

struct SnapshotRef {
    CommitId commit;       // the a-priori state used for ranking
    CommitId diff_commit;  // where the ground-truth labels come from
};

enum class DatasetVariant { first_commit_only, all_future_files, exact_commits };

struct LabeledSample {
    IssueKey issue;
    std::string issue_type;
    std::string title;
    std::string body;
    std::int64_t created = 0;
    SnapshotRef snapshot;
    std::vector<std::string> positives;  // sorted repo-relative paths
    std::size_t snapshot_file_count = 0;

    std::string issue_text() const { return title + "\n" + body; }
};

// Snapshot for predicting `commit`: its sole parent for non-merges, the
// unique entry parent for merges, nothing for roots or ambiguous merges.
inline std::optional<SnapshotRef> resolve_apriori(const CommitGraph& graph,
                                                  const AncestorSets& ancestors,
                                                  const CommitId& commit) {
    const CommitRecord& rec = graph.record(commit);
    if (rec.parents.empty()) return std::nullopt;
    if (!rec.is_merge()) return SnapshotRef{rec.parents[0], commit};
    auto entry = unique_entry_point(graph, ancestors, commit);
    if (!entry) return std::nullopt;
    return SnapshotRef{entry->apriori_parent, commit};
}

struct Labels {
    std::vector<std::string> positives;  // sorted
    std::vector<std::string> negatives;  // sorted
    // Changed source files outside the snapshot tree (possible for merges
    // where the diff parent differs from the snapshot); dropped from the
    // label sets.
    std::size_t outside_snapshot = 0;
};

// Ground truth for (diff_commit, snapshot): snapshot source files modified,
// type-changed or deleted by the diff against the first parent.  Additions
// are ignored; a rename counts its old path as deleted when that path is a
// source file, and a non-code -> code rename counts as a pure addition.
inline Labels extract_labels(const GitRepo& repo, const CommitGraph& graph,
                             const CommitId& diff_commit, const SnapshotRef& snapshot,
                             const ExtensionFilter& filter) {
    std::set<std::string> snapshot_files;
    for (const auto& entry : repo.ls_tree(snapshot.commit))
        if (filter.matches(entry.path)) snapshot_files.insert(entry.path);

    const CommitRecord& rec = graph.record(diff_commit);
    std::string first_parent = rec.parents.empty() ? std::string() : rec.parents[0];

    Labels labels;
    std::set<std::string> positives;
    for (const auto& change : repo.diff_against(first_parent, diff_commit)) {
        switch (change.kind) {
            case ChangeKind::added:
            case ChangeKind::copied:
                break;
            case ChangeKind::modified:
            case ChangeKind::type_changed:
            case ChangeKind::deleted:
                if (!filter.matches(change.path)) break;
                if (snapshot_files.count(change.path))
                    positives.insert(change.path);
                else
                    ++labels.outside_snapshot;
                break;
            case ChangeKind::renamed:
                // Old path leaves the tree: deleted if it was a source file.
                if (!filter.matches(change.path)) break;
                if (snapshot_files.count(change.path))
                    positives.insert(change.path);
                else
                    ++labels.outside_snapshot;
                break;
        }
    }
    labels.positives.assign(positives.begin(), positives.end());
    for (const auto& path : snapshot_files)
        if (!positives.count(path)) labels.negatives.push_back(path);
    return labels;
}

// First-Commit-Only dataset: for each issue, the first linked commit that
// yields a resolvable snapshot and a non-empty positive set becomes the
// sample; issues without such a commit are discarded.
inline std::vector<LabeledSample> build_dataset(const GitRepo& repo, const CommitGraph& graph,
                                                const AncestorSets& ancestors,
                                                const std::vector<LinkRecord>& links,
                                                const std::vector<Issue>& issues,
                                                const ExtensionFilter& filter,
                                                DatasetVariant variant =
                                                    DatasetVariant::first_commit_only) {
    if (variant != DatasetVariant::first_commit_only)
        throw UnsupportedVariant("only the FirstCommitOnly variant is supported");
    std::map<IssueKey, const Issue*> by_key;
    for (const auto& issue : issues) by_key.emplace(issue.key, &issue);

    std::vector<LabeledSample> samples;
    for (const auto& record : links) {
        auto it = by_key.find(record.issue);
        if (it == by_key.end()) continue;  // unknown issues are pruned upstream
        const Issue& issue = *it->second;
        for (const auto& commit : record.commits) {
            auto snapshot = resolve_apriori(graph, ancestors, commit);
            if (!snapshot) continue;
            Labels labels = extract_labels(repo, graph, commit, *snapshot, filter);
            if (labels.positives.empty()) continue;
            samples.push_back({issue.key, issue.raw_type, issue.title, issue.body,
                               issue.created, *snapshot, labels.positives,
                               labels.positives.size() + labels.negatives.size()});
            break;
        }
    }
    return samples;
}

// --- persistence --------------------------------------------------------------

inline void write_dataset(const std::filesystem::path& path,
                          const std::vector<LabeledSample>& samples) {
    jsonl::Writer writer(path);
    for (const auto& s : samples) {
        writer.write({{"issue", s.issue.str()},
                      {"issue_type", s.issue_type},
                      {"title", s.title},
                      {"body", s.body},
                      {"created", s.created},
                      {"diff_commit", s.snapshot.diff_commit},
                      {"snapshot_commit", s.snapshot.commit},
                      {"positives", s.positives},
                      {"snapshot_file_count", s.snapshot_file_count}});
    }
}

inline std::vector<LabeledSample> read_dataset(const std::filesystem::path& path) {
    std::vector<LabeledSample> samples;
    jsonl::read_file(path, [&](std::size_t line_no, const jsonl::json& obj) {
        jsonl::require_keys(line_no, obj,
                            {"issue", "issue_type", "title", "body", "created", "diff_commit",
                             "snapshot_commit", "positives", "snapshot_file_count"});
        auto key = IssueKey::parse(obj.at("issue").get<std::string>());
        if (!key) throw SchemaError(line_no, "malformed issue key");
        LabeledSample s;
        s.issue = *key;
        s.issue_type = obj.at("issue_type").get<std::string>();
        s.title = obj.at("title").get<std::string>();
        s.body = obj.at("body").get<std::string>();
        if (!obj.at("created").is_number())
            throw SchemaError(line_no, "'created' must be a timestamp");
        s.created = obj.at("created").get<std::int64_t>();
        s.snapshot.diff_commit = obj.at("diff_commit").get<std::string>();
        s.snapshot.commit = obj.at("snapshot_commit").get<std::string>();
        for (const auto& p : obj.at("positives")) s.positives.push_back(p.get<std::string>());
        if (s.positives.empty()) throw SchemaError(line_no, "sample without positives");
        s.snapshot_file_count = obj.at("snapshot_file_count").get<std::size_t>();
        if (s.snapshot_file_count < s.positives.size())
            throw SchemaError(line_no, "snapshot_file_count below positive count");
        samples.push_back(std::move(s));
    });
    return samples;
}

// --- commit-size proportions ----------------------------------------------------

struct CommitSizeShare {
    IssueKey issue;
    std::size_t position = 0;  // 1-based position within the issue's commits
    std::size_t files_changed = 0;
    double share = 0.0;
};

// Per-commit share of an issue's total file changes, over issues with more
// than one linked commit.
inline std::vector<CommitSizeShare> commit_size_distribution(
    const std::vector<LinkRecord>& links, const GitRepo& repo, const CommitGraph& graph) {
    std::vector<CommitSizeShare> rows;
    for (const auto& record : links) {
        if (record.commits.size() < 2) continue;
        std::vector<std::size_t> counts;
        counts.reserve(record.commits.size());
        std::size_t total = 0;
        for (const auto& commit : record.commits) {
            const CommitRecord& rec = graph.record(commit);
            std::string parent = rec.parents.empty() ? std::string() : rec.parents[0];
            counts.push_back(repo.diff_against(parent, commit).size());
            total += counts.back();
        }
        if (total == 0) continue;
        for (std::size_t i = 0; i < counts.size(); ++i)
            rows.push_back({record.issue, i + 1, counts[i],
                            static_cast<double>(counts[i]) / static_cast<double>(total)});
    }
    return rows;
}

}  // namespace fileloc
