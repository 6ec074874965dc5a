#pragma once

// Issue-key extraction from commit summaries and the link refinement
// pipeline: path requirement, merge disambiguation, unique-entry-point
// check, unknown-issue pruning.  Stage order is fixed and every stage is
// idempotent on its own output.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fileloc/commit_graph.hpp"
#include "fileloc/errors.hpp"
#include "fileloc/jsonl.hpp"

namespace fileloc {

struct IssueKey {
    std::string prefix;  // uppercase project token
    std::uint64_t number = 0;

    std::string str() const { return prefix + "-" + std::to_string(number); }
    auto operator<=>(const IssueKey&) const = default;

    static std::optional<IssueKey> parse(std::string_view text) {
        auto dash = text.rfind('-');
        if (dash == std::string_view::npos || dash == 0 || dash + 1 >= text.size())
            return std::nullopt;
        std::uint64_t number = 0;
        auto digits = text.substr(dash + 1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), number);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || number == 0)
            return std::nullopt;
        return IssueKey{std::string(text.substr(0, dash)), number};
    }
};

struct LinkRecord {
    IssueKey issue;
    std::vector<CommitId> commits;  // ordered by topo position
};

enum class DropStage { path, merge, entry, unknown };

inline const char* drop_stage_name(DropStage stage) {
    switch (stage) {
        case DropStage::path: return "path";
        case DropStage::merge: return "merge";
        case DropStage::entry: return "entry";
        case DropStage::unknown: return "unknown";
    }
    return "?";
}

struct DroppedLink {
    LinkRecord record;  // commits as they stood when the issue was dropped
    DropStage stage;
};

struct MiningReport {
    std::size_t unknown_issues = 0;
    std::size_t max_linkable = 0;
    std::size_t linked = 0;
    std::size_t discarded_path = 0;
    std::size_t discarded_merge = 0;
    std::size_t discarded_entry = 0;
};

// Scans only the summary (first) line of each commit for \bPREFIX-\d+\b,
// case-sensitively.  A commit mentioning n distinct issues joins n records;
// duplicate mentions within one summary collapse.
inline std::vector<LinkRecord> mine_raw_links(const CommitGraph& graph,
                                              const std::string& project_prefix) {
    if (project_prefix.empty())
        throw ConfigError("project prefix must be non-empty");
    std::string escaped;
    for (char c : project_prefix) {
        bool alnum = (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
        if (!alnum) escaped += '\\';
        escaped += c;
    }
    std::regex key_re("\\b" + escaped + "-(\\d+)\\b");

    std::map<IssueKey, LinkRecord> by_issue;
    for (const auto& rec : graph.topo_order()) {
        std::set<IssueKey> mentioned;
        auto begin = std::sregex_iterator(rec.summary.begin(), rec.summary.end(), key_re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            if (auto key = IssueKey::parse(it->str())) mentioned.insert(*key);
        }
        for (const auto& key : mentioned) {
            auto& record = by_issue[key];
            record.issue = key;
            record.commits.push_back(rec.id);  // topo order preserved
        }
    }
    std::vector<LinkRecord> out;
    out.reserve(by_issue.size());
    for (auto& [key, record] : by_issue) out.push_back(std::move(record));
    return out;
}

struct RefinementStep {
    std::vector<LinkRecord> kept;
    std::vector<LinkRecord> dropped;
};

// Drops issues whose linked commits do not lie on a single root-to-HEAD path.
inline RefinementStep apply_path_requirement(const std::vector<LinkRecord>& links,
                                             const CommitGraph& graph,
                                             const AncestorSets& ancestors) {
    RefinementStep step;
    for (const auto& record : links) {
        if (path_requirement(graph, ancestors, record.commits).accepted)
            step.kept.push_back(record);
        else
            step.dropped.push_back(record);
    }
    return step;
}

// Merge disambiguation.  For every linked merge commit M with branch Br
// (the merged branch minus M itself): if no commit in Br is linked to any
// issue, M keeps its links; otherwise M's links are removed everywhere and
// every issue that linked M without also linking a commit in Br is dropped.
// All decisions are made against the incoming link state.
inline RefinementStep disambiguate_merges(const std::vector<LinkRecord>& links,
                                          const CommitGraph& graph,
                                          const AncestorSets& ancestors) {
    std::unordered_set<CommitId> linked_commits;
    for (const auto& record : links)
        linked_commits.insert(record.commits.begin(), record.commits.end());

    std::unordered_set<CommitId> poisoned;  // linked merges whose branch is also linked
    std::unordered_map<CommitId, std::unordered_set<CommitId>> branch_of;
    for (const auto& id : linked_commits) {
        const auto& rec = graph.record(id);
        if (!rec.is_merge()) continue;
        auto branch = merged_branch(graph, ancestors, id);
        branch.pop_back();  // exclude the merge itself
        bool branch_linked = std::any_of(branch.begin(), branch.end(), [&](const CommitId& c) {
            return linked_commits.count(c) != 0;
        });
        if (branch_linked) {
            poisoned.insert(id);
            branch_of.emplace(id, std::unordered_set<CommitId>(branch.begin(), branch.end()));
        }
    }

    RefinementStep step;
    for (const auto& record : links) {
        bool drop = false;
        for (const auto& id : record.commits) {
            if (!poisoned.count(id)) continue;
            const auto& branch = branch_of.at(id);
            bool represented = std::any_of(record.commits.begin(), record.commits.end(),
                                           [&](const CommitId& c) { return branch.count(c); });
            if (!represented) {
                drop = true;
                break;
            }
        }
        if (drop) {
            step.dropped.push_back(record);
            continue;
        }
        LinkRecord kept = record;
        std::erase_if(kept.commits, [&](const CommitId& c) { return poisoned.count(c) != 0; });
        if (kept.commits.empty())
            step.dropped.push_back(record);
        else
            step.kept.push_back(std::move(kept));
    }
    return step;
}

// Drops issues linked to a merge commit whose branch has no unique entry
// point; no a-priori snapshot can be resolved for such merges.
inline RefinementStep apply_entry_point_requirement(const std::vector<LinkRecord>& links,
                                                    const CommitGraph& graph,
                                                    const AncestorSets& ancestors) {
    std::unordered_map<CommitId, bool> cache;
    RefinementStep step;
    for (const auto& record : links) {
        bool drop = false;
        for (const auto& id : record.commits) {
            if (!graph.record(id).is_merge()) continue;
            auto it = cache.find(id);
            if (it == cache.end())
                it = cache.emplace(id, unique_entry_point(graph, ancestors, id).has_value())
                         .first;
            if (!it->second) {
                drop = true;
                break;
            }
        }
        if (drop)
            step.dropped.push_back(record);
        else
            step.kept.push_back(record);
    }
    return step;
}

// Final report with Table-2 column semantics; issues absent from the corpus
// are pruned from `refined` here and counted from the raw mining output.
inline MiningReport mining_report(const std::vector<LinkRecord>& raw,
                                  std::vector<LinkRecord>& refined,
                                  const std::set<IssueKey>& corpus_keys,
                                  std::size_t discarded_path, std::size_t discarded_merge,
                                  std::size_t discarded_entry,
                                  std::vector<LinkRecord>* pruned_unknown = nullptr) {
    MiningReport report;
    report.max_linkable = raw.size();
    for (const auto& record : raw)
        if (!corpus_keys.count(record.issue)) ++report.unknown_issues;
    auto unknown = std::partition(refined.begin(), refined.end(), [&](const LinkRecord& r) {
        return corpus_keys.count(r.issue) != 0;
    });
    if (pruned_unknown)
        pruned_unknown->assign(unknown, refined.end());
    refined.erase(unknown, refined.end());
    std::sort(refined.begin(), refined.end(),
              [](const LinkRecord& a, const LinkRecord& b) { return a.issue < b.issue; });
    report.linked = refined.size();
    report.discarded_path = discarded_path;
    report.discarded_merge = discarded_merge;
    report.discarded_entry = discarded_entry;
    return report;
}

struct MiningOutcome {
    std::vector<LinkRecord> links;       // surviving refinement, sorted by issue
    std::vector<DroppedLink> dropped;    // with the stage that dropped them
    MiningReport report;
};

inline MiningOutcome run_mining_pipeline(const CommitGraph& graph, const AncestorSets& ancestors,
                                         const std::string& project_prefix,
                                         const std::set<IssueKey>& corpus_keys) {
    MiningOutcome outcome;
    auto raw = mine_raw_links(graph, project_prefix);

    auto path_step = apply_path_requirement(raw, graph, ancestors);
    for (auto& r : path_step.dropped)
        outcome.dropped.push_back({std::move(r), DropStage::path});

    auto merge_step = disambiguate_merges(path_step.kept, graph, ancestors);
    for (auto& r : merge_step.dropped)
        outcome.dropped.push_back({std::move(r), DropStage::merge});

    auto entry_step = apply_entry_point_requirement(merge_step.kept, graph, ancestors);
    for (auto& r : entry_step.dropped)
        outcome.dropped.push_back({std::move(r), DropStage::entry});

    std::vector<LinkRecord> pruned_unknown;
    outcome.links = std::move(entry_step.kept);
    outcome.report = mining_report(raw, outcome.links, corpus_keys, path_step.dropped.size(),
                                   merge_step.dropped.size(), entry_step.dropped.size(),
                                   &pruned_unknown);
    for (auto& r : pruned_unknown)
        outcome.dropped.push_back({std::move(r), DropStage::unknown});
    std::sort(outcome.dropped.begin(), outcome.dropped.end(),
              [](const DroppedLink& a, const DroppedLink& b) {
                  return a.record.issue < b.record.issue;
              });
    return outcome;
}

// --- JSONL persistence: one object per issue ---------------------------------

inline void write_links(const std::filesystem::path& path, const MiningOutcome& outcome) {
    jsonl::Writer writer(path);
    auto record_json = [](const LinkRecord& r) {
        return jsonl::json{{"issue", r.issue.str()}, {"commits", r.commits}};
    };
    for (const auto& record : outcome.links) writer.write(record_json(record));
    for (const auto& dropped : outcome.dropped) {
        auto obj = record_json(dropped.record);
        obj["dropped_stage"] = drop_stage_name(dropped.stage);
        writer.write(obj);
    }
}

// Returns only the surviving records; dropped entries are skipped.
inline std::vector<LinkRecord> read_links(const std::filesystem::path& path) {
    std::vector<LinkRecord> records;
    jsonl::read_file(path, [&](std::size_t line_no, const jsonl::json& obj) {
        jsonl::require_keys(line_no, obj, {"issue", "commits"}, {"dropped_stage"});
        if (obj.contains("dropped_stage")) return;
        auto key = IssueKey::parse(obj.at("issue").get<std::string>());
        if (!key) throw SchemaError(line_no, "malformed issue key");
        LinkRecord record{*key, {}};
        for (const auto& c : obj.at("commits")) record.commits.push_back(c.get<std::string>());
        if (record.commits.empty()) throw SchemaError(line_no, "empty commit list");
        records.push_back(std::move(record));
    });
    std::sort(records.begin(), records.end(),
              [](const LinkRecord& a, const LinkRecord& b) { return a.issue < b.issue; });
    return records;
}

}  // namespace fileloc
