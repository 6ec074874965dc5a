#pragma once

// Immutable commit DAG plus the linking algorithms that operate on it:
// ancestor sets, merged-branch extraction, the single-path requirement and
// the unique-entry-point check.  Once built, a CommitGraph and its
// AncestorSets are never mutated and are safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fileloc/errors.hpp"
#include "fileloc/git.hpp"

namespace fileloc {

using CommitId = std::string;

struct CommitRecord {
    CommitId id;
    std::vector<CommitId> parents;  // first parent = branch merged into
    std::string summary;            // first line of the commit message
    std::int64_t author_time = 0;

    bool is_merge() const { return parents.size() == 2; }
};

class CommitGraph {
public:
    // Validates, prunes to commits reachable from `head`, and establishes a
    // deterministic topological order (parents before children, ready
    // commits ordered by author_time then id).
    static CommitGraph build(std::vector<CommitRecord> records, const CommitId& head) {
        std::unordered_map<CommitId, CommitRecord> by_id;
        for (auto& r : records) {
            if (r.id.empty()) throw InvalidGraph("empty commit id");
            if (r.parents.size() > 2)
                throw UnsupportedMerge("commit " + r.id + " has " +
                                       std::to_string(r.parents.size()) + " parents");
            if (!by_id.emplace(r.id, std::move(r)).second)
                throw InvalidGraph("duplicate commit id " + r.id);
        }
        if (!by_id.count(head)) throw InvalidGraph("head commit " + head + " not present");

        // Reachability from head via parent edges.
        std::unordered_set<CommitId> reachable;
        std::vector<const CommitId*> stack = {&head};
        while (!stack.empty()) {
            const CommitId& id = *stack.back();
            stack.pop_back();
            if (!reachable.insert(id).second) continue;
            auto it = by_id.find(id);
            if (it == by_id.end()) throw InvalidGraph("unresolved parent " + id);
            for (const auto& p : it->second.parents) stack.push_back(&p);
        }

        CommitGraph g;
        g.head_ = head;
        g.records_.reserve(reachable.size());

        // Kahn's algorithm with a deterministic ready queue.
        std::unordered_map<CommitId, std::vector<const CommitId*>> children;
        std::unordered_map<CommitId, std::size_t> pending;
        for (const auto& id : reachable) {
            const auto& rec = by_id.at(id);
            pending[id] = rec.parents.size();
            for (const auto& p : rec.parents) children[p].push_back(&rec.id);
        }
        auto later = [&](const CommitId* a, const CommitId* b) {
            const auto& ra = by_id.at(*a);
            const auto& rb = by_id.at(*b);
            if (ra.author_time != rb.author_time) return ra.author_time > rb.author_time;
            return *a > *b;
        };
        std::priority_queue<const CommitId*, std::vector<const CommitId*>, decltype(later)>
            ready(later);
        for (const auto& [id, deg] : pending)
            if (deg == 0) ready.push(&by_id.at(id).id);
        while (!ready.empty()) {
            const CommitId* id = ready.top();
            ready.pop();
            g.index_.emplace(*id, static_cast<std::uint32_t>(g.records_.size()));
            g.records_.push_back(by_id.at(*id));
            for (const CommitId* child : children[*id])
                if (--pending.at(*child) == 0) ready.push(child);
        }
        if (g.records_.size() != reachable.size())
            throw InvalidGraph("commit graph contains a cycle");
        return g;
    }

    bool contains(const CommitId& id) const { return index_.count(id) != 0; }

    std::uint32_t topo_index(const CommitId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw InvalidGraph("unknown commit " + id);
        return it->second;
    }

    const CommitRecord& record(const CommitId& id) const { return records_[topo_index(id)]; }
    const CommitRecord& record_at(std::uint32_t idx) const { return records_[idx]; }

    // Parents before children.
    const std::vector<CommitRecord>& topo_order() const { return records_; }

    const CommitId& head() const { return head_; }
    std::size_t size() const { return records_.size(); }

private:
    std::unordered_map<CommitId, std::uint32_t> index_;
    std::vector<CommitRecord> records_;
    CommitId head_;
};

inline CommitGraph load_history(const std::filesystem::path& repo_path,
                                const std::string& head_ref) {
    GitRepo repo(repo_path);
    CommitId head = repo.rev_parse(head_ref);
    std::vector<CommitRecord> records;
    for (auto& raw : repo.log_from(head))
        records.push_back({std::move(raw.id), std::move(raw.parents), std::move(raw.summary),
                           raw.author_time});
    return CommitGraph::build(std::move(records), head);
}

// Per-commit ancestor sets (each set contains the commit itself), stored as
// bitsets over topo indices.
class AncestorSets {
public:
    explicit AncestorSets(const CommitGraph& graph)
        : count_(graph.size()), words_((count_ + 63) / 64), bits_(count_ * words_, 0) {
        for (std::uint32_t i = 0; i < count_; ++i) {
            std::uint64_t* row = row_ptr(i);
            for (const auto& parent : graph.record_at(i).parents) {
                const std::uint64_t* prow = row_ptr(graph.topo_index(parent));
                for (std::size_t w = 0; w < words_; ++w) row[w] |= prow[w];
            }
            row[i / 64] |= std::uint64_t(1) << (i % 64);
        }
    }

    bool contains(std::uint32_t commit, std::uint32_t ancestor) const {
        return (row_ptr(commit)[ancestor / 64] >> (ancestor % 64)) & 1;
    }

    // Sorted topo indices of the commit's ancestor set.
    std::vector<std::uint32_t> indices_of(std::uint32_t commit) const {
        std::vector<std::uint32_t> out;
        const std::uint64_t* row = row_ptr(commit);
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = row[w];
            while (bits) {
                unsigned bit = static_cast<unsigned>(__builtin_ctzll(bits));
                out.push_back(static_cast<std::uint32_t>(w * 64 + bit));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::size_t commit_count() const { return count_; }

private:
    const std::uint64_t* row_ptr(std::uint32_t i) const { return bits_.data() + i * words_; }
    std::uint64_t* row_ptr(std::uint32_t i) { return bits_.data() + i * words_; }

    std::size_t count_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

inline AncestorSets ancestor_sets(const CommitGraph& graph) { return AncestorSets(graph); }

// Commits reachable from the merge's second parent but not its first parent,
// plus the merge commit itself; the work being merged in.  Topo-ordered.
inline std::vector<CommitId> merged_branch(const CommitGraph& graph,
                                           const AncestorSets& ancestors,
                                           const CommitId& merge) {
    const CommitRecord& rec = graph.record(merge);
    if (!rec.is_merge()) throw NotAMerge(merge + " is not a 2-way merge commit");
    std::uint32_t first = graph.topo_index(rec.parents[0]);
    std::uint32_t second = graph.topo_index(rec.parents[1]);
    std::vector<CommitId> branch;
    for (std::uint32_t idx : ancestors.indices_of(second))
        if (!ancestors.contains(first, idx)) branch.push_back(graph.record_at(idx).id);
    branch.push_back(merge);
    return branch;
}

struct PathDecision {
    bool accepted = true;
    // The offending pair when rejected (topo order, earlier first).
    CommitId first;
    CommitId second;
};

// A merge commit is anchored to its second parent: a root-to-HEAD path that
// passes through the merge must have entered it through the merged branch.
inline std::uint32_t path_anchor(const CommitGraph& graph, const CommitRecord& rec) {
    return rec.is_merge() ? graph.topo_index(rec.parents[1]) : graph.topo_index(rec.id);
}

// Accepts iff the linked commits all sit on one root-to-HEAD path, entering
// every linked merge through the branch it merges.  Checked pairwise: c
// precedes d iff c is an ancestor of d's anchor.
inline PathDecision path_requirement(const CommitGraph& graph, const AncestorSets& ancestors,
                                     std::span<const CommitId> linked) {
    if (linked.empty()) throw InvalidGraph("path_requirement: no linked commits");
    struct Node {
        std::uint32_t self;
        std::uint32_t anchor;
    };
    std::vector<Node> nodes;
    nodes.reserve(linked.size());
    std::uint32_t head_idx = graph.topo_index(graph.head());
    for (const auto& id : linked) {
        const CommitRecord& rec = graph.record(id);
        std::uint32_t self = graph.topo_index(id);
        if (!ancestors.contains(head_idx, self)) return {false, id, graph.head()};
        nodes.push_back({self, path_anchor(graph, rec)});
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            bool i_before_j = ancestors.contains(nodes[j].anchor, nodes[i].self);
            bool j_before_i = ancestors.contains(nodes[i].anchor, nodes[j].self);
            if (!i_before_j && !j_before_i) {
                std::size_t a = i, b = j;
                if (nodes[a].self > nodes[b].self) std::swap(a, b);
                return {false, graph.record_at(nodes[a].self).id,
                        graph.record_at(nodes[b].self).id};
            }
        }
    }
    return {};
}

struct EntryPoint {
    CommitId entry;           // the one branch commit entered from outside
    CommitId apriori_parent;  // its single parent outside the branch
};

// The merged branch has a unique entry point iff exactly one branch commit
// has exactly one parent outside the branch and no other branch commit has
// any outside parent.
inline std::optional<EntryPoint> unique_entry_point(const CommitGraph& graph,
                                                    const AncestorSets& ancestors,
                                                    const CommitId& merge) {
    std::vector<CommitId> branch = merged_branch(graph, ancestors, merge);
    branch.pop_back();  // drop the merge commit itself
    std::unordered_set<CommitId> in_branch(branch.begin(), branch.end());
    std::optional<EntryPoint> entry;
    for (const auto& id : branch) {
        std::vector<const CommitId*> outside;
        for (const auto& parent : graph.record(id).parents)
            if (!in_branch.count(parent)) outside.push_back(&parent);
        if (outside.empty()) continue;
        if (entry || outside.size() != 1) return std::nullopt;
        entry = EntryPoint{id, *outside[0]};
    }
    return entry;
}

}  // namespace fileloc
