#pragma once

// Shared test fixtures: in-memory commit graphs (including the merge
// topologies from the linking algorithms' reference diagrams) and scripted
// git repositories built with plumbing commands for full parent/timestamp
// control.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fileloc/commit_graph.hpp"
#include "fileloc/git.hpp"

namespace testsupport {

namespace fs = std::filesystem;

struct GraphSpec {
    std::string id;
    std::vector<std::string> parents;
    std::string summary = "";
    std::int64_t time = 0;
};

inline fileloc::CommitGraph make_graph(std::vector<GraphSpec> specs, const std::string& head) {
    std::vector<fileloc::CommitRecord> records;
    std::int64_t fallback_time = 100;
    for (auto& spec : specs) {
        std::int64_t t = spec.time ? spec.time : fallback_time;
        fallback_time += 100;
        records.push_back({spec.id, spec.parents, spec.summary, t});
    }
    return fileloc::CommitGraph::build(std::move(records), head);
}

// The ten-commit graph with three merges used throughout the ancestor-set
// and entry-point tests:
//
//   1 - 2 - 3 - M1 - 4 - M3        M1 merges 5; M3 merges 6; M2 merges 7
//        \- 5 - M2 - 6 -/
//        \- 7 -/
inline fileloc::CommitGraph ten_commit_graph(
    const std::vector<std::pair<std::string, std::string>>& summaries = {}) {
    std::vector<GraphSpec> specs = {
        {"1", {}}, {"2", {"1"}}, {"3", {"2"}}, {"5", {"2"}}, {"7", {"2"}},
        {"M2", {"5", "7"}}, {"6", {"M2"}}, {"M1", {"3", "5"}}, {"4", {"M1"}},
        {"M3", {"4", "6"}},
    };
    for (auto& spec : specs)
        for (const auto& [id, summary] : summaries)
            if (spec.id == id) spec.summary = summary;
    return make_graph(std::move(specs), "M3");
}

// Mainline with one merged feature branch; the four path-requirement example
// configurations live here:
//
//   1 - 2 - 3 - M - 7
//        \- 5 - 6 -/
inline fileloc::CommitGraph branch_merge_graph(
    const std::vector<std::pair<std::string, std::string>>& summaries = {}) {
    std::vector<GraphSpec> specs = {
        {"1", {}}, {"2", {"1"}}, {"3", {"2"}}, {"5", {"2"}}, {"6", {"5"}},
        {"M", {"3", "6"}}, {"7", {"M"}},
    };
    for (auto& spec : specs)
        for (const auto& [id, summary] : summaries)
            if (spec.id == id) spec.summary = summary;
    return make_graph(std::move(specs), "7");
}

class TempDir {
public:
    TempDir() {
        auto base = fs::temp_directory_path();
        std::random_device rd;
        std::mt19937_64 rng(rd());
        for (int attempt = 0; attempt < 32; ++attempt) {
            fs::path candidate = base / ("fileloc_test_" + std::to_string(rng()));
            std::error_code ec;
            if (fs::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Scripted git repository.  Commits are created with plumbing (write-tree +
// commit-tree) so parent lists, merge structure and timestamps are exact.
class GitFixture {
public:
    explicit GitFixture(fs::path dir) : dir_(std::move(dir)) {
        run({"init", "-q", "-b", "main", dir_.string()}, true);
    }

    const fs::path& dir() const { return dir_; }

    void write(const std::string& rel, const std::string& content) {
        fs::path p = dir_ / rel;
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << content;
    }

    void remove(const std::string& rel) { fs::remove(dir_ / rel); }

    // Commits the current worktree state with the given parents; returns the
    // new commit id.  Timestamps increase monotonically unless given.
    std::string commit(const std::string& message, const std::vector<std::string>& parents = {},
                       std::int64_t time = 0) {
        if (time == 0) time = next_time_ += 60;
        run({"add", "-A"});
        std::string tree = trim(run({"write-tree"}));
        std::vector<std::string> argv = {"env",
                                         "GIT_AUTHOR_NAME=test",
                                         "GIT_AUTHOR_EMAIL=test@example.com",
                                         "GIT_COMMITTER_NAME=test",
                                         "GIT_COMMITTER_EMAIL=test@example.com",
                                         "GIT_AUTHOR_DATE=@" + std::to_string(time) + " +0000",
                                         "GIT_COMMITTER_DATE=@" + std::to_string(time) + " +0000",
                                         "git",
                                         "-C",
                                         dir_.string(),
                                         "commit-tree",
                                         tree,
                                         "-m",
                                         message};
        for (const auto& parent : parents) {
            argv.push_back("-p");
            argv.push_back(parent);
        }
        auto result = fileloc::run_command(argv);
        if (!result.ok()) throw std::runtime_error("commit-tree failed: " + result.err);
        std::string sha = trim(result.out);
        run({"update-ref", "refs/heads/main", sha});
        last_ = sha;
        return sha;
    }

    const std::string& head() const { return last_; }

private:
    std::string run(std::vector<std::string> args, bool no_chdir = false) {
        std::vector<std::string> argv = {"git"};
        if (!no_chdir) {
            argv.push_back("-C");
            argv.push_back(dir_.string());
        }
        for (auto& a : args) argv.push_back(std::move(a));
        auto result = fileloc::run_command(argv);
        if (!result.ok())
            throw std::runtime_error("git failed (" + argv[no_chdir ? 1 : 3] +
                                     "): " + result.err);
        return result.out;
    }

    static std::string trim(std::string s) {
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
        return s;
    }

    fs::path dir_;
    std::string last_;
    std::int64_t next_time_ = 1700000000;
};

}  // namespace testsupport
