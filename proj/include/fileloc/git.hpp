#pragma once

// Subprocess-based access to a local git repository.  All reads go through
// the git executable (override with the FILELOC_GIT environment variable);
// no network access, no libgit2 dependency.

#include <csignal>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fileloc/errors.hpp"

namespace fileloc {

struct CommandResult {
    int status = -1;
    std::string out;
    std::string err;
    bool ok() const { return status == 0; }
};

namespace detail {

inline void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

inline void set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace detail

// Runs argv[0] with the given arguments, feeding stdin_data (if any) and
// capturing stdout/stderr.  Streams are pumped with poll() so large inputs
// and outputs cannot deadlock against pipe buffers.
inline CommandResult run_command(const std::vector<std::string>& argv,
                                 std::string_view stdin_data = {}) {
    if (argv.empty()) throw IoError("run_command: empty argv");
    // A child that exits early would otherwise kill us with SIGPIPE on write.
    [[maybe_unused]] static const auto sigpipe_ignored = ::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
        throw IoError("pipe() failed: " + std::string(std::strerror(errno)));

    pid_t pid = ::fork();
    if (pid < 0) throw IoError("fork() failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int* p : {in_pipe, out_pipe, err_pipe}) {
            ::close(p[0]);
            ::close(p[1]);
        }
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        ::_exit(127);
    }

    int in_fd = in_pipe[1], out_fd = out_pipe[0], err_fd = err_pipe[0];
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    detail::set_nonblocking(in_fd);
    detail::set_nonblocking(out_fd);
    detail::set_nonblocking(err_fd);
    if (stdin_data.empty()) detail::close_fd(in_fd);

    CommandResult result;
    std::size_t written = 0;
    char buf[65536];
    while (out_fd >= 0 || err_fd >= 0 || in_fd >= 0) {
        struct pollfd fds[3];
        int nfds = 0;
        int in_slot = -1, out_slot = -1, err_slot = -1;
        if (in_fd >= 0) {
            in_slot = nfds;
            fds[nfds++] = {in_fd, POLLOUT, 0};
        }
        if (out_fd >= 0) {
            out_slot = nfds;
            fds[nfds++] = {out_fd, POLLIN, 0};
        }
        if (err_fd >= 0) {
            err_slot = nfds;
            fds[nfds++] = {err_fd, POLLIN, 0};
        }
        if (::poll(fds, static_cast<nfds_t>(nfds), -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
                detail::close_fd(in_fd);  // child stopped reading
            } else {
                ssize_t n = ::write(in_fd, stdin_data.data() + written,
                                    stdin_data.size() - written);
                if (n > 0) written += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN && errno != EINTR) detail::close_fd(in_fd);
                if (written == stdin_data.size()) detail::close_fd(in_fd);
            }
        }
        auto drain = [&](int slot, int& fd, std::string& sink) {
            if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
            ssize_t n = ::read(fd, buf, sizeof buf);
            if (n > 0)
                sink.append(buf, static_cast<std::size_t>(n));
            else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR))
                detail::close_fd(fd);
        };
        drain(out_slot, out_fd, result.out);
        drain(err_slot, err_fd, result.err);
    }

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct RawCommit {
    std::string id;
    std::vector<std::string> parents;
    std::int64_t author_time = 0;
    std::string summary;  // first line of the message
};

struct TreeEntry {
    std::string oid;
    std::string path;
};

enum class ChangeKind { added, modified, deleted, renamed, type_changed, copied };

struct DiffEntry {
    ChangeKind kind;
    std::string path;      // pre-image path (post-image for pure additions)
    std::string new_path;  // set for renames/copies
};

class GitRepo {
public:
    explicit GitRepo(std::filesystem::path root) : root_(std::move(root)) {
        const char* env = std::getenv("FILELOC_GIT");
        git_ = (env && *env) ? env : "git";
        auto res = run({"rev-parse", "--git-dir"});
        if (!res.ok())
            throw RepoNotFound("not a git repository: " + root_.string());
    }

    const std::filesystem::path& root() const { return root_; }

    std::string rev_parse(const std::string& ref) const {
        auto res = run({"rev-parse", "--verify", ref + "^{commit}"});
        if (!res.ok())
            throw RefNotFound("cannot resolve '" + ref + "' in " + root_.string());
        return trim(res.out);
    }

    // All commits reachable from `head`, parent order as recorded by git.
    std::vector<RawCommit> log_from(const std::string& head) const {
        auto res = run({"log", "--format=%H%x1f%P%x1f%at%x1f%B%x1e", head});
        if (!res.ok())
            throw RefNotFound("git log failed for '" + head + "': " + trim(res.err));
        std::vector<RawCommit> commits;
        for (std::string_view record : split(res.out, '\x1e')) {
            record = trim_view(record);
            if (record.empty()) continue;
            auto fields = split(record, '\x1f');
            if (fields.size() < 4)
                throw IoError("unparseable git log record");
            RawCommit c;
            c.id = std::string(fields[0]);
            for (auto p : split(fields[1], ' '))
                if (!p.empty()) c.parents.emplace_back(p);
            c.author_time = std::strtoll(std::string(fields[2]).c_str(), nullptr, 10);
            std::string_view body = fields[3];
            auto eol = body.find('\n');
            std::string_view first = eol == std::string_view::npos ? body : body.substr(0, eol);
            if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
            c.summary = std::string(first);
            commits.push_back(std::move(c));
        }
        return commits;
    }

    // Blobs (path + object id) in the tree of `commit`, recursively.
    std::vector<TreeEntry> ls_tree(const std::string& commit) const {
        auto res = run({"ls-tree", "-r", "-z", commit});
        if (!res.ok())
            throw GitObjectMissing("ls-tree failed for " + commit + ": " + trim(res.err));
        std::vector<TreeEntry> entries;
        for (std::string_view rec : split(res.out, '\0')) {
            if (rec.empty()) continue;
            // "<mode> <type> <oid>\t<path>"
            auto tab = rec.find('\t');
            if (tab == std::string_view::npos) continue;
            auto meta = rec.substr(0, tab);
            auto fields = split(meta, ' ');
            if (fields.size() != 3 || fields[1] != "blob") continue;  // skip submodules
            entries.push_back({std::string(fields[2]), std::string(rec.substr(tab + 1))});
        }
        return entries;
    }

    // Name-status diff of `commit` against the given parent (or the empty
    // tree for root commits), with rename detection.
    std::vector<DiffEntry> diff_against(const std::string& parent,
                                        const std::string& commit) const {
        std::vector<std::string> args = {"diff-tree", "-r",    "--no-commit-id",
                                         "--find-renames",     "--name-status", "-z"};
        if (parent.empty()) {
            args.push_back("--root");
            args.push_back(commit);
        } else {
            args.push_back(parent);
            args.push_back(commit);
        }
        auto res = run(args);
        if (!res.ok())
            throw GitObjectMissing("diff-tree failed for " + commit + ": " + trim(res.err));
        std::vector<DiffEntry> entries;
        auto fields = split(res.out, '\0');
        for (std::size_t i = 0; i + 1 < fields.size();) {
            std::string_view status = fields[i];
            if (status.empty()) {
                ++i;
                continue;
            }
            DiffEntry e;
            bool two_paths = false;
            switch (status[0]) {
                case 'A': e.kind = ChangeKind::added; break;
                case 'M': e.kind = ChangeKind::modified; break;
                case 'D': e.kind = ChangeKind::deleted; break;
                case 'T': e.kind = ChangeKind::type_changed; break;
                case 'R':
                    e.kind = ChangeKind::renamed;
                    two_paths = true;
                    break;
                case 'C':
                    e.kind = ChangeKind::copied;
                    two_paths = true;
                    break;
                default: throw IoError("unknown diff status: " + std::string(status));
            }
            e.path = std::string(fields[i + 1]);
            if (two_paths) {
                if (i + 2 >= fields.size()) throw IoError("truncated rename record");
                e.new_path = std::string(fields[i + 2]);
                i += 3;
            } else {
                i += 2;
            }
            entries.push_back(std::move(e));
        }
        return entries;
    }

    // Bulk blob reads through a single `cat-file --batch` invocation.
    std::vector<std::string> read_blobs(const std::vector<std::string>& oids) const {
        if (oids.empty()) return {};
        std::string input;
        for (const auto& oid : oids) {
            input += oid;
            input += '\n';
        }
        auto res = run({"cat-file", "--batch"}, input);
        if (!res.ok())
            throw GitObjectMissing("cat-file --batch failed: " + trim(res.err));
        std::vector<std::string> blobs;
        blobs.reserve(oids.size());
        const std::string& out = res.out;
        std::size_t pos = 0;
        for (const auto& oid : oids) {
            auto eol = out.find('\n', pos);
            if (eol == std::string::npos)
                throw GitObjectMissing("truncated cat-file output");
            std::string header = out.substr(pos, eol - pos);
            auto fields = split(header, ' ');
            if (fields.size() >= 2 && fields[1] == "missing")
                throw GitObjectMissing("object missing: " + oid);
            if (fields.size() != 3)
                throw GitObjectMissing("unexpected cat-file header: " + header);
            std::size_t size = std::strtoull(std::string(fields[2]).c_str(), nullptr, 10);
            pos = eol + 1;
            if (pos + size > out.size())
                throw GitObjectMissing("truncated cat-file payload for " + oid);
            blobs.emplace_back(out.substr(pos, size));
            pos += size + 1;  // trailing newline after the payload
        }
        return blobs;
    }

    std::int64_t commit_time(const std::string& commit) const {
        auto res = run({"show", "-s", "--format=%at", commit});
        if (!res.ok())
            throw GitObjectMissing("cannot read commit " + commit);
        return std::strtoll(trim(res.out).c_str(), nullptr, 10);
    }

    CommandResult run(std::vector<std::string> args, std::string_view stdin_data = {}) const {
        std::vector<std::string> argv = {git_, "-C", root_.string()};
        for (auto& a : args) argv.push_back(std::move(a));
        return run_command(argv, stdin_data);
    }

private:
    static std::string_view trim_view(std::string_view s) {
        while (!s.empty() && (s.front() == '\n' || s.front() == '\r' || s.front() == ' '))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
            s.remove_suffix(1);
        return s;
    }
    static std::string trim(const std::string& s) { return std::string(trim_view(s)); }

    static std::vector<std::string_view> split(std::string_view s, char sep) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (start <= s.size()) {
            auto end = s.find(sep, start);
            if (end == std::string_view::npos) {
                parts.push_back(s.substr(start));
                break;
            }
            parts.push_back(s.substr(start, end - start));
            start = end + 1;
        }
        return parts;
    }

    std::filesystem::path root_;
    std::string git_;
};

}  // namespace fileloc
