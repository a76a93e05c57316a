#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "histmine/core.hpp"
#include "histmine/detail/subprocess.hpp"
#include "histmine/error.hpp"

namespace histmine {

/// Binding of the generic VCS adapter contract. The reference adapter
/// drives the git command-line program; `branch` selects the line of
/// history to walk and `first_parent` linearizes across merges.
struct AdapterConfig {
    std::string program = "git";
    std::string branch = "HEAD";
    bool first_parent = true;
};

namespace detail {

inline CommandResult run_git(const std::filesystem::path& repo, const AdapterConfig& config,
                             std::vector<std::string> args,
                             const std::string& stdin_file = {}) {
    std::vector<std::string> argv{config.program, "-C", repo.string()};
    for (auto& a : args) argv.push_back(std::move(a));
    CommandResult result;
    try {
        result = run_command(argv, stdin_file);
    } catch (const Error& e) {
        throw Error(ErrorKind::external,
                    "adapter program unavailable (" + config.program + "): " + e.what());
    }
    if (result.exit_code == 127)
        throw Error(ErrorKind::external, "adapter program unavailable: " + config.program);
    return result;
}

// Writes text to a unique temporary file and returns its path; the caller
// removes it. Used to feed batch requests to the adapter without pipes.
inline std::filesystem::path write_temp_requests(const std::string& text) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    fs::path path = fs::temp_directory_path() /
                    ("histmine-batch-" + std::to_string(::getpid()) + "-" +
                     std::to_string(counter++) + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    return path;
}

} // namespace detail

/// Walks the configured branch oldest-first and returns one record per
/// revision with seq assigned 1..N. Snapshots are not inlined; use
/// materialize_snapshot to fetch a revision's file tree on demand.
inline VersionHistory ingest_vcs(const std::filesystem::path& repo_path,
                                 const AdapterConfig& config = {}) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(repo_path))
        throw Error(ErrorKind::io, "not a repository: " + repo_path.string());

    // Records NUL-terminated (-z); fields separated by 0x1f, which does
    // not occur in real commit metadata.
    std::vector<std::string> args{"log", "-z", "--reverse",
                                  "--format=%H%x1f%ct%x1f%an%x1f%B", config.branch, "--"};
    if (config.first_parent) args.insert(args.begin() + 1, "--first-parent");
    auto result = detail::run_git(repo_path, config, std::move(args));
    if (result.exit_code != 0) {
        if (result.err.find("not a git repository") != std::string::npos)
            throw Error(ErrorKind::io, "not a repository: " + repo_path.string());
        if (result.err.find("does not have any commits") != std::string::npos ||
            result.err.find("unknown revision") != std::string::npos)
            throw Error(ErrorKind::invariant, "empty history: " + repo_path.string());
        throw Error(ErrorKind::external, "adapter failed: " + result.err);
    }

    VersionHistory history;
    history.project_name = fs::absolute(repo_path).filename().string();
    history.source_repo = repo_path.string();

    size_t pos = 0;
    int seq = 0;
    while (pos < result.out.size()) {
        size_t end = result.out.find('\0', pos);
        if (end == std::string::npos) end = result.out.size();
        std::string chunk = result.out.substr(pos, end - pos);
        pos = end + 1;
        while (!chunk.empty() && (chunk.front() == '\n' || chunk.front() == '\r'))
            chunk.erase(chunk.begin());
        if (chunk.empty()) continue;

        size_t f1 = chunk.find('\x1f');
        size_t f2 = chunk.find('\x1f', f1 + 1);
        size_t f3 = chunk.find('\x1f', f2 + 1);
        if (f1 == std::string::npos || f2 == std::string::npos || f3 == std::string::npos)
            throw Error(ErrorKind::parse, "unexpected adapter output");

        VersionRecord rec;
        rec.seq = ++seq;
        rec.id = chunk.substr(0, f1);
        rec.timestamp = std::strtoll(chunk.substr(f1 + 1, f2 - f1 - 1).c_str(), nullptr, 10);
        rec.author = chunk.substr(f2 + 1, f3 - f2 - 1);
        rec.message = chunk.substr(f3 + 1);
        while (!rec.message.empty() &&
               (rec.message.back() == '\n' || rec.message.back() == '\r'))
            rec.message.pop_back();
        history.records.push_back(std::move(rec));
    }
    if (history.records.empty())
        throw Error(ErrorKind::invariant, "empty history: " + repo_path.string());
    return history;
}

/// Materializes the full file tree of one revision as an in-memory
/// FileSet. One adapter invocation lists the paths, a second streams all
/// blob contents in a single batch.
inline FileSet materialize_snapshot(const std::filesystem::path& repo_path,
                                    const std::string& revision,
                                    const AdapterConfig& config = {},
                                    std::vector<std::string>* warnings = nullptr) {
    namespace fs = std::filesystem;
    auto listing = detail::run_git(repo_path, config,
                                   {"ls-tree", "-r", "-z", "--name-only", revision});
    if (listing.exit_code != 0)
        throw Error(ErrorKind::external, "cannot list revision " + revision + ": " + listing.err);

    std::vector<std::string> paths;
    size_t pos = 0;
    while (pos < listing.out.size()) {
        size_t end = listing.out.find('\0', pos);
        if (end == std::string::npos) end = listing.out.size();
        if (end > pos) {
            std::string path = listing.out.substr(pos, end - pos);
            if (path.find('\n') != std::string::npos) {
                if (warnings)
                    warnings->push_back("skipping path with newline at revision " + revision);
            } else {
                paths.push_back(std::move(path));
            }
        }
        pos = end + 1;
    }

    FileSet snapshot;
    if (paths.empty()) return snapshot;

    std::string requests;
    for (const auto& p : paths) requests += revision + ":" + p + "\n";
    fs::path request_file = detail::write_temp_requests(requests);
    auto batch = detail::run_git(repo_path, config, {"cat-file", "--batch"},
                                 request_file.string());
    std::error_code ec;
    fs::remove(request_file, ec);
    if (batch.exit_code != 0)
        throw Error(ErrorKind::external, "cannot read revision " + revision + ": " + batch.err);

    // Batch output framing: "<oid> <type> <size>\n<size bytes>\n" per
    // request, or "<spec> missing\n".
    size_t cursor = 0;
    for (const auto& path : paths) {
        size_t header_end = batch.out.find('\n', cursor);
        if (header_end == std::string::npos)
            throw Error(ErrorKind::parse, "truncated adapter batch output");
        std::string header = batch.out.substr(cursor, header_end - cursor);
        cursor = header_end + 1;
        if (header.size() >= 7 && header.compare(header.size() - 7, 7, "missing") == 0) {
            if (warnings)
                warnings->push_back("missing blob for " + path + " at revision " + revision);
            continue;
        }
        size_t size_pos = header.rfind(' ');
        if (size_pos == std::string::npos)
            throw Error(ErrorKind::parse, "unexpected adapter batch header: " + header);
        size_t size = std::strtoull(header.c_str() + size_pos + 1, nullptr, 10);
        if (cursor + size > batch.out.size())
            throw Error(ErrorKind::parse, "truncated adapter batch output");
        snapshot.entries.push_back({path, batch.out.substr(cursor, size)});
        cursor += size + 1;  // trailing newline after each body
    }
    return snapshot;
}

} // namespace histmine
