#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "histmine/detail/time.hpp"
#include "histmine/error.hpp"

namespace histmine {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

enum class MetricKind { sloc, classes };

inline std::string_view to_string(MetricKind kind) {
    return kind == MetricKind::sloc ? "sloc" : "classes";
}

inline std::optional<MetricKind> metric_kind_from_string(std::string_view name) {
    if (name == "sloc") return MetricKind::sloc;
    if (name == "classes") return MetricKind::classes;
    return std::nullopt;
}

struct FileEntry {
    std::string path;     // relative, forward slashes
    std::string content;  // raw bytes
    friend bool operator==(const FileEntry&, const FileEntry&) = default;
};

struct FileSet {
    std::vector<FileEntry> entries;
    friend bool operator==(const FileSet&, const FileSet&) = default;
};

/// One committed revision of the project under analysis.
struct VersionRecord {
    int seq = 0;  // 1-based position in the history
    std::string id;
    Timestamp timestamp = 0;
    std::string author;
    std::string message;
    std::optional<FileSet> snapshot;
    std::map<MetricKind, std::int64_t> precomputed;

    bool has_metric(MetricKind kind) const { return precomputed.count(kind) > 0; }
    friend bool operator==(const VersionRecord&, const VersionRecord&) = default;
};

enum class NoteKind { meeting_note, discussion };

struct NoteRecord {
    Timestamp timestamp = 0;
    std::string title;
    std::string body;
    NoteKind kind = NoteKind::meeting_note;
    friend bool operator==(const NoteRecord&, const NoteRecord&) = default;
};

struct VersionHistory {
    std::string project_name;
    std::vector<VersionRecord> records;
    // Set when the history came from a VCS adapter; snapshots of such
    // histories are materialized on demand from the repository.
    std::string source_repo;

    int size() const { return static_cast<int>(records.size()); }
    friend bool operator==(const VersionHistory&, const VersionHistory&) = default;
};

struct Violation {
    int seq = 0;
    std::string description;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every history invariant without throwing: non-empty, seq
/// contiguous from 1, timestamps non-decreasing, and each record backed by
/// a snapshot or a precomputed metric (VCS-backed histories satisfy the
/// latter implicitly).
inline ValidationReport validate_history(const VersionHistory& history) {
    ValidationReport report;
    if (history.records.empty()) {
        report.violations.push_back({0, "history is empty"});
        return report;
    }
    int expected = 1;
    Timestamp prev_ts = history.records.front().timestamp;
    bool first = true;
    for (const auto& rec : history.records) {
        if (rec.seq != expected) {
            if (!first && rec.seq == expected - 1)
                report.violations.push_back(
                    {rec.seq, "duplicate sequence number " + std::to_string(rec.seq)});
            else
                report.violations.push_back(
                    {rec.seq, "non-contiguous sequence: expected " + std::to_string(expected) +
                                  ", found " + std::to_string(rec.seq)});
            expected = rec.seq + 1;
        } else {
            ++expected;
        }
        if (!first && rec.timestamp < prev_ts)
            report.violations.push_back(
                {rec.seq, "timestamp decreases at seq " + std::to_string(rec.seq)});
        if (!rec.snapshot && rec.precomputed.empty() && history.source_repo.empty())
            report.violations.push_back(
                {rec.seq, "no snapshot or precomputed metrics at seq " + std::to_string(rec.seq)});
        prev_ts = rec.timestamp;
        first = false;
    }
    return report;
}

} // namespace histmine
