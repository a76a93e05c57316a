#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "histmine/core.hpp"
#include "histmine/error.hpp"

namespace histmine {

/// Line-counting rules. Defaults target Java-like sources; everything is
/// configurable. The scanner has no string-literal awareness: a quoted
/// "/*" opens a block comment. Acceptable at the granularity these curves
/// are used for.
struct CountingRules {
    std::vector<std::string> source_extensions = {".java"};
    std::vector<std::string> line_comment_prefixes = {"//"};
    std::vector<std::pair<std::string, std::string>> block_comment_delims = {{"/*", "*/"}};
    bool count_blank = false;
    bool count_comment_only = false;

    void validate() const {
        if (source_extensions.empty())
            throw Error(ErrorKind::config, "counting rules need at least one source extension");
        for (const auto& [open, close] : block_comment_delims)
            if (open.empty() || close.empty())
                throw Error(ErrorKind::config, "block comment delimiters must be non-empty");
    }
};

/// Regular expressions matched per (comment-stripped) line to count type
/// declarations. Each pattern must anchor its keyword on a word boundary.
struct ClassPatterns {
    std::vector<std::string> patterns = {R"(\bclass\s+[A-Za-z_][A-Za-z0-9_]*)"};

    std::vector<std::regex> compile() const {
        std::vector<std::regex> compiled;
        compiled.reserve(patterns.size());
        for (const auto& p : patterns) {
            if (p.find("\\b") == std::string::npos)
                throw Error(ErrorKind::config,
                            "class pattern lacks a word-boundary anchor: " + p);
            try {
                compiled.emplace_back(p, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw Error(ErrorKind::config,
                            "class pattern does not compile: " + p + " (" + e.what() + ")");
            }
        }
        return compiled;
    }
};

/// Per-version values of one metric, aligned to the history: index i holds
/// the value at seq i+1.
struct MetricSeries {
    MetricKind kind = MetricKind::sloc;
    std::vector<double> values;
    bool normalized = false;
    std::vector<std::string> warnings;

    int length() const { return static_cast<int>(values.size()); }
    double at_seq(int seq) const {
        if (seq < 1 || seq > length())
            throw Error(ErrorKind::config, "seq out of range: " + std::to_string(seq));
        return values[static_cast<size_t>(seq - 1)];
    }
};

namespace detail {

enum class LineClass { blank, comment_only, code };

inline bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

inline bool has_extension(std::string_view path, const std::vector<std::string>& extensions) {
    for (const auto& ext : extensions)
        if (path.size() >= ext.size() &&
            path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
            return true;
    return false;
}

inline bool looks_binary(std::string_view content) {
    return content.find('\0') != std::string_view::npos;
}

// Classifies every physical line of one file, tracking block comments
// across lines. Calls visit(line_class, stripped_content) per line, where
// stripped_content is the line with all comment text removed.
template <typename Visit>
void scan_lines(std::string_view content, const CountingRules& rules, Visit&& visit) {
    if (content.empty()) return;
    size_t line_start = 0;
    const std::pair<std::string, std::string>* open_block = nullptr;

    for (;;) {
        size_t line_end = content.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = content.size();
        std::string_view line = content.substr(line_start, line_end - line_start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::string visible;
        size_t i = 0;
        while (i < line.size()) {
            if (open_block) {
                size_t close = line.find(open_block->second, i);
                if (close == std::string_view::npos) {
                    i = line.size();
                } else {
                    i = close + open_block->second.size();
                    open_block = nullptr;
                }
                continue;
            }
            bool matched = false;
            for (const auto& prefix : rules.line_comment_prefixes) {
                if (line.compare(i, prefix.size(), prefix) == 0) {
                    i = line.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            for (const auto& delims : rules.block_comment_delims) {
                if (line.compare(i, delims.first.size(), delims.first) == 0) {
                    open_block = &delims;
                    i += delims.first.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            visible.push_back(line[i]);
            ++i;
        }

        LineClass cls;
        if (is_blank(line))
            cls = LineClass::blank;
        else if (is_blank(visible))
            cls = LineClass::comment_only;
        else
            cls = LineClass::code;
        visit(cls, std::string_view(visible));

        if (line_end == content.size()) break;
        line_start = line_end + 1;
        if (line_start == content.size()) break;  // trailing newline, no extra line
    }
}

} // namespace detail

/// Counts source lines of code across the snapshot: non-blank,
/// non-comment-only lines of files whose suffix is in the rules (blank and
/// comment-only lines are included when the corresponding flag is set).
/// Binary (undecodable) files count as zero lines and produce a warning.
inline std::int64_t count_sloc(const FileSet& snapshot, const CountingRules& rules,
                               std::vector<std::string>* warnings = nullptr) {
    rules.validate();
    std::int64_t total = 0;
    for (const auto& file : snapshot.entries) {
        if (!detail::has_extension(file.path, rules.source_extensions)) continue;
        if (detail::looks_binary(file.content)) {
            if (warnings) warnings->push_back("undecodable content in " + file.path);
            continue;
        }
        detail::scan_lines(file.content, rules, [&](detail::LineClass cls, std::string_view) {
            switch (cls) {
            case detail::LineClass::code: ++total; break;
            case detail::LineClass::comment_only:
                if (rules.count_comment_only) ++total;
                break;
            case detail::LineClass::blank:
                if (rules.count_blank) ++total;
                break;
            }
        });
    }
    return total;
}

/// Counts lines whose comment-stripped content matches any class pattern,
/// over the same source files count_sloc would consider.
inline std::int64_t count_classes(const FileSet& snapshot, const ClassPatterns& patterns,
                                  const CountingRules& rules = {},
                                  std::vector<std::string>* warnings = nullptr) {
    rules.validate();
    const std::vector<std::regex> compiled = patterns.compile();
    std::int64_t total = 0;
    for (const auto& file : snapshot.entries) {
        if (!detail::has_extension(file.path, rules.source_extensions)) continue;
        if (detail::looks_binary(file.content)) {
            if (warnings) warnings->push_back("undecodable content in " + file.path);
            continue;
        }
        detail::scan_lines(file.content, rules,
                           [&](detail::LineClass cls, std::string_view visible) {
                               if (cls != detail::LineClass::code) return;
                               for (const auto& re : compiled) {
                                   if (std::regex_search(visible.begin(), visible.end(), re)) {
                                       ++total;
                                       return;
                                   }
                               }
                           });
    }
    return total;
}

/// Resolves snapshots for records that do not carry one inline (VCS-backed
/// histories materialize per revision on demand).
using SnapshotProvider = std::function<std::optional<FileSet>(const VersionRecord&)>;

/// Builds the per-version series of one metric. Precomputed values take
/// precedence; otherwise the value is computed from the record's snapshot
/// (inline or via provider). A record with neither is an error.
inline MetricSeries build_series(const VersionHistory& history, MetricKind kind,
                                 const CountingRules& rules = {},
                                 const ClassPatterns& patterns = {},
                                 const SnapshotProvider& provider = {}) {
    MetricSeries series;
    series.kind = kind;
    series.values.reserve(history.records.size());
    for (const auto& rec : history.records) {
        if (rec.has_metric(kind)) {
            series.values.push_back(static_cast<double>(rec.precomputed.at(kind)));
            continue;
        }
        std::optional<FileSet> materialized;
        const FileSet* snapshot = nullptr;
        if (rec.snapshot) {
            snapshot = &*rec.snapshot;
        } else if (provider) {
            materialized = provider(rec);
            if (materialized) snapshot = &*materialized;
        }
        if (!snapshot)
            throw Error(ErrorKind::invariant,
                        "no metric source at seq " + std::to_string(rec.seq));
        std::vector<std::string> file_warnings;
        std::int64_t value = kind == MetricKind::sloc
                                 ? count_sloc(*snapshot, rules, &file_warnings)
                                 : count_classes(*snapshot, patterns, rules, &file_warnings);
        for (auto& w : file_warnings)
            series.warnings.push_back("seq " + std::to_string(rec.seq) + ": " + w);
        series.values.push_back(static_cast<double>(value));
    }
    return series;
}

/// Divides every value by the series maximum. A zero maximum yields an
/// all-zero series plus a degenerate-series warning so downstream
/// detectors still run.
inline MetricSeries normalize(const MetricSeries& series) {
    if (series.normalized)
        throw Error(ErrorKind::config, "series is already normalized");
    MetricSeries out = series;
    out.normalized = true;
    const double max = series.values.empty()
                           ? 0.0
                           : *std::max_element(series.values.begin(), series.values.end());
    if (max <= 0.0) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        out.warnings.push_back("degenerate series: maximum is 0, normalized values are all 0");
        return out;
    }
    for (auto& v : out.values) v /= max;
    return out;
}

} // namespace histmine
