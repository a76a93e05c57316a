#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "histmine/core.hpp"
#include "histmine/detail/base64.hpp"
#include "histmine/detail/time.hpp"
#include "histmine/error.hpp"

namespace histmine {

namespace detail {

inline VersionRecord record_from_json(const nlohmann::json& obj, int line_no) {
    auto fail = [&](const std::string& what) -> Error {
        return Error(ErrorKind::parse,
                     "malformed line " + std::to_string(line_no) + ": " + what);
    };
    if (!obj.is_object()) throw fail("not a JSON object");
    for (const char* key : {"seq", "id", "timestamp", "author", "message"})
        if (!obj.contains(key)) throw fail(std::string("missing key \"") + key + "\"");

    VersionRecord rec;
    if (!obj["seq"].is_number_integer() || obj["seq"].get<std::int64_t>() < 1)
        throw fail("\"seq\" must be a positive integer");
    rec.seq = obj["seq"].get<int>();
    rec.id = obj["id"].get<std::string>();
    auto ts = parse_rfc3339(obj["timestamp"].get<std::string>());
    if (!ts) throw fail("\"timestamp\" is not a valid RFC 3339 instant");
    rec.timestamp = *ts;
    rec.author = obj["author"].get<std::string>();
    rec.message = obj["message"].get<std::string>();

    if (obj.contains("metrics")) {
        const auto& metrics = obj["metrics"];
        if (!metrics.is_object()) throw fail("\"metrics\" must be an object");
        for (const auto& [key, value] : metrics.items()) {
            auto kind = metric_kind_from_string(key);
            if (!kind) throw fail("unknown metric kind \"" + key + "\"");
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
                throw fail("metric \"" + key + "\" must be a non-negative integer");
            rec.precomputed[*kind] = value.get<std::int64_t>();
        }
    }
    if (obj.contains("files")) {
        const auto& files = obj["files"];
        if (!files.is_array()) throw fail("\"files\" must be an array");
        FileSet snapshot;
        for (const auto& f : files) {
            if (!f.is_object() || !f.contains("path") || !f.contains("content_base64"))
                throw fail("file entries need \"path\" and \"content_base64\"");
            auto content = base64_decode(f["content_base64"].get<std::string>());
            if (!content) throw fail("invalid base64 content");
            snapshot.entries.push_back({f["path"].get<std::string>(), std::move(*content)});
        }
        rec.snapshot = std::move(snapshot);
    }
    if (!rec.snapshot && rec.precomputed.empty())
        throw fail("record has neither \"files\" nor \"metrics\"");
    return rec;
}

inline nlohmann::json record_to_json(const VersionRecord& rec) {
    nlohmann::json obj;
    obj["seq"] = rec.seq;
    obj["id"] = rec.id;
    obj["timestamp"] = format_rfc3339(rec.timestamp);
    obj["author"] = rec.author;
    obj["message"] = rec.message;
    if (!rec.precomputed.empty()) {
        nlohmann::json metrics = nlohmann::json::object();
        for (const auto& [kind, value] : rec.precomputed)
            metrics[std::string(to_string(kind))] = value;
        obj["metrics"] = std::move(metrics);
    }
    if (rec.snapshot) {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& entry : rec.snapshot->entries)
            files.push_back({{"path", entry.path},
                             {"content_base64", base64_encode(entry.content)}});
        obj["files"] = std::move(files);
    }
    return obj;
}

} // namespace detail

/// Loads a history from the JSONL export format: one version object per
/// line, UTF-8. Records are sorted by seq and every history invariant is
/// enforced; violations are reported with the offending line number.
inline VersionHistory load_history_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open history file: " + path.string());

    std::vector<std::pair<int, VersionRecord>> rows;  // (line number, record)
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::parse, "malformed line " + std::to_string(line_no) +
                                              ": " + e.what());
        }
        rows.emplace_back(line_no, detail::record_from_json(obj, line_no));
    }
    if (rows.empty())
        throw Error(ErrorKind::invariant, "empty history: " + path.string());

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second.seq < b.second.seq; });

    VersionHistory history;
    history.project_name = path.stem().string();
    history.records.reserve(rows.size());
    int expected = 1;
    Timestamp prev_ts = 0;
    for (auto& [row_line, rec] : rows) {
        if (rec.seq == expected - 1)
            throw Error(ErrorKind::invariant,
                        "duplicate sequence " + std::to_string(rec.seq) + " at line " +
                            std::to_string(row_line));
        if (rec.seq != expected)
            throw Error(ErrorKind::invariant,
                        "non-contiguous sequence at line " + std::to_string(row_line) +
                            ": expected " + std::to_string(expected) + ", found " +
                            std::to_string(rec.seq));
        if (expected > 1 && rec.timestamp < prev_ts)
            throw Error(ErrorKind::invariant,
                        "decreasing timestamp at line " + std::to_string(row_line) +
                            " (seq " + std::to_string(rec.seq) + ")");
        prev_ts = rec.timestamp;
        ++expected;
        history.records.push_back(std::move(rec));
    }
    return history;
}

/// Writes a history in the JSONL export format, one object per line.
inline void write_history_jsonl(const VersionHistory& history,
                                const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::io, "cannot write history file: " + path.string());
    for (const auto& rec : history.records)
        out << detail::record_to_json(rec).dump() << '\n';
    if (!out)
        throw Error(ErrorKind::io, "write failed: " + path.string());
}

} // namespace histmine
