#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "histmine/core.hpp"
#include "histmine/detail/time.hpp"
#include "histmine/error.hpp"

namespace histmine {

/// Loads development notes from a directory of `YYYY-MM-DD[-slug].md` or
/// `.txt` files. The date comes from the filename (midnight UTC); a slug
/// starting with "discussion" marks the note as a discussion rather than a
/// meeting note. Files whose name does not parse are skipped with a
/// warning; unreadable files are fatal.
inline std::vector<NoteRecord> load_notes(const std::filesystem::path& dir,
                                          std::vector<std::string>* warnings = nullptr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw Error(ErrorKind::io, "notes directory not found: " + dir.string());

    std::vector<std::pair<std::string, NoteRecord>> rows;  // (filename, record)
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& path = entry.path();
        const std::string ext = path.extension().string();
        if (ext != ".md" && ext != ".txt") continue;
        const std::string stem = path.stem().string();

        auto ts = stem.size() >= 10 ? detail::parse_rfc3339(stem.substr(0, 10) + "T00:00:00Z")
                                    : std::nullopt;
        const bool separator_ok =
            stem.size() == 10 || (stem.size() > 11 && stem[10] == '-');
        if (!ts || !separator_ok || *ts < 0) {
            if (warnings)
                warnings->push_back("skipping note with unparseable date: " +
                                    path.filename().string());
            continue;
        }

        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::io, "cannot read note: " + path.string());
        std::ostringstream body;
        body << in.rdbuf();

        NoteRecord note;
        note.timestamp = *ts;
        note.title = stem.size() > 11 ? stem.substr(11) : stem;
        note.body = body.str();
        note.kind = note.title.rfind("discussion", 0) == 0 ? NoteKind::discussion
                                                           : NoteKind::meeting_note;
        rows.emplace_back(path.filename().string(), std::move(note));
    }

    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second.timestamp != b.second.timestamp)
            return a.second.timestamp < b.second.timestamp;
        return a.first < b.first;  // stable tiebreak: filename
    });

    std::vector<NoteRecord> notes;
    notes.reserve(rows.size());
    for (auto& [name, note] : rows) notes.push_back(std::move(note));
    return notes;
}

} // namespace histmine
