#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "histmine/core.hpp"
#include "histmine/error.hpp"

namespace histmine {

/// Development-task categories, ordered by lifecycle position. Ties among
/// equally scored categories resolve to the later (higher) label: words
/// like "fix" are more specific signals than generic "add".
enum class TaskLabel {
    requirements = 0,
    research,
    functional,
    modification,
    testing,
    debugging,
    unclassified,
};

inline constexpr TaskLabel kClassifiableLabels[] = {
    TaskLabel::requirements, TaskLabel::research,  TaskLabel::functional,
    TaskLabel::modification, TaskLabel::testing,   TaskLabel::debugging,
};

inline std::string_view to_string(TaskLabel label) {
    switch (label) {
    case TaskLabel::requirements: return "requirements";
    case TaskLabel::research: return "research";
    case TaskLabel::functional: return "functional";
    case TaskLabel::modification: return "modification";
    case TaskLabel::testing: return "testing";
    case TaskLabel::debugging: return "debugging";
    case TaskLabel::unclassified: return "unclassified";
    }
    return "unclassified";
}

inline std::optional<TaskLabel> task_label_from_string(std::string_view name) {
    for (TaskLabel label : kClassifiableLabels)
        if (name == to_string(label)) return label;
    if (name == "unclassified") return TaskLabel::unclassified;
    return std::nullopt;
}

/// Category -> keyword mapping used to classify log messages and notes,
/// plus the stopword list applied during keyword discovery. Fully
/// replaceable via configuration.
struct Lexicon {
    std::vector<std::pair<TaskLabel, std::set<std::string>>> categories;
    std::set<std::string> stopwords;

    void validate() const;
    const std::set<std::string>* keywords_for(TaskLabel label) const {
        for (const auto& [l, words] : categories)
            if (l == label) return &words;
        return nullptr;
    }
};

/// Lowercases and splits on every non-alphanumeric character (ASCII).
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

inline void Lexicon::validate() const {
    std::set<TaskLabel> seen;
    for (const auto& [label, words] : categories) {
        if (label == TaskLabel::unclassified)
            throw Error(ErrorKind::config, "lexicon may not define the unclassified category");
        if (!seen.insert(label).second)
            throw Error(ErrorKind::config,
                        "duplicate lexicon category: " + std::string(to_string(label)));
        if (words.empty())
            throw Error(ErrorKind::config,
                        "empty keyword set for category " + std::string(to_string(label)));
        for (const auto& word : words) {
            auto tokens = tokenize(word);
            if (tokens.size() != 1 || tokens[0] != word)
                throw Error(ErrorKind::config,
                            "keyword must be a single lowercase token: \"" + word + "\"");
        }
    }
    for (const auto& word : stopwords) {
        auto tokens = tokenize(word);
        if (tokens.size() != 1 || tokens[0] != word)
            throw Error(ErrorKind::config,
                        "stopword must be a single lowercase token: \"" + word + "\"");
    }
}

/// Smallest keyword set covering the lifecycle categories; meant as a
/// starting point for analyst curation.
inline Lexicon default_lexicon() {
    Lexicon lex;
    lex.categories = {
        {TaskLabel::requirements,
         {"requirement", "requirements", "customer", "meeting", "plan", "design", "mockup"}},
        {TaskLabel::research, {"spike", "prototype", "investigate", "learn", "study"}},
        {TaskLabel::functional,
         {"add", "added", "implement", "implemented", "feature", "new", "support"}},
        {TaskLabel::modification,
         {"refactor", "rename", "cleanup", "restructure", "move", "reorganize"}},
        {TaskLabel::testing, {"test", "tests", "testing", "assert", "coverage", "junit"}},
        {TaskLabel::debugging, {"bug", "fix", "fixed", "crash", "error", "defect"}},
    };
    lex.stopwords = {
        "a",    "an",   "and",  "are",  "as",    "at",   "be",   "but",  "by",   "for",
        "from", "had",  "has",  "have", "he",    "her",  "his",  "i",    "if",   "in",
        "into", "is",   "it",   "its",  "no",    "not",  "of",   "on",   "or",   "our",
        "she",  "so",   "that", "the",  "their", "them", "then", "they", "this", "to",
        "was",  "we",   "were", "what", "when",  "which", "who", "will", "with", "you",
    };
    return lex;
}

/// Ranks corpus tokens by frequency after stopword removal; ties break
/// lexicographically. Advisory output for lexicon curation, never applied
/// automatically.
inline std::vector<std::pair<std::string, int>>
discover_keywords(const std::vector<std::string>& corpus, const Lexicon& lexicon, int k) {
    if (k < 1)
        throw Error(ErrorKind::config, "keyword count must be at least 1");
    std::map<std::string, int> freq;
    for (const auto& text : corpus)
        for (auto& token : tokenize(text))
            if (!lexicon.stopwords.count(token)) ++freq[token];

    std::vector<std::pair<std::string, int>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > k) ranked.resize(static_cast<size_t>(k));
    return ranked;
}

struct ClassifiedMessage {
    TaskLabel label = TaskLabel::unclassified;
    std::map<TaskLabel, int> hits;  // per-category keyword hit counts
};

/// Scores the message against every category (token multiplicity counts)
/// and returns the unique argmax; all-zero scores yield unclassified and
/// positive ties resolve to the later lifecycle label.
inline ClassifiedMessage classify_message(std::string_view message, const Lexicon& lexicon) {
    ClassifiedMessage result;
    const auto tokens = tokenize(message);
    for (const auto& [label, words] : lexicon.categories) {
        int count = 0;
        for (const auto& token : tokens)
            if (words.count(token)) ++count;
        result.hits[label] = count;
    }
    int best = 0;
    for (const auto& [label, count] : result.hits) {
        if (count > best || (count == best && count > 0 && label > result.label)) {
            best = count;
            result.label = label;
        }
    }
    if (best == 0) result.label = TaskLabel::unclassified;
    return result;
}

/// Classification counts over a contiguous seq range of the history.
struct CategoryHistogram {
    int from_seq = 0;
    int to_seq = 0;
    std::map<TaskLabel, int> counts;
    int total_messages = 0;
};

/// Classifies every message in [from_seq, to_seq] (inclusive) and
/// aggregates the label counts.
inline CategoryHistogram classify_range(const VersionHistory& history, const Lexicon& lexicon,
                                        int from_seq, int to_seq) {
    if (from_seq < 1 || to_seq > history.size() || from_seq > to_seq)
        throw Error(ErrorKind::config,
                    "range [" + std::to_string(from_seq) + ", " + std::to_string(to_seq) +
                        "] out of bounds for history of " + std::to_string(history.size()));
    CategoryHistogram histogram;
    histogram.from_seq = from_seq;
    histogram.to_seq = to_seq;
    for (int seq = from_seq; seq <= to_seq; ++seq) {
        const auto& rec = history.records[static_cast<size_t>(seq - 1)];
        ++histogram.counts[classify_message(rec.message, lexicon).label];
        ++histogram.total_messages;
    }
    return histogram;
}

} // namespace histmine
