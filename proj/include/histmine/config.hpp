#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "histmine/detect.hpp"
#include "histmine/error.hpp"
#include "histmine/metrics.hpp"
#include "histmine/textmine.hpp"

namespace histmine {

inline constexpr const char* kToolVersion = "0.1.0";

enum class EmitKind { report, series_csv, plot_data };

inline std::string_view to_string(EmitKind kind) {
    switch (kind) {
    case EmitKind::report: return "report";
    case EmitKind::series_csv: return "series_csv";
    case EmitKind::plot_data: return "plot_data";
    }
    return "report";
}

/// Everything one analysis run needs; assembled from the config file with
/// command-line flags layered on top.
struct PipelineConfig {
    std::filesystem::path history_jsonl;  // exactly one of these two
    std::filesystem::path repo_path;
    std::string vcs_branch = "HEAD";
    std::filesystem::path notes_dir;  // optional

    std::vector<MetricKind> kinds = {MetricKind::sloc, MetricKind::classes};
    CountingRules rules;
    ClassPatterns patterns;
    DetectorConfig detector;
    Lexicon lexicon = default_lexicon();
    MetricKind phase_metric = MetricKind::sloc;
    int keyword_top_k = 20;

    std::filesystem::path output_dir = "histmine-out";
    std::set<EmitKind> emit = {EmitKind::report, EmitKind::series_csv, EmitKind::plot_data};

    void validate() const {
        const bool has_history = !history_jsonl.empty();
        const bool has_repo = !repo_path.empty();
        if (has_history == has_repo)
            throw Error(ErrorKind::config,
                        "exactly one input source (history file or repository) is required");
        if (kinds.empty())
            throw Error(ErrorKind::config, "at least one metric kind must be selected");
        if (std::find(kinds.begin(), kinds.end(), phase_metric) == kinds.end())
            throw Error(ErrorKind::config, "phase metric must be among the selected kinds");
        if (keyword_top_k < 1)
            throw Error(ErrorKind::config, "keyword_top_k must be at least 1");
        rules.validate();
        patterns.compile();
        detector.validate();
        lexicon.validate();
    }
};

namespace detail {

inline EmitKind emit_kind_from_string(const std::string& name) {
    // Config file uses the long names; the CLI accepts short aliases.
    if (name == "report") return EmitKind::report;
    if (name == "series_csv" || name == "series") return EmitKind::series_csv;
    if (name == "plot_data" || name == "plot") return EmitKind::plot_data;
    throw Error(ErrorKind::config, "unknown emit target: " + name);
}

inline MetricKind require_metric_kind(const std::string& name) {
    auto kind = metric_kind_from_string(name);
    if (!kind) throw Error(ErrorKind::config, "unknown metric kind: " + name);
    return *kind;
}

} // namespace detail

inline nlohmann::json lexicon_to_json(const Lexicon& lexicon) {
    nlohmann::json categories = nlohmann::json::object();
    for (const auto& [label, words] : lexicon.categories)
        categories[std::string(to_string(label))] = words;
    return {{"categories", std::move(categories)}, {"stopwords", lexicon.stopwords}};
}

inline Lexicon lexicon_from_json(const nlohmann::json& obj) {
    Lexicon lexicon;
    if (obj.contains("categories")) {
        for (const auto& [name, words] : obj.at("categories").items()) {
            auto label = task_label_from_string(name);
            if (!label || *label == TaskLabel::unclassified)
                throw Error(ErrorKind::config, "unknown lexicon category: " + name);
            std::set<std::string> keywords;
            for (const auto& w : words) keywords.insert(w.get<std::string>());
            lexicon.categories.emplace_back(*label, std::move(keywords));
        }
        std::sort(lexicon.categories.begin(), lexicon.categories.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (obj.contains("stopwords"))
        for (const auto& w : obj.at("stopwords"))
            lexicon.stopwords.insert(w.get<std::string>());
    lexicon.validate();
    return lexicon;
}

inline nlohmann::json config_to_json(const PipelineConfig& config) {
    nlohmann::json obj;
    nlohmann::json input = nlohmann::json::object();
    if (!config.history_jsonl.empty()) input["history"] = config.history_jsonl.string();
    if (!config.repo_path.empty()) {
        input["repo"] = config.repo_path.string();
        input["branch"] = config.vcs_branch;
    }
    obj["input"] = std::move(input);
    if (!config.notes_dir.empty()) obj["notes_dir"] = config.notes_dir.string();

    nlohmann::json kinds = nlohmann::json::array();
    for (MetricKind kind : config.kinds) kinds.push_back(std::string(to_string(kind)));
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& [open, close] : config.rules.block_comment_delims)
        blocks.push_back({open, close});
    obj["metrics"] = {
        {"kinds", std::move(kinds)},
        {"counting_rules",
         {{"source_extensions", config.rules.source_extensions},
          {"line_comment_prefixes", config.rules.line_comment_prefixes},
          {"block_comments", std::move(blocks)},
          {"count_blank", config.rules.count_blank},
          {"count_comment_only", config.rules.count_comment_only}}},
        {"class_patterns", config.patterns.patterns},
    };
    obj["detector"] = {{"theta_sc", config.detector.theta_sc},
                       {"theta_rc", config.detector.theta_rc},
                       {"theta_dc", config.detector.theta_dc}};
    obj["lexicon"] = lexicon_to_json(config.lexicon);
    obj["phase_metric"] = std::string(to_string(config.phase_metric));
    obj["keyword_top_k"] = config.keyword_top_k;
    obj["output_dir"] = config.output_dir.string();
    nlohmann::json emit = nlohmann::json::array();
    for (EmitKind kind : config.emit) emit.push_back(std::string(to_string(kind)));
    obj["emit"] = std::move(emit);
    return obj;
}

/// Parses a config-file object; absent keys keep their defaults.
inline PipelineConfig config_from_json(const nlohmann::json& obj) {
    PipelineConfig config;
    try {
        if (obj.contains("input")) {
            const auto& input = obj.at("input");
            if (input.contains("history"))
                config.history_jsonl = input.at("history").get<std::string>();
            if (input.contains("repo")) config.repo_path = input.at("repo").get<std::string>();
            if (input.contains("branch")) config.vcs_branch = input.at("branch").get<std::string>();
        }
        if (obj.contains("notes_dir")) config.notes_dir = obj.at("notes_dir").get<std::string>();
        if (obj.contains("metrics")) {
            const auto& metrics = obj.at("metrics");
            if (metrics.contains("kinds")) {
                config.kinds.clear();
                for (const auto& k : metrics.at("kinds"))
                    config.kinds.push_back(detail::require_metric_kind(k.get<std::string>()));
            }
            if (metrics.contains("counting_rules")) {
                const auto& rules = metrics.at("counting_rules");
                if (rules.contains("source_extensions"))
                    config.rules.source_extensions =
                        rules.at("source_extensions").get<std::vector<std::string>>();
                if (rules.contains("line_comment_prefixes"))
                    config.rules.line_comment_prefixes =
                        rules.at("line_comment_prefixes").get<std::vector<std::string>>();
                if (rules.contains("block_comments")) {
                    config.rules.block_comment_delims.clear();
                    for (const auto& pair : rules.at("block_comments"))
                        config.rules.block_comment_delims.emplace_back(
                            pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
                }
                if (rules.contains("count_blank"))
                    config.rules.count_blank = rules.at("count_blank").get<bool>();
                if (rules.contains("count_comment_only"))
                    config.rules.count_comment_only = rules.at("count_comment_only").get<bool>();
            }
            if (metrics.contains("class_patterns"))
                config.patterns.patterns =
                    metrics.at("class_patterns").get<std::vector<std::string>>();
        }
        if (obj.contains("detector")) {
            const auto& detector = obj.at("detector");
            config.detector.theta_sc = detector.value("theta_sc", config.detector.theta_sc);
            config.detector.theta_rc = detector.value("theta_rc", config.detector.theta_rc);
            config.detector.theta_dc = detector.value("theta_dc", config.detector.theta_dc);
        }
        if (obj.contains("lexicon")) config.lexicon = lexicon_from_json(obj.at("lexicon"));
        if (obj.contains("phase_metric"))
            config.phase_metric =
                detail::require_metric_kind(obj.at("phase_metric").get<std::string>());
        if (obj.contains("keyword_top_k"))
            config.keyword_top_k = obj.at("keyword_top_k").get<int>();
        if (obj.contains("output_dir"))
            config.output_dir = obj.at("output_dir").get<std::string>();
        if (obj.contains("emit")) {
            config.emit.clear();
            for (const auto& e : obj.at("emit"))
                config.emit.insert(detail::emit_kind_from_string(e.get<std::string>()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, std::string("malformed config: ") + e.what());
    }
    return config;
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open file: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::parse, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace histmine
