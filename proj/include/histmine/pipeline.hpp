#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "histmine/config.hpp"
#include "histmine/core.hpp"
#include "histmine/detect.hpp"
#include "histmine/jsonl.hpp"
#include "histmine/metrics.hpp"
#include "histmine/notes.hpp"
#include "histmine/phasing.hpp"
#include "histmine/textmine.hpp"
#include "histmine/vcs.hpp"

namespace histmine {

/// Per-metric analysis products. The fidelity report is computed on the
/// normalized axis so it is comparable across metrics; the raw-axis curve
/// feeds the plot output.
struct MetricAnalysis {
    MetricSeries raw;
    MetricSeries normalized;
    KeyVersionSet keys;
    MatchingCurve curve;             // raw axis
    MatchingCurve normalized_curve;  // normalized axis
    FidelityReport fidelity;
};

struct AnalysisReport {
    std::string tool_version = kToolVersion;
    PipelineConfig config;
    std::string project_name;
    int history_length = 0;
    std::map<MetricKind, MetricAnalysis> metrics;
    PhaseTimeline timeline;
    std::vector<std::pair<std::string, int>> keywords;
    std::vector<std::string> warnings;
};

/// Runs ingest -> metrics -> detect -> textmine -> phasing and assembles
/// the report. Deterministic: identical inputs and config produce an
/// identical report.
inline AnalysisReport run_pipeline(const PipelineConfig& config) {
    config.validate();

    AnalysisReport report;
    report.config = config;

    // Ingest.
    VersionHistory history;
    SnapshotProvider provider;
    if (!config.history_jsonl.empty()) {
        history = load_history_jsonl(config.history_jsonl);
    } else {
        AdapterConfig adapter;
        adapter.branch = config.vcs_branch;
        history = ingest_vcs(config.repo_path, adapter);
        auto validation = validate_history(history);
        if (!validation.ok())
            throw Error(ErrorKind::invariant,
                        "ingested history is invalid: " + validation.violations.front().description);
        provider = [repo = config.repo_path, adapter,
                    warnings = &report.warnings](const VersionRecord& rec) {
            return std::optional<FileSet>(materialize_snapshot(repo, rec.id, adapter, warnings));
        };
    }
    report.project_name = history.project_name;
    report.history_length = history.size();

    std::vector<NoteRecord> notes;
    if (!config.notes_dir.empty()) notes = load_notes(config.notes_dir, &report.warnings);

    // Metrics and detectors.
    for (MetricKind kind : config.kinds) {
        MetricAnalysis analysis;
        analysis.raw = build_series(history, kind, config.rules, config.patterns, provider);
        analysis.normalized = normalize(analysis.raw);
        analysis.keys = detect_key_versions(analysis.raw, config.detector);
        analysis.curve = matching_curve(analysis.raw, analysis.keys);
        analysis.normalized_curve = matching_curve(analysis.normalized, analysis.keys);
        analysis.fidelity = curve_fidelity(analysis.normalized, analysis.normalized_curve);
        for (const auto& w : analysis.normalized.warnings)
            report.warnings.push_back(std::string(to_string(kind)) + ": " + w);
        report.metrics.emplace(kind, std::move(analysis));
    }

    // Text analysis.
    std::vector<std::string> corpus;
    corpus.reserve(history.records.size());
    for (const auto& rec : history.records) corpus.push_back(rec.message);
    report.keywords = discover_keywords(corpus, config.lexicon, config.keyword_top_k);

    // Phasing, keyed on the configured metric.
    const KeyVersionSet& phase_keys = report.metrics.at(config.phase_metric).keys;
    auto segments = label_segments(segment(phase_keys, history), history, config.lexicon);
    report.timeline = merge_adjacent(segments);
    if (!notes.empty())
        report.timeline = cross_check_notes(report.timeline, notes, history, config.lexicon);

    return report;
}

namespace detail {

inline std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

// Atomic write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write: " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorKind::io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::io, "cannot move output into place: " + path.string());
    }
}

inline nlohmann::json histogram_to_json(const CategoryHistogram& histogram) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [label, count] : histogram.counts)
        if (count > 0) counts[std::string(to_string(label))] = count;
    return counts;
}

} // namespace detail

inline nlohmann::json report_to_json(const AnalysisReport& report) {
    nlohmann::json obj;
    obj["tool_version"] = report.tool_version;
    obj["config"] = config_to_json(report.config);
    obj["project"] = report.project_name;

    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [kind, analysis] : report.metrics) {
        nlohmann::json m;
        const auto& values = analysis.raw.values;
        const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
        m["series_summary"] = {{"n", values.size()},
                               {"min", values.empty() ? 0.0 : *min_it},
                               {"max", values.empty() ? 0.0 : *max_it},
                               {"final", values.empty() ? 0.0 : values.back()}};
        m["key_versions"] = {{"sc", analysis.keys.sc_hits},
                             {"rc", analysis.keys.rc_hits},
                             {"dc", analysis.keys.dc_hits},
                             {"union", analysis.keys.union_hits}};
        m["fidelity"] = {{"max_abs_dev", analysis.fidelity.max_abs_dev},
                         {"rmse", analysis.fidelity.rmse},
                         {"node_fraction", analysis.fidelity.node_fraction}};
        metrics[std::string(to_string(kind))] = std::move(m);
    }
    obj["metrics"] = std::move(metrics);

    nlohmann::json phases = nlohmann::json::array();
    for (const auto& phase : report.timeline.phases) {
        nlohmann::json p = {{"start", phase.start_seq},
                            {"end", phase.last_seq()},
                            {"label", std::string(to_string(phase.dominant))},
                            {"histogram", detail::histogram_to_json(phase.histogram)}};
        if (phase.note_count > 0) p["notes"] = phase.note_count;
        phases.push_back(std::move(p));
    }
    obj["phases"] = std::move(phases);

    nlohmann::json keywords = nlohmann::json::array();
    for (const auto& [token, count] : report.keywords)
        keywords.push_back({{"token", token}, {"count", count}});
    obj["keywords"] = std::move(keywords);

    if (report.timeline.notes_agreement)
        obj["notes_agreement"] = *report.timeline.notes_agreement;
    else
        obj["notes_agreement"] = nullptr;
    obj["warnings"] = report.warnings;
    return obj;
}

/// Writes the selected outputs: report.json, series_<kind>.csv and
/// plot_<kind>.csv. All writes are atomic (temp file + rename).
inline std::vector<std::filesystem::path> emit_outputs(const AnalysisReport& report,
                                                       const PipelineConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (!fs::is_directory(config.output_dir))
        throw Error(ErrorKind::io, "output directory unavailable: " + config.output_dir.string());

    std::vector<fs::path> written;
    if (config.emit.count(EmitKind::report)) {
        fs::path path = config.output_dir / "report.json";
        detail::write_file_atomic(path, report_to_json(report).dump(2) + "\n");
        written.push_back(path);
    }
    for (const auto& [kind, analysis] : report.metrics) {
        if (config.emit.count(EmitKind::series_csv)) {
            std::string csv = "seq,value\n";
            for (size_t i = 0; i < analysis.raw.values.size(); ++i)
                csv += std::to_string(i + 1) + "," +
                       detail::format_double(analysis.raw.values[i]) + "\n";
            fs::path path =
                config.output_dir / ("series_" + std::string(to_string(kind)) + ".csv");
            detail::write_file_atomic(path, csv);
            written.push_back(path);
        }
        if (config.emit.count(EmitKind::plot_data)) {
            std::string csv = "seq,value,normalized,matching,is_key\n";
            for (size_t i = 0; i < analysis.raw.values.size(); ++i) {
                const int seq = static_cast<int>(i) + 1;
                csv += std::to_string(seq) + "," +
                       detail::format_double(analysis.raw.values[i]) + "," +
                       detail::format_double(analysis.normalized.values[i]) + "," +
                       detail::format_double(analysis.curve.values[i]) + "," +
                       (analysis.keys.union_hits.count(seq) ? "1" : "0") + "\n";
            }
            fs::path path = config.output_dir / ("plot_" + std::string(to_string(kind)) + ".csv");
            detail::write_file_atomic(path, csv);
            written.push_back(path);
        }
    }
    return written;
}

} // namespace histmine
