// Command-line front end: analyze a project history, generate synthetic
// histories with ground truth, and score detection results against truth.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "histmine/histmine.hpp"

namespace {

int exit_code_for(histmine::ErrorKind kind) {
    switch (kind) {
    case histmine::ErrorKind::io: return 2;
    case histmine::ErrorKind::parse: return 3;
    case histmine::ErrorKind::invariant: return 4;
    case histmine::ErrorKind::config: return 5;
    case histmine::ErrorKind::external: return 6;
    }
    return 1;
}

struct AnalyzeOptions {
    std::string config_file;
    std::string history;
    std::string repo;
    std::string branch;
    std::string notes;
    std::string metric;
    std::string phase_metric;
    std::string lexicon_file;
    std::string out_dir;
    std::vector<std::string> emit;
    double theta_sc = -1;
    double theta_rc = -1;
    double theta_dc = -1;
};

histmine::PipelineConfig build_config(const AnalyzeOptions& opt) {
    histmine::PipelineConfig config;
    if (!opt.config_file.empty())
        config = histmine::config_from_json(histmine::load_json_file(opt.config_file));

    if (!opt.history.empty()) {
        config.history_jsonl = opt.history;
        config.repo_path.clear();
    }
    if (!opt.repo.empty()) {
        config.repo_path = opt.repo;
        config.history_jsonl.clear();
    }
    if (!opt.branch.empty()) config.vcs_branch = opt.branch;
    if (!opt.notes.empty()) config.notes_dir = opt.notes;
    if (!opt.metric.empty()) {
        config.kinds.clear();
        if (opt.metric == "both") {
            config.kinds = {histmine::MetricKind::sloc, histmine::MetricKind::classes};
        } else {
            auto kind = histmine::metric_kind_from_string(opt.metric);
            if (!kind)
                throw histmine::Error(histmine::ErrorKind::config,
                                      "unknown metric: " + opt.metric);
            config.kinds = {*kind};
        }
    }
    if (!opt.phase_metric.empty()) {
        auto kind = histmine::metric_kind_from_string(opt.phase_metric);
        if (!kind)
            throw histmine::Error(histmine::ErrorKind::config,
                                  "unknown phase metric: " + opt.phase_metric);
        config.phase_metric = *kind;
    } else if (opt.metric == "classes") {
        config.phase_metric = histmine::MetricKind::classes;
    }
    if (!opt.lexicon_file.empty())
        config.lexicon = histmine::lexicon_from_json(histmine::load_json_file(opt.lexicon_file));
    if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
    if (!opt.emit.empty()) {
        config.emit.clear();
        for (const auto& e : opt.emit)
            config.emit.insert(histmine::detail::emit_kind_from_string(e));
    }
    if (opt.theta_sc > 0) config.detector.theta_sc = opt.theta_sc;
    if (opt.theta_rc > 0) config.detector.theta_rc = opt.theta_rc;
    if (opt.theta_dc > 0) config.detector.theta_dc = opt.theta_dc;
    return config;
}

int run_analyze(const AnalyzeOptions& opt) {
    histmine::PipelineConfig config = build_config(opt);
    histmine::AnalysisReport report = histmine::run_pipeline(config);
    auto written = histmine::emit_outputs(report, config);
    for (const auto& path : written)
        std::cout << "wrote " << path.string() << "\n";
    std::cout << "versions: " << report.history_length << ", phases: "
              << report.timeline.phases.size() << "\n";
    for (const auto& phase : report.timeline.phases)
        std::cout << "  [" << phase.start_seq << ", " << phase.last_seq() << "] "
                  << histmine::to_string(phase.dominant) << "\n";
    return 0;
}

int run_synth(const std::string& spec_file, const std::string& out_file,
              std::string truth_file) {
    auto spec = histmine::synth_spec_from_json(histmine::load_json_file(spec_file));
    auto [history, truth] = histmine::generate_history(spec);
    histmine::write_history_jsonl(history, out_file);
    if (truth_file.empty()) truth_file = out_file + ".truth.json";
    std::ofstream out(truth_file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw histmine::Error(histmine::ErrorKind::io, "cannot write truth file: " + truth_file);
    out << histmine::truth_to_json(truth).dump(2) << "\n";
    std::cout << "wrote " << out_file << " (" << history.size() << " versions)\n";
    std::cout << "wrote " << truth_file << "\n";
    return 0;
}

int run_evaluate(const std::string& report_file, const std::string& truth_file, int tol,
                 const std::string& use) {
    auto report_json = histmine::load_json_file(report_file);
    auto truth = histmine::truth_from_json(histmine::load_json_file(truth_file));

    std::set<int> detected;
    try {
        if (use == "phases") {
            const auto& phases = report_json.at("phases");
            for (size_t i = 1; i < phases.size(); ++i)
                detected.insert(phases[i].at("start").get<int>());
        } else {
            const auto& metrics = report_json.at("metrics");
            auto it = metrics.contains(use) ? metrics.find(use) : metrics.begin();
            if (it == metrics.end())
                throw histmine::Error(histmine::ErrorKind::config,
                                      "report contains no metrics to evaluate");
            for (const auto& seq : it.value().at("key_versions").at("union"))
                detected.insert(seq.get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw histmine::Error(histmine::ErrorKind::parse,
                              std::string("malformed report: ") + e.what());
    }

    auto recovery = histmine::evaluate_recovery(detected, truth, tol);
    nlohmann::json result = {{"matched", recovery.matched},
                             {"missed", recovery.missed},
                             {"spurious", recovery.spurious},
                             {"boundary_errors", recovery.boundary_errors}};
    std::cout << result.dump(2) << "\n";
    return recovery.missed == 0 && recovery.spurious == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mines a version history for key versions, activity labels "
                 "and development phases"};
    app.require_subcommand(1);

    AnalyzeOptions analyze_opt;
    auto* analyze = app.add_subcommand("analyze", "Run the full analysis pipeline");
    analyze->add_option("--config", analyze_opt.config_file, "Config file (JSON)");
    analyze->add_option("--history", analyze_opt.history, "History export (JSONL)");
    analyze->add_option("--repo", analyze_opt.repo, "Repository to ingest via the VCS adapter");
    analyze->add_option("--branch", analyze_opt.branch, "Branch to walk (default HEAD)");
    analyze->add_option("--notes", analyze_opt.notes, "Directory of dated note files");
    analyze->add_option("--metric", analyze_opt.metric, "sloc, classes or both");
    analyze->add_option("--phase-metric", analyze_opt.phase_metric,
                        "Metric whose key versions drive phasing");
    analyze->add_option("--theta-sc", analyze_opt.theta_sc, "Slope-change threshold");
    analyze->add_option("--theta-rc", analyze_opt.theta_rc, "Relative-change threshold");
    analyze->add_option("--theta-dc", analyze_opt.theta_dc, "Direct-change threshold");
    analyze->add_option("--lexicon", analyze_opt.lexicon_file, "Lexicon file (JSON)");
    analyze->add_option("--out", analyze_opt.out_dir, "Output directory");
    analyze->add_option("--emit", analyze_opt.emit, "report, series, plot")
        ->delimiter(',');

    std::string synth_spec, synth_out, synth_truth;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic history with ground truth");
    synth->add_option("--spec", synth_spec, "Synthesis spec (JSON)")->required();
    synth->add_option("--out", synth_out, "Output history (JSONL)")->required();
    synth->add_option("--truth", synth_truth, "Ground-truth output (default <out>.truth.json)");

    std::string eval_report, eval_truth, eval_use = "phases";
    int eval_tol = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Score a report against planted truth");
    evaluate->add_option("--detected", eval_report, "report.json from analyze")->required();
    evaluate->add_option("--truth", eval_truth, "Ground-truth file from synth")->required();
    evaluate->add_option("--tol", eval_tol, "Boundary matching tolerance (default 0)");
    evaluate->add_option("--use", eval_use, "phases (default), sloc or classes key unions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(analyze_opt);
        if (synth->parsed()) return run_synth(synth_spec, synth_out, synth_truth);
        if (evaluate->parsed()) return run_evaluate(eval_report, eval_truth, eval_tol, eval_use);
    } catch (const histmine::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
