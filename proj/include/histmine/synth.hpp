#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "histmine/core.hpp"
#include "histmine/detect.hpp"
#include "histmine/detail/time.hpp"
#include "histmine/error.hpp"
#include "histmine/phasing.hpp"
#include "histmine/textmine.hpp"

namespace histmine {

/// One activity regime of a generated history. The step out of version v
/// follows the slope of v's regime, so the metric polyline bends exactly
/// at each regime's first version. Noise is bounded uniform (+-sloc_noise)
/// so worst-case detector behavior stays certifiable.
struct RegimeSpec {
    int length = 0;
    double sloc_slope = 0.0;
    double sloc_noise = 0.0;
    double class_slope = 0.0;
    TaskLabel label = TaskLabel::functional;
    std::map<TaskLabel, double> message_mix;  // empty: all messages carry `label`
};

/// A one-off level shift (refactor drop or spike) applied to the SLOC
/// curve at the first or last version of the given regime.
struct JumpSpec {
    int regime = 0;
    bool at_end_of_regime = true;
    double magnitude = 0.0;
};

struct SynthSpec {
    std::vector<RegimeSpec> regimes;
    std::vector<JumpSpec> jumps;
    std::uint64_t seed = 0;
    std::int64_t start_sloc = 100;
    std::int64_t start_classes = 10;
    Timestamp start_time = 1262304000;  // 2010-01-01T00:00:00Z
    std::int64_t seconds_per_version = 21600;
    std::string project_name = "synthetic";
    bool emit_source_files = false;

    int total_length() const {
        int total = 0;
        for (const auto& r : regimes) total += r.length;
        return total;
    }

    void validate() const {
        if (regimes.empty())
            throw Error(ErrorKind::config, "synth spec needs at least one regime");
        for (const auto& r : regimes) {
            if (r.length < 2)
                throw Error(ErrorKind::config, "regime lengths must be at least 2");
            if (r.sloc_noise < 0)
                throw Error(ErrorKind::config, "regime noise must be non-negative");
            if (r.label == TaskLabel::unclassified)
                throw Error(ErrorKind::config, "regime label may not be unclassified");
            if (!r.message_mix.empty()) {
                double total = 0;
                for (const auto& [label, weight] : r.message_mix) {
                    if (weight < 0)
                        throw Error(ErrorKind::config, "message mix weights must be non-negative");
                    if (label == TaskLabel::unclassified)
                        throw Error(ErrorKind::config, "message mix may not use unclassified");
                    total += weight;
                }
                if (total <= 0)
                    throw Error(ErrorKind::config, "message mix weights must not all be zero");
            }
        }
        if (total_length() < 4)
            throw Error(ErrorKind::config, "total history length must be at least 4");
        if (start_sloc < 1)
            throw Error(ErrorKind::config, "start_sloc must be positive");
        if (start_classes < 0)
            throw Error(ErrorKind::config, "start_classes must be non-negative");
        if (seconds_per_version < 0)
            throw Error(ErrorKind::config, "seconds_per_version must be non-negative");
        for (const auto& j : jumps)
            if (j.regime < 0 || j.regime >= static_cast<int>(regimes.size()))
                throw Error(ErrorKind::config, "jump references an unknown regime");
    }
};

/// Everything the generator planted, for use as a testing oracle.
struct SynthGroundTruth {
    std::set<int> breakpoints;  // regime boundaries and jump locations
    std::vector<std::tuple<int, int, TaskLabel>> regime_labels;  // (first, last seq, label)
    std::map<int, TaskLabel> message_labels;
};

namespace detail {

// Deterministic uniform in [0,1) independent of the standard library's
// distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline TaskLabel pick_weighted(const std::map<TaskLabel, double>& mix, std::mt19937_64& rng) {
    double total = 0;
    for (const auto& [label, weight] : mix) total += weight;
    double u = unit_uniform(rng) * total;
    for (const auto& [label, weight] : mix) {
        u -= weight;
        if (u < 0) return label;
    }
    return mix.rbegin()->first;
}

inline std::string pick_keyword(const std::set<std::string>& words, std::mt19937_64& rng) {
    auto it = words.begin();
    std::advance(it, static_cast<long>(rng() % words.size()));
    return *it;
}

// A snapshot whose SLOC and class counts under the default rules equal the
// requested values exactly.
inline FileSet synth_snapshot(std::int64_t sloc, std::int64_t classes) {
    FileSet snapshot;
    std::string text;
    text += "// generated source\n";
    text += "\n";
    for (std::int64_t i = 0; i < classes; ++i)
        text += "class C" + std::to_string(i) + " { }\n";
    for (std::int64_t i = classes; i < sloc; ++i)
        text += "int v" + std::to_string(i) + ";\n";
    snapshot.entries.push_back({"src/Main.java", std::move(text)});
    return snapshot;
}

} // namespace detail

/// Generates a version history with planted breakpoints, activity regimes
/// and message labels. Deterministic for a given seed. Metric values are
/// integers; with zero noise and integer slopes the series are exactly
/// piecewise linear with corners at each regime's first version.
inline std::pair<VersionHistory, SynthGroundTruth> generate_history(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const Lexicon lexicon = default_lexicon();

    const int n_versions = spec.total_length();

    // Regime lookup and boundaries.
    std::vector<int> regime_of(static_cast<size_t>(n_versions + 1), 0);
    std::vector<int> regime_start(spec.regimes.size(), 1);
    {
        int seq = 1;
        for (size_t r = 0; r < spec.regimes.size(); ++r) {
            regime_start[r] = seq;
            for (int i = 0; i < spec.regimes[r].length; ++i)
                regime_of[static_cast<size_t>(seq++)] = static_cast<int>(r);
        }
    }

    // Level shifts keyed by the version whose value they displace.
    std::map<int, double> jump_at;
    for (const auto& j : spec.jumps) {
        const int first = regime_start[static_cast<size_t>(j.regime)];
        const int last = first + spec.regimes[static_cast<size_t>(j.regime)].length - 1;
        jump_at[j.at_end_of_regime ? last : first] += j.magnitude;
    }

    SynthGroundTruth truth;
    for (size_t r = 1; r < spec.regimes.size(); ++r)
        truth.breakpoints.insert(regime_start[r]);
    for (const auto& [seq, magnitude] : jump_at)
        if (magnitude != 0 && seq > 1) truth.breakpoints.insert(seq);
    for (size_t r = 0; r < spec.regimes.size(); ++r)
        truth.regime_labels.emplace_back(regime_start[r],
                                         regime_start[r] + spec.regimes[r].length - 1,
                                         spec.regimes[r].label);

    VersionHistory history;
    history.project_name = spec.project_name;
    history.records.reserve(static_cast<size_t>(n_versions));

    double sloc_base = static_cast<double>(spec.start_sloc);
    double class_base = static_cast<double>(spec.start_classes);
    if (auto it = jump_at.find(1); it != jump_at.end()) sloc_base += it->second;

    for (int seq = 1; seq <= n_versions; ++seq) {
        const RegimeSpec& regime = spec.regimes[static_cast<size_t>(regime_of[static_cast<size_t>(seq)])];
        if (seq > 1) {
            const RegimeSpec& prev = spec.regimes[static_cast<size_t>(regime_of[static_cast<size_t>(seq - 1)])];
            sloc_base += prev.sloc_slope;
            class_base += prev.class_slope;
            if (auto it = jump_at.find(seq); it != jump_at.end()) sloc_base += it->second;
        }
        const double noise = regime.sloc_noise > 0
                                 ? regime.sloc_noise * (2.0 * detail::unit_uniform(rng) - 1.0)
                                 : 0.0;
        const std::int64_t sloc = std::max<std::int64_t>(0, std::llround(sloc_base + noise));
        const std::int64_t classes = std::max<std::int64_t>(0, std::llround(class_base));

        const TaskLabel msg_label = regime.message_mix.empty()
                                        ? regime.label
                                        : detail::pick_weighted(regime.message_mix, rng);
        const auto* keywords = lexicon.keywords_for(msg_label);
        const std::string message = detail::pick_keyword(*keywords, rng) + " " +
                                    detail::pick_keyword(*keywords, rng) + " task " +
                                    std::to_string(seq);

        VersionRecord rec;
        rec.seq = seq;
        char id[32];
        std::snprintf(id, sizeof id, "synth-%06d", seq);
        rec.id = id;
        rec.timestamp = spec.start_time + static_cast<Timestamp>(seq - 1) * spec.seconds_per_version;
        rec.author = "dev" + std::to_string(1 + (seq - 1) % 5);
        rec.message = message;
        if (spec.emit_source_files) {
            if (sloc < classes)
                throw Error(ErrorKind::config,
                            "cannot emit source files: class count exceeds SLOC at seq " +
                                std::to_string(seq));
            rec.snapshot = detail::synth_snapshot(sloc, classes);
        } else {
            rec.precomputed[MetricKind::sloc] = sloc;
            rec.precomputed[MetricKind::classes] = classes;
        }
        truth.message_labels[seq] = msg_label;
        history.records.push_back(std::move(rec));
    }
    return {std::move(history), std::move(truth)};
}

struct RecoveryReport {
    int matched = 0;
    int missed = 0;
    int spurious = 0;
    std::vector<int> boundary_errors;  // |detected - true| per match, in truth order
};

/// Greedy nearest matching of detected boundaries to planted ones within
/// +-tol; every boundary participates in at most one match.
inline RecoveryReport evaluate_recovery(const std::set<int>& detected,
                                        const SynthGroundTruth& truth, int tol = 0) {
    if (tol < 0) throw Error(ErrorKind::config, "tolerance must be non-negative");

    std::vector<std::tuple<int, int, int>> candidates;  // (distance, truth, detected)
    for (int t : truth.breakpoints)
        for (int d : detected)
            if (std::abs(d - t) <= tol) candidates.emplace_back(std::abs(d - t), t, d);
    std::sort(candidates.begin(), candidates.end());

    std::set<int> used_truth;
    std::set<int> used_detected;
    std::map<int, int> error_by_truth;
    for (const auto& [dist, t, d] : candidates) {
        if (used_truth.count(t) || used_detected.count(d)) continue;
        used_truth.insert(t);
        used_detected.insert(d);
        error_by_truth[t] = dist;
    }

    RecoveryReport report;
    report.matched = static_cast<int>(used_truth.size());
    report.missed = static_cast<int>(truth.breakpoints.size()) - report.matched;
    report.spurious = static_cast<int>(detected.size()) - report.matched;
    for (const auto& [t, err] : error_by_truth) report.boundary_errors.push_back(err);
    return report;
}

inline RecoveryReport evaluate_recovery(const KeyVersionSet& detected,
                                        const SynthGroundTruth& truth, int tol = 0) {
    return evaluate_recovery(detected.union_hits, truth, tol);
}

/// Phase timelines are compared through their interior phase boundaries
/// (the first seq of every phase after the first).
inline std::set<int> phase_boundaries(const PhaseTimeline& timeline) {
    std::set<int> boundaries;
    for (size_t i = 1; i < timeline.phases.size(); ++i)
        boundaries.insert(timeline.phases[i].start_seq);
    return boundaries;
}

inline RecoveryReport evaluate_recovery(const PhaseTimeline& detected,
                                        const SynthGroundTruth& truth, int tol = 0) {
    return evaluate_recovery(phase_boundaries(detected), truth, tol);
}

/// JSON shape shared by the CLI's synth and evaluate subcommands.
inline nlohmann::json truth_to_json(const SynthGroundTruth& truth) {
    nlohmann::json obj;
    obj["breakpoints"] = truth.breakpoints;
    nlohmann::json regimes = nlohmann::json::array();
    for (const auto& [first, last, label] : truth.regime_labels)
        regimes.push_back({{"start", first}, {"end", last}, {"label", to_string(label)}});
    obj["regimes"] = std::move(regimes);
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [seq, label] : truth.message_labels)
        labels[std::to_string(seq)] = to_string(label);
    obj["message_labels"] = std::move(labels);
    return obj;
}

inline SynthGroundTruth truth_from_json(const nlohmann::json& obj) {
    SynthGroundTruth truth;
    try {
        for (const auto& b : obj.at("breakpoints")) truth.breakpoints.insert(b.get<int>());
        for (const auto& r : obj.at("regimes")) {
            auto label = task_label_from_string(r.at("label").get<std::string>());
            if (!label) throw Error(ErrorKind::parse, "unknown task label in truth file");
            truth.regime_labels.emplace_back(r.at("start").get<int>(), r.at("end").get<int>(),
                                             *label);
        }
        if (obj.contains("message_labels")) {
            for (const auto& [key, value] : obj.at("message_labels").items()) {
                auto label = task_label_from_string(value.get<std::string>());
                if (!label) throw Error(ErrorKind::parse, "unknown task label in truth file");
                truth.message_labels[std::stoi(key)] = *label;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed truth file: ") + e.what());
    }
    return truth;
}

/// SynthSpec <-> JSON for the synth subcommand's --spec file.
inline SynthSpec synth_spec_from_json(const nlohmann::json& obj) {
    SynthSpec spec;
    try {
        for (const auto& r : obj.at("regimes")) {
            RegimeSpec regime;
            regime.length = r.at("length").get<int>();
            regime.sloc_slope = r.value("sloc_slope", 0.0);
            regime.sloc_noise = r.value("sloc_noise", 0.0);
            regime.class_slope = r.value("class_slope", 0.0);
            auto label = task_label_from_string(r.value("label", "functional"));
            if (!label) throw Error(ErrorKind::parse, "unknown regime label");
            regime.label = *label;
            if (r.contains("message_mix")) {
                for (const auto& [key, weight] : r.at("message_mix").items()) {
                    auto mix_label = task_label_from_string(key);
                    if (!mix_label) throw Error(ErrorKind::parse, "unknown mix label: " + key);
                    regime.message_mix[*mix_label] = weight.get<double>();
                }
            }
            spec.regimes.push_back(std::move(regime));
        }
        if (obj.contains("jumps")) {
            for (const auto& j : obj.at("jumps")) {
                JumpSpec jump;
                jump.regime = j.at("regime").get<int>();
                jump.at_end_of_regime = j.value("at_end_of_regime", true);
                jump.magnitude = j.at("magnitude").get<double>();
                spec.jumps.push_back(jump);
            }
        }
        spec.seed = obj.value("seed", 0ULL);
        spec.start_sloc = obj.value("start_sloc", std::int64_t{100});
        spec.start_classes = obj.value("start_classes", std::int64_t{10});
        if (obj.contains("start_time")) {
            auto ts = detail::parse_rfc3339(obj.at("start_time").get<std::string>());
            if (!ts) throw Error(ErrorKind::parse, "invalid start_time");
            spec.start_time = *ts;
        }
        spec.seconds_per_version = obj.value("seconds_per_version", std::int64_t{21600});
        spec.project_name = obj.value("project_name", std::string("synthetic"));
        spec.emit_source_files = obj.value("emit_source_files", false);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

} // namespace histmine
