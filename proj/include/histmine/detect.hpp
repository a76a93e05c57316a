#pragma once

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "histmine/error.hpp"
#include "histmine/metrics.hpp"

namespace histmine {

/// Thresholds of the three change detectors. A version is flagged when the
/// detector value strictly exceeds its threshold (see the hit predicates
/// below); values exactly at the threshold are not hits.
struct DetectorConfig {
    double theta_sc = 0.2;
    double theta_rc = 0.2;
    double theta_dc = 0.15;

    void validate() const {
        if (theta_sc <= 0 || theta_rc <= 0 || theta_dc <= 0)
            throw Error(ErrorKind::config, "detector thresholds must be positive");
    }
};

/// Versions flagged by each detector plus their union, together with the
/// configuration that produced them.
struct KeyVersionSet {
    std::set<int> sc_hits;
    std::set<int> rc_hits;
    std::set<int> dc_hits;
    std::set<int> union_hits;
    DetectorConfig config;
    MetricKind source_kind = MetricKind::sloc;
};

/// Piecewise-linear curve through the key versions. node_seqs always
/// contains the first and last seq; values covers the full seq axis and
/// equals the source series exactly at every node.
struct MatchingCurve {
    std::vector<int> node_seqs;
    std::vector<double> values;
};

struct FidelityReport {
    double max_abs_dev = 0.0;
    double rmse = 0.0;
    double node_fraction = 0.0;
};

namespace detail {

inline void require_index(const MetricSeries& series, int n, int lo, int hi) {
    if (n < lo || n > hi)
        throw Error(ErrorKind::config,
                    "index " + std::to_string(n) + " out of range [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "] for series of length " +
                        std::to_string(series.length()));
}

} // namespace detail

/// Ratio of consecutive first differences across the (n-1, n, n+1) window:
/// (V[n+1] - V[n]) / (V[n] - V[n-1]). A value of 1 means the slope is
/// unchanged. A zero denominator with nonzero numerator returns a signed
/// infinity (always a hit); a fully flat window returns the neutral 1.
inline double slope_change(const MetricSeries& series, int n) {
    detail::require_index(series, n, 2, series.length() - 1);
    const double d_next = series.at_seq(n + 1) - series.at_seq(n);
    const double d_prev = series.at_seq(n) - series.at_seq(n - 1);
    if (d_prev == 0.0) {
        if (d_next == 0.0) return 1.0;
        return std::copysign(std::numeric_limits<double>::infinity(), d_next);
    }
    return d_next / d_prev;
}

/// First difference relative to the previous value:
/// (V[n] - V[n-1]) / V[n-1]. A zero base with a nonzero step returns a
/// signed infinity; a flat pair of zeros returns 0.
inline double relative_change(const MetricSeries& series, int n) {
    detail::require_index(series, n, 2, series.length());
    const double diff = series.at_seq(n) - series.at_seq(n - 1);
    const double base = series.at_seq(n - 1);
    if (base == 0.0) {
        if (diff == 0.0) return 0.0;
        return std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return diff / base;
}

/// First difference of the max-normalized series: V[n] - V[n-1].
inline double direct_change(const MetricSeries& series, int n) {
    if (!series.normalized)
        throw Error(ErrorKind::config, "direct change requires a normalized series");
    detail::require_index(series, n, 2, series.length());
    return series.at_seq(n) - series.at_seq(n - 1);
}

inline bool is_sc_hit(double sc, double theta) {
    return std::isinf(sc) || std::abs(sc - 1.0) > theta;
}

inline bool is_rc_hit(double rc, double theta) {
    return std::isinf(rc) || std::abs(rc) > theta;
}

inline bool is_dc_hit(double dc, double theta) {
    return std::abs(dc) > theta;
}

/// Runs all three detectors over a raw series and returns the per-detector
/// hit sets plus their union. The slope detector flags the middle version
/// of its window; the difference detectors flag the later version of their
/// pair. The direct detector runs on the max-normalized series.
inline KeyVersionSet detect_key_versions(const MetricSeries& series,
                                         const DetectorConfig& config = {}) {
    config.validate();
    if (series.length() < 2)
        throw Error(ErrorKind::config, "detection needs at least 2 versions");

    KeyVersionSet keys;
    keys.config = config;
    keys.source_kind = series.kind;

    const int n_versions = series.length();
    for (int n = 2; n <= n_versions - 1; ++n)
        if (is_sc_hit(slope_change(series, n), config.theta_sc)) keys.sc_hits.insert(n);
    for (int n = 2; n <= n_versions; ++n)
        if (is_rc_hit(relative_change(series, n), config.theta_rc)) keys.rc_hits.insert(n);

    const MetricSeries normalized_series = series.normalized ? series : normalize(series);
    for (int n = 2; n <= n_versions; ++n)
        if (is_dc_hit(direct_change(normalized_series, n), config.theta_dc))
            keys.dc_hits.insert(n);

    keys.union_hits = keys.sc_hits;
    keys.union_hits.insert(keys.rc_hits.begin(), keys.rc_hits.end());
    keys.union_hits.insert(keys.dc_hits.begin(), keys.dc_hits.end());
    return keys;
}

/// Connects the key versions (plus both endpoints) with straight lines on
/// the integer seq axis. Node values are copied from the series, so the
/// curve reproduces the original exactly at every node.
inline MatchingCurve matching_curve(const MetricSeries& series, const KeyVersionSet& keyset) {
    const int n_versions = series.length();
    if (n_versions < 1)
        throw Error(ErrorKind::config, "cannot build a curve over an empty series");
    for (int seq : keyset.union_hits)
        if (seq < 1 || seq > n_versions)
            throw Error(ErrorKind::config,
                        "key set references unknown seq " + std::to_string(seq));

    MatchingCurve curve;
    std::set<int> nodes(keyset.union_hits.begin(), keyset.union_hits.end());
    nodes.insert(1);
    nodes.insert(n_versions);
    curve.node_seqs.assign(nodes.begin(), nodes.end());

    curve.values.resize(static_cast<size_t>(n_versions));
    for (size_t k = 0; k + 1 < curve.node_seqs.size(); ++k) {
        const int n0 = curve.node_seqs[k];
        const int n1 = curve.node_seqs[k + 1];
        const double v0 = series.at_seq(n0);
        const double v1 = series.at_seq(n1);
        const double span = n1 - n0;
        for (int i = n0 + 1; i < n1; ++i)
            curve.values[static_cast<size_t>(i - 1)] = (v0 * (n1 - i) + v1 * (i - n0)) / span;
    }
    for (int node : curve.node_seqs)
        curve.values[static_cast<size_t>(node - 1)] = series.at_seq(node);
    return curve;
}

/// Deviation of the matching curve from the series it approximates.
/// node_fraction is the share of versions kept as nodes.
inline FidelityReport curve_fidelity(const MetricSeries& original, const MatchingCurve& curve) {
    if (original.values.size() != curve.values.size())
        throw Error(ErrorKind::config, "axis mismatch between series and curve");
    FidelityReport report;
    double sum_sq = 0.0;
    for (size_t i = 0; i < original.values.size(); ++i) {
        const double dev = std::abs(original.values[i] - curve.values[i]);
        report.max_abs_dev = std::max(report.max_abs_dev, dev);
        sum_sq += dev * dev;
    }
    if (!original.values.empty()) {
        report.rmse = std::sqrt(sum_sq / static_cast<double>(original.values.size()));
        report.node_fraction = static_cast<double>(curve.node_seqs.size()) /
                               static_cast<double>(original.values.size());
    }
    return report;
}

} // namespace histmine
