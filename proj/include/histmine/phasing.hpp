#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "histmine/core.hpp"
#include "histmine/detect.hpp"
#include "histmine/error.hpp"
#include "histmine/textmine.hpp"

namespace histmine {

/// One labeled version range. Ranges are half-open [start_seq, end_excl),
/// so consecutive segments tile the history without gap or overlap; the
/// final segment's end_excl is N+1.
struct Segment {
    int start_seq = 0;
    int end_excl = 0;
    TaskLabel dominant = TaskLabel::unclassified;
    CategoryHistogram histogram;
    int note_count = 0;

    int last_seq() const { return end_excl - 1; }
};

/// Ordered development phases covering seq 1..N, plus the optional
/// notes-agreement score filled in by cross_check_notes.
struct PhaseTimeline {
    std::vector<Segment> phases;
    std::optional<double> notes_agreement;
};

/// Cuts the history at every key version: boundaries are
/// sorted(union ∪ {1, N+1}) and segments the half-open ranges between
/// consecutive boundaries. An empty key set yields one segment.
inline std::vector<Segment> segment(const KeyVersionSet& keyset, const VersionHistory& history) {
    const int n_versions = history.size();
    if (n_versions < 1)
        throw Error(ErrorKind::invariant, "cannot segment an empty history");
    std::set<int> boundaries{1, n_versions + 1};
    for (int seq : keyset.union_hits)
        if (seq >= 1 && seq <= n_versions) boundaries.insert(seq);

    std::vector<Segment> segments;
    auto it = boundaries.begin();
    for (int prev = *it++; it != boundaries.end(); ++it) {
        Segment seg;
        seg.start_seq = prev;
        seg.end_excl = *it;
        segments.push_back(seg);
        prev = *it;
    }
    return segments;
}

/// Labels each segment with its majority task: the argmax over
/// non-unclassified message counts, ties to the later lifecycle label.
/// Segments with no classifiable messages inherit the previous segment's
/// label (the first falls back to unclassified), since activity persists
/// until there is evidence of change.
inline std::vector<Segment> label_segments(std::vector<Segment> segments,
                                           const VersionHistory& history,
                                           const Lexicon& lexicon) {
    TaskLabel previous = TaskLabel::unclassified;
    for (auto& seg : segments) {
        seg.histogram = classify_range(history, lexicon, seg.start_seq, seg.last_seq());
        TaskLabel best = TaskLabel::unclassified;
        int best_count = 0;
        for (const auto& [label, count] : seg.histogram.counts) {
            if (label == TaskLabel::unclassified) continue;
            if (count > best_count || (count == best_count && count > 0 && label > best)) {
                best_count = count;
                best = label;
            }
        }
        seg.dominant = best_count > 0 ? best : previous;
        previous = seg.dominant;
    }
    return segments;
}

/// Collapses consecutive segments that share a dominant label, summing
/// their histograms. Idempotent; the result never has equal neighbors.
inline PhaseTimeline merge_adjacent(const std::vector<Segment>& segments) {
    PhaseTimeline timeline;
    for (const auto& seg : segments) {
        if (!timeline.phases.empty() && timeline.phases.back().dominant == seg.dominant) {
            Segment& merged = timeline.phases.back();
            merged.end_excl = seg.end_excl;
            merged.histogram.to_seq = seg.histogram.to_seq;
            merged.histogram.total_messages += seg.histogram.total_messages;
            for (const auto& [label, count] : seg.histogram.counts)
                merged.histogram.counts[label] += count;
            merged.note_count += seg.note_count;
        } else {
            timeline.phases.push_back(seg);
        }
    }
    return timeline;
}

/// Maps every note to the phase containing the commit nearest in time,
/// classifies it with the same lexicon, and scores agreement: the fraction
/// of classifiable notes whose label matches their phase's label. Phases
/// are annotated with their note counts. No classifiable notes leaves the
/// agreement absent.
inline PhaseTimeline cross_check_notes(PhaseTimeline timeline,
                                       const std::vector<NoteRecord>& notes,
                                       const VersionHistory& history, const Lexicon& lexicon) {
    if (timeline.phases.empty() || history.records.empty()) return timeline;

    auto nearest_seq = [&](Timestamp ts) {
        const auto& recs = history.records;
        auto it = std::lower_bound(recs.begin(), recs.end(), ts,
                                   [](const VersionRecord& r, Timestamp t) {
                                       return r.timestamp < t;
                                   });
        if (it == recs.end()) return recs.back().seq;
        if (it == recs.begin()) return recs.front().seq;
        auto before = std::prev(it);
        // Earlier record wins a distance tie.
        if (ts - before->timestamp <= it->timestamp - ts) return before->seq;
        return it->seq;
    };
    auto phase_of = [&](int seq) -> Segment& {
        for (auto& phase : timeline.phases)
            if (seq >= phase.start_seq && seq < phase.end_excl) return phase;
        return timeline.phases.back();
    };

    int classifiable = 0;
    int matching = 0;
    for (const auto& note : notes) {
        Segment& phase = phase_of(nearest_seq(note.timestamp));
        ++phase.note_count;
        const TaskLabel label =
            classify_message(note.title + "\n" + note.body, lexicon).label;
        if (label == TaskLabel::unclassified) continue;
        ++classifiable;
        if (label == phase.dominant) ++matching;
    }
    if (classifiable > 0)
        timeline.notes_agreement = static_cast<double>(matching) /
                                   static_cast<double>(classifiable);
    return timeline;
}

} // namespace histmine
