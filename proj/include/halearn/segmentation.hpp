#pragma once

#include <cstddef>
#include <vector>

#include "halearn/trace.hpp"

namespace halearn {

struct ChangePointSet {
    std::vector<std::size_t> indices;     // strictly increasing, 0-based
    std::vector<double> discrepancy;      // score at each selected index
    std::size_t window = 0;
    std::size_t min_size = 0;
    double penalty_used = 0.0;
};

/// Window-sliding discrepancy of every sample: for each channel, the sum of
/// squared deviations of the joint (left+right) window minus both single-window
/// costs, summed over channels. Entries outside [W, p-W] are zero.
std::vector<double> discrepancy_curve(const IOTrace& trace, std::size_t window);

/// Strict local maxima of the discrepancy curve above `penalty`, picked greedily
/// highest-first under `min_size` spacing. A non-positive penalty selects the
/// automatic default of 3x the median discrepancy.
ChangePointSet detect_change_points(const IOTrace& trace, std::size_t window,
                                    std::size_t min_size, double penalty);

/// View of a contiguous, inclusive sample range of one trace.
struct Segment {
    const IOTrace* trace = nullptr;
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start + 1; }
    double duration() const { return static_cast<double>(length()) * trace->sampling_period; }
};

/// k change points tile the trace into k+1 segments:
/// [0,cp1-1],[cp1,cp2-1],...,[cpk,p-1].
std::vector<Segment> split_segments(const IOTrace& trace, const ChangePointSet& cps);

/// Fixed-width window of 2v+1 samples centered on a change point, edge-replicated
/// at trace boundaries so every neighborhood of a run has identical length.
struct Neighborhood {
    std::size_t center = 0;
    std::size_t half_width = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> channels;  // aligned with the trace schema

    std::size_t length() const { return times.size(); }
};

Neighborhood make_neighborhood(const IOTrace& trace, std::size_t cp, std::size_t v);

/// Non-time channels of a segment, in schema order (the representation handed
/// to the DTW aligner).
Series segment_series(const Segment& seg);

} // namespace halearn
