#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace halearn {

/// Channel-major series fed to the aligner: series[channel][sample].
using Series = std::vector<std::vector<double>>;

/// Monotone, continuous warping path: starts at (0,0), ends at (N-1,M-1),
/// every step increments i, j, or both by exactly 1.
struct AlignmentPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct DtwResult {
    double distance = 0.0;
    AlignmentPath path;
};

struct SimIndex {
    double distance = 0.0;     // length-normalized when produced by similarity_to_stored
    double diagonality = 0.0;  // Pearson correlation of the path index sequences
};

/// Full O(NM) dynamic-programming alignment with per-cell cost equal to the
/// euclidean norm of the channel-wise difference. Backtracking breaks ties
/// diagonal-first, then vertical (advance in X), then horizontal.
DtwResult dtw_align(const Series& x, const Series& y);

/// Pearson correlation of the two index sequences of a path; 0 when either
/// sequence has no variance (degenerate single-row/column alignments).
double diagonality(const AlignmentPath& path);

/// Mean of (distance / path length, diagonality) between `seg` and each stored
/// representative. Throws EmptyState when `stored` is empty.
SimIndex similarity_to_stored(const Series& seg, const std::vector<Series>& stored);

} // namespace halearn
