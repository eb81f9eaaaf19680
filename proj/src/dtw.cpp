#include "halearn/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "halearn/errors.hpp"

namespace halearn {

namespace {

double cell_cost(const Series& x, const Series& y, std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        double d = x[c][i] - y[c][j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

DtwResult dtw_align(const Series& x, const Series& y) {
    if (x.empty() || y.empty())
        throw Error(ErrorCode::EmptySequence, "series has no channels");
    if (x.size() != y.size())
        throw Error(ErrorCode::DimensionMismatch, "channel counts differ");
    const std::size_t n = x[0].size();
    const std::size_t m = y[0].size();
    if (n == 0 || m == 0)
        throw Error(ErrorCode::EmptySequence, "series has no samples");
    for (const auto& ch : x)
        if (ch.size() != n) throw Error(ErrorCode::DimensionMismatch, "ragged series");
    for (const auto& ch : y)
        if (ch.size() != m) throw Error(ErrorCode::DimensionMismatch, "ragged series");

    std::vector<double> dp(n * m);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return dp[i * m + j]; };

    at(0, 0) = cell_cost(x, y, 0, 0);
    for (std::size_t i = 1; i < n; ++i) at(i, 0) = at(i - 1, 0) + cell_cost(x, y, i, 0);
    for (std::size_t j = 1; j < m; ++j) at(0, j) = at(0, j - 1) + cell_cost(x, y, 0, j);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < m; ++j)
            at(i, j) = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)}) +
                       cell_cost(x, y, i, j);

    DtwResult result;
    result.distance = at(n - 1, m - 1);

    std::size_t i = n - 1, j = m - 1;
    auto& pairs = result.path.pairs;
    pairs.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            double best = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
            if (at(i - 1, j - 1) == best) {
                --i;
                --j;
            } else if (at(i - 1, j) == best) {
                --i;
            } else {
                --j;
            }
        }
        pairs.emplace_back(i, j);
    }
    std::reverse(pairs.begin(), pairs.end());
    return result;
}

double diagonality(const AlignmentPath& path) {
    const std::size_t k = path.pairs.size();
    if (k < 2) return 0.0;
    double mi = 0.0, mj = 0.0;
    for (const auto& [a, b] : path.pairs) {
        mi += static_cast<double>(a);
        mj += static_cast<double>(b);
    }
    mi /= static_cast<double>(k);
    mj /= static_cast<double>(k);
    double sii = 0.0, sjj = 0.0, sij = 0.0;
    for (const auto& [a, b] : path.pairs) {
        double di = static_cast<double>(a) - mi;
        double dj = static_cast<double>(b) - mj;
        sii += di * di;
        sjj += dj * dj;
        sij += di * dj;
    }
    if (sii == 0.0 || sjj == 0.0) return 0.0;
    return sij / std::sqrt(sii * sjj);
}

SimIndex similarity_to_stored(const Series& seg, const std::vector<Series>& stored) {
    if (stored.empty())
        throw Error(ErrorCode::EmptyState, "state holds no segments");
    double dist_acc = 0.0, diag_acc = 0.0;
    for (const auto& rep : stored) {
        DtwResult r = dtw_align(seg, rep);
        dist_acc += r.distance / static_cast<double>(r.path.pairs.size());
        diag_acc += diagonality(r.path);
    }
    const double n = static_cast<double>(stored.size());
    return {dist_acc / n, diag_acc / n};
}

} // namespace halearn
