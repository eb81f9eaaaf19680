#include "halearn/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "halearn/errors.hpp"

namespace halearn {

namespace {

// Sum of squared deviations from the mean over [a,b), from prefix sums.
inline double sse(const std::vector<double>& pre, const std::vector<double>& pre2,
                  std::size_t a, std::size_t b) {
    double s = pre[b] - pre[a];
    double s2 = pre2[b] - pre2[a];
    double n = static_cast<double>(b - a);
    return s2 - s * s / n;
}

} // namespace

std::vector<double> discrepancy_curve(const IOTrace& trace, std::size_t window) {
    const std::size_t p = trace.size();
    if (window < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
    if (p < 2 * window)
        throw Error(ErrorCode::TraceTooShort,
                    "need at least " + std::to_string(2 * window) + " samples");

    std::vector<double> curve(p, 0.0);
    std::vector<double> pre(p + 1), pre2(p + 1);
    for (const auto& ch : trace.channels) {
        pre[0] = pre2[0] = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            pre[i + 1] = pre[i] + ch[i];
            pre2[i + 1] = pre2[i] + ch[i] * ch[i];
        }
        for (std::size_t i = window; i + window <= p; ++i) {
            double joint = sse(pre, pre2, i - window, i + window);
            double left = sse(pre, pre2, i - window, i);
            double right = sse(pre, pre2, i, i + window);
            curve[i] += joint - left - right;
        }
    }
    return curve;
}

ChangePointSet detect_change_points(const IOTrace& trace, std::size_t window,
                                    std::size_t min_size, double penalty) {
    const std::size_t p = trace.size();
    std::vector<double> curve = discrepancy_curve(trace, window);

    if (penalty <= 0.0) {
        std::vector<double> vals(curve.begin() + static_cast<std::ptrdiff_t>(window),
                                 curve.begin() + static_cast<std::ptrdiff_t>(p - window + 1));
        std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(vals.size() / 2),
                         vals.end());
        penalty = 3.0 * vals[vals.size() / 2];
    }

    const std::size_t margin = std::max(window, min_size);
    std::vector<std::size_t> candidates;
    for (std::size_t i = std::max<std::size_t>(margin, 1); i + margin < p; ++i) {
        if (curve[i] > penalty && curve[i] > curve[i - 1] && curve[i] > curve[i + 1])
            candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (curve[a] != curve[b]) return curve[a] > curve[b];
        return a < b;
    });

    std::vector<std::size_t> accepted;
    for (std::size_t idx : candidates) {
        bool ok = true;
        for (std::size_t got : accepted) {
            std::size_t gap = got > idx ? got - idx : idx - got;
            if (gap < min_size) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(idx);
    }
    std::sort(accepted.begin(), accepted.end());

    ChangePointSet cps;
    cps.window = window;
    cps.min_size = min_size;
    cps.penalty_used = penalty;
    cps.indices = accepted;
    cps.discrepancy.reserve(accepted.size());
    for (std::size_t idx : accepted) cps.discrepancy.push_back(curve[idx]);
    return cps;
}

std::vector<Segment> split_segments(const IOTrace& trace, const ChangePointSet& cps) {
    std::vector<Segment> segments;
    std::size_t start = 0;
    for (std::size_t cp : cps.indices) {
        segments.push_back({&trace, start, cp - 1});
        start = cp;
    }
    segments.push_back({&trace, start, trace.size() - 1});
    return segments;
}

Neighborhood make_neighborhood(const IOTrace& trace, std::size_t cp, std::size_t v) {
    if (cp >= trace.size())
        throw Error(ErrorCode::InvalidArgument, "change point outside the trace");
    Neighborhood nb;
    nb.center = cp;
    nb.half_width = v;
    const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(trace.size());
    nb.times.reserve(2 * v + 1);
    nb.channels.assign(trace.channels.size(), {});
    for (std::ptrdiff_t off = -static_cast<std::ptrdiff_t>(v);
         off <= static_cast<std::ptrdiff_t>(v); ++off) {
        std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(cp) + off, 0, p - 1);
        nb.times.push_back(trace.times[static_cast<std::size_t>(idx)]);
        for (std::size_t c = 0; c < trace.channels.size(); ++c)
            nb.channels[c].push_back(trace.channels[c][static_cast<std::size_t>(idx)]);
    }
    return nb;
}

Series segment_series(const Segment& seg) {
    Series out;
    const IOTrace& t = *seg.trace;
    for (std::size_t c = 0; c < t.channels.size(); ++c) {
        if (t.schema.is_time(c)) continue;
        out.emplace_back(t.channels[c].begin() + static_cast<std::ptrdiff_t>(seg.start),
                         t.channels[c].begin() + static_cast<std::ptrdiff_t>(seg.end) + 1);
    }
    return out;
}

} // namespace halearn
