#include "halearn/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "halearn/errors.hpp"

namespace halearn {

namespace {

std::string fmt_label_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

// Mean of one channel over the first / last v samples of every stored window.
std::pair<double, double> clause_endpoints(const TransitionRecord& tr, std::size_t channel) {
    double before = 0.0, after = 0.0;
    for (const auto& nb : tr.segments) {
        const auto& w = nb.channels[channel];
        const std::size_t len = w.size();
        const std::size_t v = (len - 1) / 2;
        if (v == 0) {
            before += w[0];
            after += w[len - 1];
            continue;
        }
        double b = 0.0, a = 0.0;
        for (std::size_t i = 0; i < v; ++i) b += w[i];
        for (std::size_t i = v + 1; i < 2 * v + 1; ++i) a += w[i];
        before += b / static_cast<double>(v);
        after += a / static_cast<double>(v);
    }
    const double n = static_cast<double>(tr.segments.size());
    return {before / n, after / n};
}

bool clauses_overlap(const JumpCondition& x, const JumpCondition& y) {
    if (x.clauses.size() != y.clauses.size()) return false;
    for (std::size_t i = 0; i < x.clauses.size(); ++i) {
        const Clause& a = x.clauses[i];
        const Clause& b = y.clauses[i];
        if (a.channel != b.channel) return false;
        if (std::abs(a.before - b.before) >= kEventEps) return false;
        if (std::abs(a.after - b.after) >= kEventEps) return false;
    }
    return true;
}

bool time_distinguishes(const JumpCondition& x, const JumpCondition& y) {
    if (x.time_condition.has_value() != y.time_condition.has_value()) return true;
    if (!x.time_condition) return false;
    return std::abs(*x.time_condition - *y.time_condition) > 1e-9;
}

} // namespace

void update_confidence(TransitionRecord& tr, const Neighborhood& nb,
                       const ChannelSchema& schema, double beta) {
    const auto inputs = schema.input_indices();
    if (!tr.segments.empty() && nb.length() != tr.segments.front().times.size())
        throw Error(ErrorCode::LengthMismatch,
                    "neighborhood length " + std::to_string(nb.length()) +
                        " != stored length " +
                        std::to_string(tr.segments.front().times.size()));

    if (tr.segments.empty()) {
        tr.confidence.assign(inputs.size(), 1.0);
        tr.dist_mean.assign(inputs.size(), 0.0);
        tr.updates = 0;
    } else {
        const double len = static_cast<double>(nb.length());
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const auto& w = nb.channels[inputs[k]];
            double acc = 0.0;
            for (const auto& stored : tr.segments) {
                const auto& sw = stored.channels[inputs[k]];
                double sq = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    double d = w[i] - sw[i];
                    sq += d * d;
                }
                acc += std::sqrt(sq) / len;
            }
            double d_k = acc / static_cast<double>(tr.segments.size());
            tr.dist_mean[k] += (d_k - tr.dist_mean[k]) / static_cast<double>(tr.updates + 1);
            tr.confidence[k] = std::exp(-beta * tr.dist_mean[k]);
        }
        tr.updates += 1;
    }

    StoredNeighborhood stored;
    stored.center = nb.center;
    stored.times = nb.times;
    stored.channels = nb.channels;
    tr.segments.push_back(std::move(stored));
}

std::optional<double> mine_time_condition(const StateRecord& state, double theta_time_var,
                                          double time_span) {
    if (state.dwell.size() < 2 || time_span <= 0.0) return std::nullopt;
    std::vector<double> norm;
    norm.reserve(state.dwell.size());
    for (double d : state.dwell) norm.push_back(d / time_span);
    double mean = 0.0;
    for (double d : norm) mean += d;
    mean /= static_cast<double>(norm.size());
    double var = 0.0;
    for (double d : norm) var += (d - mean) * (d - mean);
    var /= static_cast<double>(norm.size() - 1);
    if (var < theta_time_var) return mean;
    return std::nullopt;
}

void build_jump_labels(ModelStore& store, std::vector<std::string>* warnings) {
    const auto inputs = store.schema.input_indices();
    std::vector<std::size_t> event_channels;  // non-time inputs, by column index
    std::vector<std::size_t> conf_slot;       // position within the confidence vector
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!store.schema.is_time(inputs[k])) {
            event_channels.push_back(inputs[k]);
            conf_slot.push_back(k);
        }
    }
    const double span = store.normalization ? store.normalization->time_span() : 1.0;

    auto add_clause = [&](TransitionRecord& tr, std::size_t rank) -> bool {
        // rank-th event channel by descending confidence, ties to lower index
        if (rank >= event_channels.size()) return false;
        std::vector<std::size_t> order(event_channels.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return tr.confidence[conf_slot[a]] > tr.confidence[conf_slot[b]];
        });
        std::size_t col = event_channels[order[rank]];
        auto [before, after] = clause_endpoints(tr, col);
        tr.jump.clauses.push_back({store.schema.channels[col].name, before, after});
        return true;
    };

    for (auto& [key, tr] : store.transitions) {
        tr.jump = JumpCondition{};
        if (!tr.segments.empty() && !event_channels.empty()) add_clause(tr, 0);
        if (key.first != kNullState) {
            auto it = store.states.find(key.first);
            if (it != store.states.end())
                tr.jump.time_condition =
                    mine_time_condition(it->second, store.config.time_var_threshold, span);
        }
    }

    // Determinism pass: outgoing labels of one state must be pairwise
    // distinguishable; overlapping ones gain further clauses until they differ
    // or the channels run out.
    for (const auto& [id, st] : store.states) {
        std::vector<TransitionRecord*> out;
        for (auto& [key, tr] : store.transitions)
            if (key.first == id) out.push_back(&tr);
        if (out.size() < 2) continue;

        for (std::size_t round = 1; round < event_channels.size() + 1; ++round) {
            std::vector<TransitionRecord*> grow;
            for (std::size_t a = 0; a < out.size(); ++a)
                for (std::size_t b = a + 1; b < out.size(); ++b)
                    if (clauses_overlap(out[a]->jump, out[b]->jump)) {
                        grow.push_back(out[a]);
                        grow.push_back(out[b]);
                    }
            if (grow.empty()) break;
            std::sort(grow.begin(), grow.end());
            grow.erase(std::unique(grow.begin(), grow.end()), grow.end());
            bool any = false;
            for (TransitionRecord* tr : grow) any = add_clause(*tr, round) || any;
            if (!any) break;
        }
        for (std::size_t a = 0; a < out.size(); ++a)
            for (std::size_t b = a + 1; b < out.size(); ++b) {
                if (!clauses_overlap(out[a]->jump, out[b]->jump)) continue;
                if (time_distinguishes(out[a]->jump, out[b]->jump)) continue;
                out[a]->jump.ambiguous = true;
                out[b]->jump.ambiguous = true;
                if (warnings)
                    warnings->push_back("IndistinguishableTransitions: state " +
                                        std::to_string(id) + " -> {" +
                                        std::to_string(out[a]->dst) + ", " +
                                        std::to_string(out[b]->dst) + "}");
            }
    }
}

std::string render_jump(const JumpCondition& jump, std::size_t support) {
    std::string s;
    for (const Clause& c : jump.clauses) {
        if (!s.empty()) s += "&";
        s += c.channel + ":" + fmt_label_value(c.before) + "->" + fmt_label_value(c.after);
    }
    if (jump.time_condition) {
        if (!s.empty()) s += "&";
        s += "time:" + fmt_label_value(*jump.time_condition);
    }
    if (s.empty()) s = "true";
    if (jump.ambiguous) s += " [ambiguous]";
    s += " (" + std::to_string(support) + ")";
    return s;
}

} // namespace halearn
