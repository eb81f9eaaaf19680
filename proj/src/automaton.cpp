#include "halearn/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "halearn/errors.hpp"
#include "halearn/jumps.hpp"

namespace halearn {

PolynomialFlow fit_state_flow(const StateRecord& state, const ChannelSchema& schema,
                              double time_span, int degree, double ridge) {
    const auto in_idx = schema.input_indices();
    const auto out_idx = schema.output_indices();
    std::vector<std::string> input_names, output_names;
    for (std::size_t c : in_idx) input_names.push_back(schema.channels[c].name);
    for (std::size_t c : out_idx) output_names.push_back(schema.channels[c].name);

    std::vector<std::vector<double>> X, Y;
    for (const StoredSegment& seg : state.segments) {
        const std::size_t len = seg.channels.empty() ? 0 : seg.channels[0].size();
        const double step = time_span > 0.0 ? seg.period / time_span : seg.period;
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<double> row;
            row.reserve(in_idx.size());
            for (std::size_t c : in_idx)
                row.push_back(schema.is_time(c) ? static_cast<double>(i) * step
                                                : seg.channels[c][i]);
            X.push_back(std::move(row));
            std::vector<double> target;
            target.reserve(out_idx.size());
            for (std::size_t c : out_idx) target.push_back(seg.channels[c][i]);
            Y.push_back(std::move(target));
        }
    }
    return fit_polynomial(X, Y, input_names, output_names, degree, ridge);
}

void finalize(ModelStore& store, std::vector<std::string>* warnings) {
    if (store.states.empty())
        throw Error(ErrorCode::EmptyState, "cannot finalize an empty model");
    const double span = store.normalization ? store.normalization->time_span() : 1.0;
    for (auto& [id, state] : store.states) {
        try {
            state.flow = fit_state_flow(state, store.schema, span, store.config.degree,
                                        store.config.ridge);
            state.flow_error.clear();
        } catch (const Error& err) {
            if (err.code() != ErrorCode::Underdetermined &&
                err.code() != ErrorCode::DegenerateDesign)
                throw;
            state.flow.reset();
            state.flow_error = err.what();
            if (warnings)
                warnings->push_back("state " + std::to_string(id) + " has no flow: " +
                                    err.what());
        }
    }
    build_jump_labels(store, warnings);
    store.check_invariants();

    // Reachability from the initial modes is advisory only.
    std::set<int> seen;
    std::deque<int> queue;
    for (int id : store.initial_modes())
        if (seen.insert(id).second) queue.push_back(id);
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        for (const auto& [key, tr] : store.transitions)
            if (key.first == id && seen.insert(key.second).second) queue.push_back(key.second);
    }
    if (warnings)
        for (const auto& [id, state] : store.states)
            if (!seen.count(id))
                warnings->push_back("mode " + std::to_string(id) +
                                    " is unreachable from the initial modes");
}

namespace {

struct SimContext {
    std::vector<std::size_t> trace_col;   // model input column -> trace column
    std::vector<std::size_t> model_in;    // model input columns
    std::vector<std::size_t> model_out;   // model output columns
};

SimContext map_inputs(const ModelStore& store, const IOTrace& inputs) {
    SimContext ctx;
    ctx.model_in = store.schema.input_indices();
    ctx.model_out = store.schema.output_indices();
    for (std::size_t c : ctx.model_in) {
        auto idx = inputs.schema.find(store.schema.channels[c].name);
        if (!idx)
            throw Error(ErrorCode::SchemaMismatch,
                        "input trace lacks channel '" + store.schema.channels[c].name + "'");
        ctx.trace_col.push_back(*idx);
    }
    return ctx;
}

int pick_initial_mode(const ModelStore& store) {
    int best = kNullState;
    std::size_t best_support = 0;
    for (const auto& [key, tr] : store.transitions) {
        if (key.first != kNullState) continue;
        if (best == kNullState || tr.support > best_support ||
            (tr.support == best_support && key.second < best))
            best = key.second, best_support = tr.support;
    }
    if (best == kNullState)
        throw Error(ErrorCode::MalformedDocument, "model has no initial mode");
    return best;
}

// Normalized outputs for a normalized input matrix; shared by simulate and cost.
std::vector<std::vector<double>> run_simulation(const ModelStore& store,
                                                const std::vector<std::vector<double>>& in,
                                                const std::vector<double>& times) {
    const double span =
        store.normalization ? store.normalization->time_span() : 1.0;
    const std::size_t p = times.size();
    const std::size_t n_in = in.size();
    const double step_norm = p > 1 ? (times[1] - times[0]) / span : 0.0;

    int mode = pick_initial_mode(store);
    double entry_time = times.empty() ? 0.0 : times[0];

    const auto in_idx = store.schema.input_indices();
    std::vector<std::size_t> time_slot;  // which input slots are the time channel
    std::map<std::string, std::size_t> slot_of;
    for (std::size_t k = 0; k < in_idx.size(); ++k) {
        if (store.schema.is_time(in_idx[k])) time_slot.push_back(k);
        slot_of[store.schema.channels[in_idx[k]].name] = k;
    }

    std::vector<std::vector<double>> out(
        store.schema.output_indices().size(), std::vector<double>(p, 0.0));
    std::vector<double> x(n_in, 0.0);

    for (std::size_t i = 0; i < p; ++i) {
        if (i > 0) {
            const TransitionRecord* fired = nullptr;
            for (const auto& [key, tr] : store.transitions) {
                if (key.first != mode) continue;
                bool enabled = false;
                if (!tr.jump.clauses.empty()) {
                    enabled = true;
                    for (const Clause& c : tr.jump.clauses) {
                        auto slot = slot_of.find(c.channel);
                        if (slot == slot_of.end()) {
                            enabled = false;
                            break;
                        }
                        std::size_t k = slot->second;
                        if (std::abs(c.before - c.after) <= kEventEps ||
                            std::abs(in[k][i - 1] - c.before) > kEventEps ||
                            std::abs(in[k][i] - c.after) > kEventEps) {
                            enabled = false;
                            break;
                        }
                    }
                }
                if (!enabled && tr.jump.time_condition) {
                    double elapsed = (times[i] - entry_time) / span;
                    enabled = elapsed >= *tr.jump.time_condition - 0.5 * step_norm;
                }
                if (!enabled) continue;
                if (!fired || tr.support > fired->support ||
                    (tr.support == fired->support && tr.dst < fired->dst))
                    fired = &tr;
            }
            if (fired) {
                mode = fired->dst;
                entry_time = times[i];
            }
        }
        const StateRecord& state = store.states.at(mode);
        if (state.flow) {
            for (std::size_t k = 0; k < n_in; ++k) x[k] = in[k][i];
            for (std::size_t k : time_slot) x[k] = (times[i] - entry_time) / span;
            std::vector<double> y = evaluate_flow(*state.flow, x);
            for (std::size_t o = 0; o < out.size(); ++o) out[o][i] = y[o];
        }
    }
    return out;
}

std::vector<std::vector<double>> normalized_inputs(const ModelStore& store,
                                                   const IOTrace& trace,
                                                   const SimContext& ctx) {
    const NormalizationParams& params = *store.normalization;
    std::vector<std::vector<double>> in;
    in.reserve(ctx.model_in.size());
    for (std::size_t k = 0; k < ctx.model_in.size(); ++k) {
        auto [lo, hi] = params.range[ctx.model_in[k]];
        double span = hi - lo;
        std::vector<double> col = trace.channels[ctx.trace_col[k]];
        for (double& v : col) v = span == 0.0 ? 0.0 : (v - lo) / span;
        in.push_back(std::move(col));
    }
    return in;
}

} // namespace

IOTrace simulate(const ModelStore& store, const IOTrace& inputs) {
    inputs.validate();
    if (!store.normalization)
        throw Error(ErrorCode::EmptyState, "model has not seen any trace");
    SimContext ctx = map_inputs(store, inputs);
    auto in = normalized_inputs(store, inputs, ctx);
    auto out = run_simulation(store, in, inputs.times);

    IOTrace result;
    result.schema.time_index = 0;
    result.schema.channels.push_back(
        {store.schema.channels[store.schema.time_index].name, Role::Input});
    result.times = inputs.times;
    result.sampling_period = inputs.sampling_period;
    result.channels.push_back(inputs.times);
    const NormalizationParams& params = *store.normalization;
    for (std::size_t o = 0; o < ctx.model_out.size(); ++o) {
        std::size_t col = ctx.model_out[o];
        result.schema.channels.push_back({store.schema.channels[col].name, Role::Output});
        auto [lo, hi] = params.range[col];
        double span = hi - lo;
        std::vector<double> raw = out[o];
        for (double& v : raw) v = span == 0.0 ? lo : v * span + lo;
        result.channels.push_back(std::move(raw));
    }
    return result;
}

double cost(const ModelStore& store, const std::vector<IOTrace>& tests) {
    if (tests.empty()) throw Error(ErrorCode::EmptyTestSet, "no test traces");
    if (!store.normalization)
        throw Error(ErrorCode::EmptyState, "model has not seen any trace");
    const NormalizationParams& params = *store.normalization;
    double total = 0.0;
    for (const IOTrace& test : tests) {
        test.validate();
        SimContext ctx = map_inputs(store, test);
        auto in = normalized_inputs(store, test, ctx);
        auto pred = run_simulation(store, in, test.times);

        double sq = 0.0;
        std::size_t count = 0;
        for (std::size_t o = 0; o < ctx.model_out.size(); ++o) {
            std::size_t col = ctx.model_out[o];
            auto idx = test.schema.find(store.schema.channels[col].name);
            if (!idx)
                throw Error(ErrorCode::SchemaMismatch,
                            "test trace lacks output '" + store.schema.channels[col].name + "'");
            auto [lo, hi] = params.range[col];
            double span = hi - lo;
            const auto& actual = test.channels[*idx];
            for (std::size_t i = 0; i < actual.size(); ++i) {
                double a = span == 0.0 ? 0.0 : (actual[i] - lo) / span;
                double d = pred[o][i] - a;
                sq += d * d;
                ++count;
            }
        }
        total += std::sqrt(sq / static_cast<double>(count));
    }
    return total / static_cast<double>(tests.size());
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string to_dot(const ModelStore& store) {
    std::string dot = "digraph model {\n  rankdir=LR;\n  node [shape=ellipse];\n";
    for (const auto& [id, state] : store.states) {
        std::string label = std::to_string(id);
        if (state.flow) {
            for (std::size_t o = 0; o < state.flow->outputs.size(); ++o)
                label += "\\n" + dot_escape(flow_to_string(*state.flow, o));
        } else if (!state.flow_error.empty()) {
            label += "\\n(no flow)";
        }
        dot += "  s" + std::to_string(id) + " [label=\"" + label + "\"];\n";
    }
    int entry = 0;
    for (const auto& [key, tr] : store.transitions) {
        std::string label = dot_escape(render_jump(tr.jump, tr.support));
        if (key.first == kNullState) {
            std::string point = "__init" + std::to_string(entry++);
            dot += "  " + point + " [shape=point];\n";
            dot += "  " + point + " -> s" + std::to_string(key.second) + " [label=\"" + label +
                   "\"];\n";
        } else {
            dot += "  s" + std::to_string(key.first) + " -> s" + std::to_string(key.second) +
                   " [label=\"" + label + "\"];\n";
        }
    }
    dot += "}\n";
    return dot;
}

} // namespace halearn
