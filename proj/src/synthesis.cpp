#include "halearn/synthesis.hpp"

#include <limits>

#include "halearn/automaton.hpp"
#include "halearn/errors.hpp"
#include "halearn/jumps.hpp"

namespace halearn {

namespace {

Series stored_series(const StoredSegment& seg, const ChannelSchema& schema) {
    Series out;
    for (std::size_t c = 0; c < seg.channels.size(); ++c)
        if (!schema.is_time(c)) out.push_back(seg.channels[c]);
    return out;
}

StoredSegment copy_segment(const Segment& seg) {
    StoredSegment out;
    out.start = seg.start;
    out.end = seg.end;
    out.period = seg.trace->sampling_period;
    out.duration = seg.duration();
    out.channels.reserve(seg.trace->channels.size());
    for (const auto& ch : seg.trace->channels)
        out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(seg.start),
                                  ch.begin() + static_cast<std::ptrdiff_t>(seg.end) + 1);
    return out;
}

void attach_segment(ModelStore& store, StateRecord& state, const Segment& seg) {
    state.segments.push_back(copy_segment(seg));
    while (state.segments.size() > store.config.max_stored)
        state.segments.erase(state.segments.begin());  // evict oldest
    state.dwell.push_back(seg.duration());
    state.visits += 1;
}

int create_state(ModelStore& store, const Segment& seg) {
    StateRecord state;
    state.id = store.next_id++;
    attach_segment(store, state, seg);
    int id = state.id;
    store.states.emplace(id, std::move(state));
    return id;
}

void record_transition(ModelStore& store, int src, int dst, const Neighborhood& nb) {
    auto key = std::make_pair(src, dst);
    auto it = store.transitions.find(key);
    if (it == store.transitions.end()) {
        TransitionRecord tr;
        tr.src = src;
        tr.dst = dst;
        it = store.transitions.emplace(key, std::move(tr)).first;
    }
    update_confidence(it->second, nb, store.schema, store.config.beta);
    it->second.support += 1;
}

} // namespace

SimIndex segment_state_similarity(const Segment& seg, const StateRecord& state,
                                  const ChannelSchema& schema) {
    std::vector<Series> stored;
    stored.reserve(state.segments.size());
    for (const auto& s : state.segments) stored.push_back(stored_series(s, schema));
    return similarity_to_stored(segment_series(seg), stored);
}

std::optional<std::pair<int, SimIndex>> find_candidate_state(const Segment& seg,
                                                             const ModelStore& store) {
    std::optional<int> candidate;
    double best_dist = std::numeric_limits<double>::infinity();
    double best_diag = 0.0;
    for (const auto& [id, state] : store.states) {  // ascending id
        SimIndex sim = segment_state_similarity(seg, state, store.schema);
        if (sim.distance < best_dist && sim.diagonality > best_diag) {
            best_dist = sim.distance;
            best_diag = sim.diagonality;
            candidate = id;
        }
    }
    if (!candidate) return std::nullopt;
    return std::make_pair(*candidate, SimIndex{best_dist, best_diag});
}

void process_trace(ModelStore& store, const std::vector<Segment>& segments) {
    int current = kNullState;
    for (const Segment& seg : segments) {
        Neighborhood nb = make_neighborhood(*seg.trace, seg.start, store.config.vicinity);
        int chosen;
        if (store.empty()) {
            chosen = create_state(store, seg);
        } else {
            auto candidate = find_candidate_state(seg, store);
            if (candidate && candidate->second.distance < store.config.dist_threshold &&
                candidate->second.diagonality > store.config.diag_threshold) {
                chosen = candidate->first;
                attach_segment(store, store.states.at(chosen), seg);
            } else {
                chosen = create_state(store, seg);
            }
        }
        record_transition(store, current, chosen, nb);
        current = chosen;
    }
    store.traces_processed += 1;
}

void learn_trace(ModelStore& store, const IOTrace& raw, std::vector<std::string>* warnings) {
    store.config.validate();
    raw.validate();
    IOTrace trace;
    if (!store.normalization) {
        store.schema = raw.schema;
        if (raw.schema.output_indices().empty())
            throw Error(ErrorCode::SchemaMismatch, "learning traces need an output channel");
        auto [normed, params] = normalize(raw);
        store.normalization = params;
        trace = std::move(normed);
    } else {
        if (!(raw.schema == store.schema))
            throw Error(ErrorCode::SchemaMismatch,
                        "trace channels differ from the model's schema");
        trace = normalize_with(raw, *store.normalization);
    }
    ChangePointSet cps = detect_change_points(trace, store.config.window,
                                              store.config.min_size, store.config.penalty);
    std::vector<Segment> segments = split_segments(trace, cps);
    process_trace(store, segments);
    finalize(store, warnings);
}

} // namespace halearn
