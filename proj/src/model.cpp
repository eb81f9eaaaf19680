#include "halearn/model.hpp"

#include "halearn/errors.hpp"

namespace halearn {

void LearnerConfig::validate() const {
    if (dist_threshold <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "dist_threshold must be positive");
    if (diag_threshold <= 0.0 || diag_threshold > 1.0)
        throw Error(ErrorCode::InvalidArgument, "diag_threshold must be in (0,1]");
    if (window < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
    if (min_size == 0) throw Error(ErrorCode::InvalidArgument, "min_size must be positive");
    if (vicinity == 0) throw Error(ErrorCode::InvalidArgument, "vicinity must be positive");
    if (max_stored == 0) throw Error(ErrorCode::InvalidArgument, "max_stored must be positive");
    if (degree < 1) throw Error(ErrorCode::InvalidArgument, "degree must be >= 1");
    if (ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge must be >= 0");
    if (beta <= 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    if (time_var_threshold <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "time_var_threshold must be positive");
}

std::vector<int> ModelStore::initial_modes() const {
    std::vector<int> out;
    for (const auto& [key, tr] : transitions)
        if (key.first == kNullState) out.push_back(key.second);
    return out;
}

void ModelStore::check_invariants() const {
    for (const auto& [key, tr] : transitions) {
        if (key.first != kNullState && !states.count(key.first))
            throw Error(ErrorCode::MalformedDocument,
                        "transition source " + std::to_string(key.first) + " is not a state");
        if (!states.count(key.second))
            throw Error(ErrorCode::MalformedDocument,
                        "transition target " + std::to_string(key.second) + " is not a state");
        if (tr.src != key.first || tr.dst != key.second)
            throw Error(ErrorCode::MalformedDocument, "transition key/record mismatch");
        std::size_t len = 0;
        for (const auto& nb : tr.segments) {
            if (len == 0) len = nb.times.size();
            if (nb.times.size() != len)
                throw Error(ErrorCode::LengthMismatch, "transition segments differ in length");
        }
    }
    for (const auto& [id, st] : states) {
        if (st.id != id)
            throw Error(ErrorCode::MalformedDocument, "state key/record mismatch");
        if (st.segments.size() > config.max_stored)
            throw Error(ErrorCode::MalformedDocument, "state stores more than K segments");
        if (st.visits < st.segments.size())
            throw Error(ErrorCode::MalformedDocument, "state visit count below stored count");
        std::size_t out_support = 0;
        for (const auto& [key, tr] : transitions)
            if (key.first == id) out_support += tr.support;
        if (out_support > st.visits)
            throw Error(ErrorCode::MalformedDocument,
                        "outgoing supports exceed visits of state " + std::to_string(id));
    }
    if (!states.empty()) {
        std::size_t initial_support = 0;
        for (const auto& [key, tr] : transitions)
            if (key.first == kNullState) initial_support += tr.support;
        if (initial_support != traces_processed)
            throw Error(ErrorCode::MalformedDocument,
                        "initial supports do not sum to the trace count");
    }
}

} // namespace halearn
