#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halearn/model.hpp"
#include "halearn/segmentation.hpp"

namespace halearn {

/// Append a change-point neighborhood to a transition and refresh its per-input
/// confidence levels. The first neighborhood sets every confidence to 1.0;
/// afterwards confidence_k = exp(-beta * running mean of the length-normalized
/// euclidean distance between the new window and each stored one).
void update_confidence(TransitionRecord& tr, const Neighborhood& nb,
                       const ChannelSchema& schema, double beta);

/// Mean dwell time of a state in normalized units, when its dwell durations are
/// consistent enough (sample variance below the threshold). Needs >= 2 samples.
std::optional<double> mine_time_condition(const StateRecord& state, double theta_time_var,
                                          double time_span);

/// Build a JumpCondition for every transition: an event clause on the most
/// confident non-time input (endpoints estimated from the neighborhood edges),
/// plus the source state's time condition. Outgoing labels of one state that
/// stay indistinguishable gain further AND clauses, channel by channel in
/// confidence order; if nothing separates them they are marked ambiguous and
/// reported through `warnings`.
void build_jump_labels(ModelStore& store, std::vector<std::string>* warnings = nullptr);

/// Textual form: "chan:a->b&time:x (support)".
std::string render_jump(const JumpCondition& jump, std::size_t support);

} // namespace halearn
