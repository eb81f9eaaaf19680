#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "halearn/dtw.hpp"
#include "halearn/model.hpp"
#include "halearn/segmentation.hpp"

namespace halearn {

/// Mean length-normalized DTW distance and mean diagonality between a segment
/// and the stored representatives of a state (non-time channels only).
SimIndex segment_state_similarity(const Segment& seg, const StateRecord& state,
                                  const ChannelSchema& schema);

/// Scan states in ascending id order; a state displaces the incumbent candidate
/// only when its distance is strictly lower AND its diagonality strictly higher.
/// Returns the surviving candidate; thresholds are the caller's business.
std::optional<std::pair<int, SimIndex>> find_candidate_state(const Segment& seg,
                                                             const ModelStore& store);

/// One pass of the online loop over the segments of a single normalized trace:
/// attach each segment to the accepted or freshly created state, extend the
/// (current -> chosen) transition with the change-point neighborhood of the
/// segment's first sample, and update confidences. The current-state cursor
/// starts at null for every trace.
void process_trace(ModelStore& store, const std::vector<Segment>& segments);

/// Full per-trace pipeline on a raw trace: schema capture/check, normalization
/// (parameters frozen on the first trace), change-point detection, segmentation,
/// the online loop, and a refresh of flow and jump labels.
void learn_trace(ModelStore& store, const IOTrace& raw,
                 std::vector<std::string>* warnings = nullptr);

} // namespace halearn
