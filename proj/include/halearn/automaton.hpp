#pragma once

#include <string>
#include <vector>

#include "halearn/model.hpp"

namespace halearn {

/// Fit a state's flow polynomial from its stored segments: every output channel
/// regressed on the monomials of the input channels. The time input enters as
/// normalized time since segment start, so recurring modes share one response
/// curve regardless of when they were visited.
PolynomialFlow fit_state_flow(const StateRecord& state, const ChannelSchema& schema,
                              double time_span, int degree, double ridge);

/// Turn the store into a hybrid automaton in place: fit flows (states whose fit
/// is underdetermined are flagged, not fatal), mine jump labels, validate the
/// structure, and warn about modes unreachable from the initial ones.
void finalize(ModelStore& store, std::vector<std::string>* warnings = nullptr);

/// Replay an input trace through the automaton. `inputs` must carry the model's
/// input channels (outputs, if present, are ignored); the result holds the time
/// column plus predicted outputs in raw units. A switch fires when every clause
/// crosses from its before-value to its after-value between consecutive samples
/// (within the event tolerance) or when the source mode's time condition
/// elapses; simultaneously enabled switches resolve by support, then target id.
IOTrace simulate(const ModelStore& store, const IOTrace& inputs);

/// Mean per-trace RMSE between predicted and actual outputs over all output
/// channels and samples, in normalized units.
double cost(const ModelStore& store, const std::vector<IOTrace>& tests);

/// Graphviz rendering: one node per mode labeled with its flow, a source-less
/// arrow into every initial mode, and jump-labeled edges.
std::string to_dot(const ModelStore& store);

} // namespace halearn
