#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halearn/flows.hpp"
#include "halearn/trace.hpp"

namespace halearn {

/// Tolerance for matching clause endpoints, both when rendering deterministic
/// jump labels and when firing clauses during simulation (normalized units).
inline constexpr double kEventEps = 0.05;

struct LearnerConfig {
    double dist_threshold = 0.1;
    double diag_threshold = 0.8;
    std::size_t window = 20;      // W, samples
    std::size_t min_size = 20;    // change-point spacing, samples
    std::size_t vicinity = 10;    // v, neighborhood half-width
    double penalty = 0.0;         // <= 0: auto (3x median discrepancy, per trace)
    std::size_t max_stored = 8;   // K, stored segments per state
    int degree = 2;
    double ridge = 1e-8;
    double beta = 5.0;            // confidence decay
    double time_var_threshold = 1e-3;  // normalized time^2

    void validate() const;
};

/// Owned copy of a segment attached to a state (source traces are discarded
/// after processing; the online contract forbids revisiting them).
struct StoredSegment {
    std::size_t start = 0;
    std::size_t end = 0;
    double period = 0.0;                        // seconds
    double duration = 0.0;                      // seconds
    std::vector<std::vector<double>> channels;  // normalized, schema order
};

struct StateRecord {
    int id = 0;
    std::vector<StoredSegment> segments;  // at most K, oldest evicted first
    std::vector<double> dwell;            // seconds, one per attached segment, never evicted
    std::size_t visits = 0;
    std::optional<PolynomialFlow> flow;   // filled by finalize
    std::string flow_error;               // set when the fit is impossible
};

struct StoredNeighborhood {
    std::size_t center = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> channels;  // normalized, schema order
};

struct Clause {
    std::string channel;
    double before = 0.0;
    double after = 0.0;
};

struct JumpCondition {
    std::vector<Clause> clauses;
    std::optional<double> time_condition;  // normalized time units
    bool ambiguous = false;
};

/// A (source, target) switch with its evidence. `src == kNullState` marks an
/// initial transition. Confidence bookkeeping: `dist_mean[k]` is the running
/// mean of the per-update neighborhood distances for input k and
/// `confidence[k] = exp(-beta * dist_mean[k])`.
inline constexpr int kNullState = -1;

struct TransitionRecord {
    int src = kNullState;
    int dst = 0;
    std::vector<StoredNeighborhood> segments;
    std::vector<double> confidence;  // one per input channel
    std::vector<double> dist_mean;
    std::size_t updates = 0;
    std::size_t support = 0;
    JumpCondition jump;  // filled by finalize
};

/// The online model: cluster stores while learning, and once finalized also the
/// hybrid automaton itself (modes carry flows, switches carry jump conditions).
struct ModelStore {
    LearnerConfig config;
    ChannelSchema schema;  // empty until the first trace arrives
    std::optional<NormalizationParams> normalization;
    std::map<int, StateRecord> states;
    std::map<std::pair<int, int>, TransitionRecord> transitions;
    std::size_t traces_processed = 0;
    int next_id = 0;

    bool empty() const { return states.empty(); }
    std::vector<int> initial_modes() const;
    void check_invariants() const;  // throws on structural corruption
};

} // namespace halearn
