#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halearn/errors.hpp"

namespace halearn {

enum class Role { Input, Output };

struct Channel {
    std::string name;
    Role role = Role::Input;
};

/// Column layout of a trace file. Column 0 is always the time column (seconds,
/// strictly increasing, uniform step); it doubles as an input channel so that
/// time can participate in jump mining like any other input signal.
struct ChannelSchema {
    std::vector<Channel> channels;  // in column order
    std::size_t time_index = 0;

    std::size_t size() const { return channels.size(); }
    bool is_time(std::size_t i) const { return i == time_index; }
    std::vector<std::size_t> input_indices() const;   // includes the time column
    std::vector<std::size_t> output_indices() const;
    std::optional<std::size_t> find(const std::string& name) const;
    bool operator==(const ChannelSchema& other) const;
};

/// Affine per-channel ranges captured from the first trace of a learning run.
/// They are frozen afterwards: later traces are mapped with the same ranges and
/// may fall outside [0,1] (no clamping), so stored segments stay comparable.
struct NormalizationParams {
    std::vector<std::pair<double, double>> range;  // (min,max) per column
    double time_start = 0.0;
    double time_end = 1.0;

    double time_span() const { return time_end - time_start; }
};

/// Uniformly sampled multivariate input/output trace. `channels[time_index]`
/// holds the time column values (equal to `times` until normalization rescales
/// them); `times` itself always stays in raw seconds.
struct IOTrace {
    ChannelSchema schema;
    std::vector<double> times;
    std::vector<std::vector<double>> channels;  // [column][sample]
    double sampling_period = 0.0;

    std::size_t size() const { return times.size(); }
    void validate() const;  // throws on broken invariants
};

/// Derive a schema from a CSV header row. "i:"/"o:" prefixes set the role and
/// are stripped from the name; unprefixed columns default to input, except that
/// the last unprefixed column becomes the output when no "o:" column exists.
ChannelSchema schema_from_header(const std::vector<std::string>& names);

IOTrace load_trace(const std::string& path);
IOTrace load_trace(const std::string& path, const ChannelSchema& expected);

/// Writes "i:"/"o:" prefixed headers and shortest round-trip float formatting;
/// the write is atomic (temp file + rename).
void save_trace_csv(const IOTrace& trace, const std::string& path);

std::pair<IOTrace, NormalizationParams> normalize(const IOTrace& trace);
IOTrace normalize_with(const IOTrace& trace, const NormalizationParams& params);
IOTrace denormalize(const IOTrace& trace, const NormalizationParams& params);

/// Square-wave preprocessing: selected binary {0,1} channels are replaced by
/// the rising-edge rate (Hz) over a sliding window of `window` samples;
/// unselected channels are window-averaged. Output timestamps sit at window
/// centers. An empty selection means every non-time channel.
IOTrace to_frequency(const IOTrace& trace, std::size_t window,
                     const std::vector<std::string>& channel_names = {});

/// Inclusive sample range copy, keeping schema and raw units.
IOTrace slice_trace(const IOTrace& trace, std::size_t start, std::size_t end);

std::string format_double(double v);  // shortest round-trip representation

} // namespace halearn
