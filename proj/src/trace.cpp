#include "halearn/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace halearn {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonUniformSampling: return "NonUniformSampling";
        case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::NonBinaryChannel: return "NonBinaryChannel";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptySequence: return "EmptySequence";
        case ErrorCode::EmptyState: return "EmptyState";
        case ErrorCode::TraceTooShort: return "TraceTooShort";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::Underdetermined: return "Underdetermined";
        case ErrorCode::DegenerateDesign: return "DegenerateDesign";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::MalformedDocument: return "MalformedDocument";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::size_t> ChannelSchema::input_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].role == Role::Input) out.push_back(i);
    return out;
}

std::vector<std::size_t> ChannelSchema::output_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].role == Role::Output) out.push_back(i);
    return out;
}

std::optional<std::size_t> ChannelSchema::find(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name == name) return i;
    return std::nullopt;
}

bool ChannelSchema::operator==(const ChannelSchema& other) const {
    if (time_index != other.time_index || channels.size() != other.channels.size())
        return false;
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name != other.channels[i].name ||
            channels[i].role != other.channels[i].role)
            return false;
    return true;
}

namespace {

constexpr double kSamplingTolerance = 1e-6;  // relative to the sampling period

double parse_number(const std::string& field, std::size_t row) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw Error(ErrorCode::MalformedDocument,
                    "row " + std::to_string(row) + ": cannot parse number '" + field + "'");
    if (!std::isfinite(v))
        throw Error(ErrorCode::MalformedDocument,
                    "row " + std::to_string(row) + ": non-finite value");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return fields;
}

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
        out << contents;
        if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename temp file onto '" + path + "'");
    }
}

} // namespace

void IOTrace::validate() const {
    const std::size_t p = times.size();
    if (p < 2) throw Error(ErrorCode::EmptyTrace, "trace needs at least 2 samples");
    if (schema.channels.empty() || schema.time_index != 0)
        throw Error(ErrorCode::SchemaMismatch, "schema must designate column 0 as time");
    if (channels.size() != schema.channels.size())
        throw Error(ErrorCode::SchemaMismatch, "channel count does not match schema");
    for (std::size_t c = 0; c < channels.size(); ++c)
        if (channels[c].size() != p)
            throw Error(ErrorCode::SchemaMismatch,
                        "channel '" + schema.channels[c].name + "' length mismatch");
    if (schema.input_indices().empty())
        throw Error(ErrorCode::SchemaMismatch, "no input channel");
    for (std::size_t i = 1; i < p; ++i) {
        if (times[i] <= times[i - 1])
            throw Error(ErrorCode::NonMonotonicTime, "at row " + std::to_string(i + 1));
        double gap = times[i] - times[i - 1];
        if (std::abs(gap - sampling_period) > kSamplingTolerance * std::abs(sampling_period))
            throw Error(ErrorCode::NonUniformSampling, "at row " + std::to_string(i + 1));
    }
}

ChannelSchema schema_from_header(const std::vector<std::string>& names) {
    if (names.empty())
        throw Error(ErrorCode::MalformedDocument, "empty header row");
    ChannelSchema schema;
    schema.time_index = 0;
    bool any_output_prefix = false;
    std::vector<bool> prefixed(names.size(), false);
    for (std::size_t i = 0; i < names.size(); ++i) {
        Channel ch;
        const std::string& raw = names[i];
        if (raw.rfind("i:", 0) == 0) {
            ch.name = raw.substr(2);
            ch.role = Role::Input;
            prefixed[i] = true;
        } else if (raw.rfind("o:", 0) == 0) {
            if (i == 0)
                throw Error(ErrorCode::InvalidArgument, "time column cannot be an output");
            ch.name = raw.substr(2);
            ch.role = Role::Output;
            any_output_prefix = true;
            prefixed[i] = true;
        } else {
            ch.name = raw;
            ch.role = Role::Input;
        }
        if (ch.name.empty())
            throw Error(ErrorCode::MalformedDocument, "empty column name in header");
        schema.channels.push_back(ch);
    }
    // Without explicit roles, treat the last plain column as the output.
    if (!any_output_prefix) {
        for (std::size_t i = names.size(); i-- > 1;) {
            if (!prefixed[i]) {
                schema.channels[i].role = Role::Output;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < schema.channels.size(); ++i)
        for (std::size_t j = i + 1; j < schema.channels.size(); ++j)
            if (schema.channels[i].name == schema.channels[j].name)
                throw Error(ErrorCode::MalformedDocument,
                            "duplicate column name '" + schema.channels[i].name + "'");
    return schema;
}

namespace {

IOTrace load_trace_impl(const std::string& path, const ChannelSchema* expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyTrace, "'" + path + "' has no header row");
    ChannelSchema schema = schema_from_header(split_csv_line(line));
    if (expected) {
        for (const auto& ch : expected->channels)
            if (!schema.find(ch.name))
                throw Error(ErrorCode::MissingColumn,
                            "'" + path + "' lacks column '" + ch.name + "'");
        if (!(schema == *expected))
            throw Error(ErrorCode::SchemaMismatch,
                        "'" + path + "' header does not match the expected schema");
    }

    IOTrace trace;
    trace.schema = schema;
    trace.channels.assign(schema.size(), {});
    std::size_t row = 1;  // data row counter, 1-based
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != schema.size())
            throw Error(ErrorCode::MalformedDocument,
                        "row " + std::to_string(row) + ": expected " +
                            std::to_string(schema.size()) + " fields, got " +
                            std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c)
            trace.channels[c].push_back(parse_number(fields[c], row));
        ++row;
    }
    trace.times = trace.channels[schema.time_index];
    if (trace.times.size() < 2)
        throw Error(ErrorCode::EmptyTrace, "'" + path + "' has fewer than 2 data rows");
    trace.sampling_period = trace.times[1] - trace.times[0];
    trace.validate();
    return trace;
}

} // namespace

IOTrace load_trace(const std::string& path) { return load_trace_impl(path, nullptr); }

IOTrace load_trace(const std::string& path, const ChannelSchema& expected) {
    return load_trace_impl(path, &expected);
}

void save_trace_csv(const IOTrace& trace, const std::string& path) {
    std::string out;
    for (std::size_t c = 0; c < trace.schema.size(); ++c) {
        if (c) out += ',';
        out += trace.schema.channels[c].role == Role::Input ? "i:" : "o:";
        out += trace.schema.channels[c].name;
    }
    out += '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        for (std::size_t c = 0; c < trace.channels.size(); ++c) {
            if (c) out += ',';
            out += format_double(trace.channels[c][i]);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

std::pair<IOTrace, NormalizationParams> normalize(const IOTrace& trace) {
    NormalizationParams params;
    params.range.resize(trace.channels.size());
    for (std::size_t c = 0; c < trace.channels.size(); ++c) {
        auto [mn, mx] = std::minmax_element(trace.channels[c].begin(), trace.channels[c].end());
        params.range[c] = {*mn, *mx};
    }
    params.time_start = trace.times.front();
    params.time_end = trace.times.back();
    return {normalize_with(trace, params), params};
}

IOTrace normalize_with(const IOTrace& trace, const NormalizationParams& params) {
    if (params.range.size() != trace.channels.size())
        throw Error(ErrorCode::SchemaMismatch, "normalization params cover a different schema");
    IOTrace out = trace;
    for (std::size_t c = 0; c < out.channels.size(); ++c) {
        auto [lo, hi] = params.range[c];
        double span = hi - lo;
        for (double& v : out.channels[c]) v = span == 0.0 ? 0.0 : (v - lo) / span;
    }
    return out;
}

IOTrace denormalize(const IOTrace& trace, const NormalizationParams& params) {
    if (params.range.size() != trace.channels.size())
        throw Error(ErrorCode::SchemaMismatch, "normalization params cover a different schema");
    IOTrace out = trace;
    for (std::size_t c = 0; c < out.channels.size(); ++c) {
        auto [lo, hi] = params.range[c];
        double span = hi - lo;
        for (double& v : out.channels[c]) v = span == 0.0 ? lo : v * span + lo;
    }
    return out;
}

IOTrace to_frequency(const IOTrace& trace, std::size_t window,
                     const std::vector<std::string>& channel_names) {
    trace.validate();
    if (window < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2 samples");

    std::vector<bool> convert(trace.channels.size(), false);
    if (channel_names.empty()) {
        for (std::size_t c = 0; c < trace.channels.size(); ++c)
            convert[c] = !trace.schema.is_time(c);
    } else {
        for (const auto& name : channel_names) {
            auto idx = trace.schema.find(name);
            if (!idx) throw Error(ErrorCode::MissingColumn, "no channel named '" + name + "'");
            if (trace.schema.is_time(*idx))
                throw Error(ErrorCode::InvalidArgument, "cannot convert the time column");
            convert[*idx] = true;
        }
    }
    for (std::size_t c = 0; c < trace.channels.size(); ++c) {
        if (!convert[c]) continue;
        for (double v : trace.channels[c])
            if (v != 0.0 && v != 1.0)
                throw Error(ErrorCode::NonBinaryChannel,
                            "channel '" + trace.schema.channels[c].name + "' is not {0,1}-valued");
    }

    const std::size_t p = trace.size();
    const std::size_t w = std::min(window, p);  // window longer than trace: one point
    const std::size_t n_out = p - w + 1;
    const double c0 = trace.sampling_period;

    IOTrace out;
    out.schema = trace.schema;
    out.channels.assign(trace.channels.size(), {});
    out.times.reserve(n_out);
    for (std::size_t k = 0; k < n_out; ++k)
        out.times.push_back((trace.times[k] + trace.times[k + w - 1]) / 2.0);
    out.sampling_period = n_out > 1 ? out.times[1] - out.times[0] : c0;

    for (std::size_t c = 0; c < trace.channels.size(); ++c) {
        const auto& src = trace.channels[c];
        auto& dst = out.channels[c];
        dst.reserve(n_out);
        if (trace.schema.is_time(c)) {
            dst = out.times;
        } else if (convert[c]) {
            // Count rising edges whose high sample lies inside the window, so a
            // full period always contributes exactly one edge.
            std::vector<double> edges(p, 0.0);
            for (std::size_t i = 1; i < p; ++i)
                edges[i] = (src[i - 1] == 0.0 && src[i] == 1.0) ? 1.0 : 0.0;
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) acc += edges[i];
            const double duration = static_cast<double>(w) * c0;
            dst.push_back(acc / duration);
            for (std::size_t k = 1; k < n_out; ++k) {
                acc += edges[k + w - 1] - edges[k - 1];
                dst.push_back(acc / duration);
            }
        } else {
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) acc += src[i];
            dst.push_back(acc / static_cast<double>(w));
            for (std::size_t k = 1; k < n_out; ++k) {
                acc += src[k + w - 1] - src[k - 1];
                dst.push_back(acc / static_cast<double>(w));
            }
        }
    }
    if (n_out < 2) {
        // Degenerate single-point result cannot satisfy trace invariants;
        // duplicate the point so downstream consumers still get a valid trace.
        for (std::size_t c = 0; c < out.channels.size(); ++c)
            out.channels[c].push_back(out.channels[c].back());
        out.times.push_back(out.times.back() + c0);
        out.channels[out.schema.time_index] = out.times;
    }
    return out;
}

IOTrace slice_trace(const IOTrace& trace, std::size_t start, std::size_t end) {
    if (start > end || end >= trace.size())
        throw Error(ErrorCode::InvalidArgument, "slice range out of bounds");
    IOTrace out;
    out.schema = trace.schema;
    out.sampling_period = trace.sampling_period;
    out.times.assign(trace.times.begin() + start, trace.times.begin() + end + 1);
    out.channels.reserve(trace.channels.size());
    for (const auto& ch : trace.channels)
        out.channels.emplace_back(ch.begin() + start, ch.begin() + end + 1);
    return out;
}

} // namespace halearn
