#include "halearn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "halearn/errors.hpp"

namespace halearn {

using nlohmann::json;

std::uint64_t Rng::splitmix() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() { return splitmix(); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

namespace {

constexpr double kThermOnRate = 5.0;
constexpr double kThermDecay = 0.1;
constexpr double kThermHigh = 21.0;
constexpr double kThermLow = 19.0;

double therm_rate(double x, bool on) {
    return on ? kThermOnRate - kThermDecay * x : -kThermDecay * x;
}

// Unit triangle wave: tri(0) = 0, rising, peaks +1 at 0.25, -1 at 0.75.
double tri_wave(double s) {
    double f = s - std::floor(s);
    if (f < 0.25) return 4.0 * f;
    if (f < 0.75) return 2.0 - 4.0 * f;
    return 4.0 * f - 4.0;
}

} // namespace

std::vector<IOTrace> gen_thermostat(int n_traces, std::uint64_t seed, double period,
                                    double duration) {
    if (n_traces < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trace");
    if (period <= 0.0 || duration < 10.0 * period)
        throw Error(ErrorCode::InvalidArgument, "bad period/duration");

    std::vector<IOTrace> traces;
    traces.reserve(static_cast<std::size_t>(n_traces));
    Rng rng(seed);

    for (int t = 0; t < n_traces; ++t) {
        double x = 20.0;
        bool on = false;

        // Randomize the sampling phase with one fractional warm-up step, then
        // run unrecorded until a randomized entry into mode off so the recorded
        // trace always starts at a mode boundary.
        x += rng.uniform() * period * therm_rate(x, on);
        int offs_needed = 1 + static_cast<int>(rng.uniform() * 3.0);
        while (offs_needed > 0) {
            x += period * therm_rate(x, on);
            if (on && x >= kThermHigh) {
                on = false;
                --offs_needed;
            } else if (!on && x <= kThermLow) {
                on = true;
            }
        }

        const std::size_t max_samples = static_cast<std::size_t>(duration / period) + 1;
        std::vector<double> xs = {x};
        std::size_t last_switch = 0;
        while (xs.size() < max_samples) {
            x += period * therm_rate(x, on);
            bool switched = false;
            if (on && x >= kThermHigh) {
                on = false;
                switched = true;
            } else if (!on && x <= kThermLow) {
                on = true;
                switched = true;
            }
            xs.push_back(x);
            if (switched) last_switch = xs.size() - 1;
        }
        if (last_switch >= 2) xs.resize(last_switch);  // whole dwell periods only

        IOTrace trace;
        trace.schema.time_index = 0;
        trace.schema.channels = {{"time", Role::Input}, {"temp", Role::Output}};
        trace.sampling_period = period;
        trace.times.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            trace.times.push_back(static_cast<double>(i) * period);
        trace.channels = {trace.times, xs};
        trace.validate();
        traces.push_back(std::move(trace));
    }
    return traces;
}

void PlantSpec::validate() const {
    if (period <= 0.0 || duration <= period)
        throw Error(ErrorCode::InvalidSpec, "bad period/duration");
    if (n_traces < 1) throw Error(ErrorCode::InvalidSpec, "n_traces must be >= 1");
    if (degree < 1) throw Error(ErrorCode::InvalidSpec, "degree must be >= 1");
    if (noise < 0.0) throw Error(ErrorCode::InvalidSpec, "noise must be >= 0");
    if (outputs.empty()) throw Error(ErrorCode::InvalidSpec, "no output channels");
    if (modes.empty()) throw Error(ErrorCode::InvalidSpec, "no modes");
    if (initial_mode < 0 || initial_mode >= static_cast<int>(modes.size()))
        throw Error(ErrorCode::InvalidSpec, "initial mode out of range");

    std::map<std::string, std::size_t> trig_index;
    for (std::size_t i = 0; i < triggers.size(); ++i) {
        const TriggerSpec& tr = triggers[i];
        if (tr.name.empty() || tr.name == "time")
            throw Error(ErrorCode::InvalidSpec, "bad trigger name");
        if (trig_index.count(tr.name))
            throw Error(ErrorCode::InvalidSpec, "duplicate trigger '" + tr.name + "'");
        if (tr.time_min > tr.time_max || tr.time_min < 0.0)
            throw Error(ErrorCode::InvalidSpec, "bad step-time range for '" + tr.name + "'");
        if (tr.texture_amp < 0.0 || tr.texture_period <= 0.0)
            throw Error(ErrorCode::InvalidSpec, "bad texture for '" + tr.name + "'");
        if (!tr.after.empty() && !trig_index.count(tr.after))
            throw Error(ErrorCode::InvalidSpec,
                        "trigger '" + tr.name + "' chained to an unknown or later trigger");
        trig_index[tr.name] = i;
    }
    const std::size_t n_monomials = monomial_basis(1 + triggers.size(), degree).size();
    for (const ModeFlowSpec& mode : modes) {
        if (mode.coef.size() != outputs.size())
            throw Error(ErrorCode::InvalidSpec, "mode flow count != output count");
        for (const auto& coef : mode.coef)
            if (coef.size() != n_monomials)
                throw Error(ErrorCode::InvalidSpec, "mode flow coefficient arity mismatch");
    }
    for (const SwitchSpec& sw : switches) {
        if (sw.src < 0 || sw.src >= static_cast<int>(modes.size()) || sw.dst < 0 ||
            sw.dst >= static_cast<int>(modes.size()))
            throw Error(ErrorCode::InvalidSpec, "switch endpoint out of range");
        if (!trig_index.count(sw.input))
            throw Error(ErrorCode::InvalidSpec, "switch guard '" + sw.input + "' is not a trigger");
    }
}

std::vector<IOTrace> gen_polyplant(const PlantSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n_trig = spec.triggers.size();
    const auto basis = monomial_basis(1 + n_trig, spec.degree);
    const std::size_t p = static_cast<std::size_t>(spec.duration / spec.period) + 1;

    // Step-time draw order: absolute triggers first come first; chained ones
    // (time range measured after another trigger's step) follow their parent.
    std::map<std::string, std::size_t> trig_index;
    for (std::size_t i = 0; i < n_trig; ++i) trig_index[spec.triggers[i].name] = i;

    std::vector<IOTrace> traces;
    traces.reserve(static_cast<std::size_t>(spec.n_traces));
    for (int t = 0; t < spec.n_traces; ++t) {
        std::vector<double> step_time(n_trig, 0.0);
        for (std::size_t k = 0; k < n_trig; ++k) {
            const TriggerSpec& tr = spec.triggers[k];
            double base = 0.0;
            if (!tr.after.empty()) {
                auto it = trig_index.find(tr.after);
                if (it == trig_index.end() || it->second >= k)
                    throw Error(ErrorCode::InvalidSpec,
                                "trigger '" + tr.name + "' chained to an unknown or later one");
                base = step_time[it->second];
            }
            step_time[k] = base + rng.uniform(tr.time_min, tr.time_max);
        }

        std::vector<std::vector<double>> u(n_trig, std::vector<double>(p, 0.0));
        std::vector<double> times(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            double ti = static_cast<double>(i) * spec.period;
            times[i] = ti;
            for (std::size_t k = 0; k < n_trig; ++k) {
                const TriggerSpec& tr = spec.triggers[k];
                double base = ti >= step_time[k] ? 1.0 : 0.0;
                double texture =
                    tr.texture_amp * tri_wave((ti - step_time[k]) / tr.texture_period);
                u[k][i] = base + texture;
            }
        }

        std::vector<std::vector<double>> y(spec.outputs.size(), std::vector<double>(p, 0.0));
        int mode = spec.initial_mode;
        double entry = 0.0;
        std::vector<double> vars(1 + n_trig, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            if (i > 0) {
                for (const SwitchSpec& sw : spec.switches) {
                    if (sw.src != mode) continue;
                    double tau = step_time[trig_index.at(sw.input)];
                    if (times[i - 1] < tau && tau <= times[i]) {
                        mode = sw.dst;
                        entry = times[i];
                        break;
                    }
                }
            }
            vars[0] = times[i] - entry;
            for (std::size_t k = 0; k < n_trig; ++k) vars[k + 1] = u[k][i];
            for (std::size_t o = 0; o < spec.outputs.size(); ++o) {
                double acc = 0.0;
                for (std::size_t j = 0; j < basis.size(); ++j) {
                    double mono = 1.0;
                    for (std::size_t v = 0; v < vars.size(); ++v)
                        for (int e = 0; e < basis[j][v]; ++e) mono *= vars[v];
                    acc += spec.modes[static_cast<std::size_t>(mode)].coef[o][j] * mono;
                }
                if (spec.noise > 0.0) acc += spec.noise * rng.gaussian();
                y[o][i] = acc;
            }
        }

        IOTrace trace;
        trace.schema.time_index = 0;
        trace.schema.channels.push_back({"time", Role::Input});
        for (const TriggerSpec& tr : spec.triggers)
            trace.schema.channels.push_back({tr.name, Role::Input});
        for (const std::string& name : spec.outputs)
            trace.schema.channels.push_back({name, Role::Output});
        trace.times = times;
        trace.sampling_period = spec.period;
        trace.channels.push_back(times);
        for (auto& ch : u) trace.channels.push_back(std::move(ch));
        for (auto& ch : y) trace.channels.push_back(std::move(ch));
        trace.validate();
        traces.push_back(std::move(trace));
    }
    return traces;
}

namespace {

std::vector<double> dense_coefficients(const json& terms, std::size_t nvars, int degree) {
    const auto basis = monomial_basis(nvars, degree);
    std::vector<double> coef(basis.size(), 0.0);
    for (const auto& term : terms) {
        auto exps = term.at("exponents").get<std::vector<int>>();
        if (exps.size() != nvars)
            throw Error(ErrorCode::InvalidSpec, "exponent tuple arity mismatch");
        auto it = std::find(basis.begin(), basis.end(), exps);
        if (it == basis.end())
            throw Error(ErrorCode::InvalidSpec, "exponent tuple exceeds the degree");
        coef[static_cast<std::size_t>(it - basis.begin())] += term.at("coef").get<double>();
    }
    return coef;
}

} // namespace

PlantSpec parse_plant_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& err) {
        throw Error(ErrorCode::InvalidSpec, err.what());
    }
    try {
        PlantSpec spec;
        spec.period = doc.at("period").get<double>();
        spec.duration = doc.at("duration").get<double>();
        if (doc.contains("n_traces")) spec.n_traces = doc.at("n_traces").get<int>();
        if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("noise")) spec.noise = doc.at("noise").get<double>();
        if (doc.contains("degree")) spec.degree = doc.at("degree").get<int>();
        if (doc.contains("initial")) spec.initial_mode = doc.at("initial").get<int>();
        for (const auto& ij : doc.at("inputs")) {
            TriggerSpec tr;
            tr.name = ij.at("name").get<std::string>();
            tr.time_min = ij.at("time_min").get<double>();
            tr.time_max = ij.at("time_max").get<double>();
            if (ij.contains("after")) tr.after = ij.at("after").get<std::string>();
            if (ij.contains("texture_amp")) tr.texture_amp = ij.at("texture_amp").get<double>();
            if (ij.contains("texture_period"))
                tr.texture_period = ij.at("texture_period").get<double>();
            spec.triggers.push_back(std::move(tr));
        }
        spec.outputs = doc.at("outputs").get<std::vector<std::string>>();
        for (const auto& mj : doc.at("modes")) {
            ModeFlowSpec mode;
            for (const std::string& out : spec.outputs)
                mode.coef.push_back(dense_coefficients(mj.at(out), 1 + spec.triggers.size(),
                                                       spec.degree));
            spec.modes.push_back(std::move(mode));
        }
        for (const auto& sj : doc.at("switches"))
            spec.switches.push_back({sj.at("src").get<int>(), sj.at("dst").get<int>(),
                                     sj.at("input").get<std::string>()});
        spec.validate();
        return spec;
    } catch (const json::exception& err) {
        throw Error(ErrorCode::InvalidSpec, err.what());
    }
}

std::string plant_spec_example() {
    return R"({
  "period": 0.004,
  "duration": 4.2,
  "n_traces": 10,
  "seed": 7,
  "noise": 0.002,
  "degree": 2,
  "initial": 0,
  "inputs": [
    {"name": "u0", "time_min": 0.7, "time_max": 1.5,
     "texture_amp": 0.02, "texture_period": 0.731},
    {"name": "u1", "after": "u0", "time_min": 0.8, "time_max": 1.6,
     "texture_amp": 0.02, "texture_period": 0.577}
  ],
  "outputs": ["y0"],
  "modes": [
    {"y0": [{"coef": 0.2, "exponents": [0,0,0]},
            {"coef": 0.5, "exponents": [1,0,0]},
            {"coef": -0.18, "exponents": [2,0,0]}]},
    {"y0": [{"coef": 0.9, "exponents": [0,0,0]},
            {"coef": -0.35, "exponents": [1,0,0]},
            {"coef": 0.06, "exponents": [2,0,0]}]},
    {"y0": [{"coef": 0.1, "exponents": [0,0,0]},
            {"coef": 0.4, "exponents": [1,0,0]},
            {"coef": -0.08, "exponents": [2,0,0]}]}
  ],
  "switches": [
    {"src": 0, "dst": 1, "input": "u0"},
    {"src": 1, "dst": 2, "input": "u1"}
  ]
}
)";
}

} // namespace halearn
