#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "halearn/flows.hpp"
#include "halearn/trace.hpp"

namespace halearn {

/// Deterministic uniform/gaussian source built on mt19937_64, with pinned
/// double extraction so identical seeds give identical traces on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform();                      // [0,1)
    double uniform(double lo, double hi);  // [lo,hi)
    double gaussian();                     // Box-Muller from pinned uniforms
    std::uint64_t next_u64();

private:
    std::uint64_t splitmix();
    std::uint64_t state_;
};

/// Two-mode heating/cooling plant: dx/dt = -0.1x while off, 5 - 0.1x while on,
/// switching at x >= 21 (on -> off) and x <= 19 (off -> on), forward-Euler at
/// the sampling period. The plant warms up from x = 20 in mode off; recording
/// begins at a randomized later entry into mode off (the sampling phase inside
/// the step is randomized per trace) and stops at the last mode switch within
/// `duration`, so every recorded dwell period is complete. Time is the sole
/// input channel; the temperature is the output.
std::vector<IOTrace> gen_thermostat(int n_traces, std::uint64_t seed, double period,
                                    double duration);

/// Trigger input: exactly zero-based idle before a clean step to 1.0 at a
/// uniformly drawn time, with a small deterministic texture locked to the step
/// time on both sides. The lock makes the window around its own step identical
/// across traces while windows at other transitions vary.
struct TriggerSpec {
    std::string name;
    std::string after;         // empty: absolute step time; else measured from
                               // the named trigger's step
    double time_min = 0.0;     // step time range, seconds
    double time_max = 0.0;
    double texture_amp = 0.0;  // triangle idle texture amplitude
    double texture_period = 1.0;
};

struct ModeFlowSpec {
    // One polynomial per output channel over [inputs...] with the time variable
    // measured from mode entry.
    std::vector<std::vector<double>> coef;  // [output][monomial], graded-lex basis
};

struct SwitchSpec {
    int src = 0;
    int dst = 0;
    std::string input;  // trigger channel that fires this switch
};

struct PlantSpec {
    double period = 0.01;
    double duration = 1.0;
    int n_traces = 1;
    std::uint64_t seed = 1;
    double noise = 0.0;  // gaussian sigma added to outputs
    int degree = 2;
    std::vector<TriggerSpec> triggers;
    std::vector<std::string> outputs;
    std::vector<ModeFlowSpec> modes;
    std::vector<SwitchSpec> switches;
    int initial_mode = 0;

    void validate() const;  // throws InvalidSpec
};

PlantSpec parse_plant_spec(const std::string& json_text);
std::string plant_spec_example();  // a ready-to-edit JSON document

/// Piecewise-polynomial plant: within each mode every output is an exact
/// polynomial of (time since mode entry, trigger inputs); switches fire at the
/// guard input's step. Optional gaussian noise perturbs the outputs only.
std::vector<IOTrace> gen_polyplant(const PlantSpec& spec);

} // namespace halearn
