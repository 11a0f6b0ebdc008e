#ifndef LATWAVE_CONFIG_HPP
#define LATWAVE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "latwave/lattice.hpp"
#include "latwave/model.hpp"

namespace latwave {

enum class Mode {
    dispersion,
    verify_bounds,
    profile,
    lyapunov,
    simulate,
    probe_nonexistence,
    full_pipeline,
};

Mode mode_from_string(const std::string& s);
const char* to_string(Mode m);

// Numerical knobs, all optional in the JSON with these defaults.
struct Numerics {
    double c = 0.0;               // absolute wave speed; > 0 wins over c_factor
    double c_factor = 1.5;        // speed as a multiple of c*
    double h = 0.05;
    double tol = 1e-8;
    std::size_t maxit = 10000;
    std::vector<double> X_list = {20.0, 40.0, 60.0, 80.0};
    double grid_halfwidth = 200.0;   // envelope verification sweep
    std::size_t grid_points = 100001;
    double dt = 0.05;
    double t_end = 80.0;
    std::size_t Ni = 400, Nj = 400;
    double front_level = 0.0;        // 0 selects I*/2
    double init_level = 0.0;         // 0 selects I*
    double window_fraction = 0.5;
    std::string boundary = "copy";
    std::string init_shape = "half-plane";
    double seed_fraction = 0.01;
    double record_every = 0.5;
    std::uint64_t seed = 0;
    double c_test_factor = 0.5;      // probe speed as a multiple of c*
    bool emit_snapshots = false;
};

struct ExperimentConfig {
    ModelParams params;
    Mode mode = Mode::full_pipeline;
    bool mode_set = false;           // whether the file named a mode
    Numerics numerics;
    std::string output_dir = "out";
    bool emit_plots = false;
};

// Strict-schema load: unknown keys anywhere are an error; validation errors
// name the offending field; parse errors carry position info.
// Overrides are dot-path KEY=VALUE pairs applied to the raw JSON before
// validation (e.g. "numerics.dt=0.01", "params.beta=2.5").
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

// Same, from a JSON string (used by tests).
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});

SimConfig sim_config(const ExperimentConfig& cfg);

} // namespace latwave

#endif
