#ifndef LATWAVE_PIPELINE_HPP
#define LATWAVE_PIPELINE_HPP

#include <string>
#include <vector>

#include "latwave/config.hpp"
#include "latwave/report.hpp"

namespace latwave {

struct PipelineResult {
    std::vector<Certificate> certificates;
    std::string first_failure;   // empty when all pass
    int exit_code = 0;           // 0 pass, 1 certificate failure
};

// Executes the configured mode (full-pipeline chains
// dispersion -> envelope -> bounds verification -> profile solve ->
// lyapunov trace -> lattice cross-validation -> nonexistence probe),
// writing summary.json and the per-mode CSVs into cfg.output_dir.
// Exit code 0 iff every certificate passes. Math errors propagate
// as exceptions (the CLI maps them to exit code 3).
PipelineResult run_pipeline(const ExperimentConfig& cfg);

} // namespace latwave

#endif
