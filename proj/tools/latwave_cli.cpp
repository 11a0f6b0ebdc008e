#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latwave/config.hpp"
#include "latwave/pipeline.hpp"

using namespace latwave;

int main(int argc, char** argv) {
    CLI::App app{"lattice SIR traveling-wave toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;

    const char* modes[] = {"dispersion", "verify-bounds", "profile", "lyapunov",
                           "simulate", "probe-nonexistence", "full-pipeline"};
    const char* descr[] = {
        "critical pair (c*, lambda*) and the roots lambda1 < lambda2",
        "construct the envelope and certify the four differential inequalities",
        "solve the truncated wave-profile problem and run its diagnostics",
        "profile solve plus the Lyapunov functional trace",
        "direct lattice integration with front tracking and speed fit",
        "subcritical-frame probe: Delta positivity plus front speed margin",
        "dispersion -> bounds -> profile -> lyapunov -> simulation -> probe"};
    for (int i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(modes[i], descr[i]);
        sub->add_option("--config", config_path, "experiment config JSON")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--override", overrides,
                        "dot-path override KEY=VALUE, e.g. numerics.dt=0.01");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::string mode = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg = load_config(config_path, overrides);
        if (cfg.mode_set && to_string(cfg.mode) != mode) {
            std::cerr << "error: config mode \"" << to_string(cfg.mode)
                      << "\" does not match subcommand \"" << mode << "\"\n";
            return 2;
        }
        cfg.mode = mode_from_string(mode);
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        PipelineResult res = run_pipeline(cfg);
        for (const Certificate& c : res.certificates)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                      << "  margin=" << c.margin << "\n";
        if (res.exit_code != 0)
            std::cerr << "certificate failed: " << res.first_failure << "\n";
        else
            std::cout << "all certificates passed; reports in " << cfg.output_dir << "\n";
        return res.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "filesystem error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 3;
    }
}
