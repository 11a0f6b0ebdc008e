#include "latwave/pipeline.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "latwave/dispersion.hpp"
#include "latwave/envelope.hpp"
#include "latwave/lattice.hpp"
#include "latwave/lyapunov.hpp"
#include "latwave/profile.hpp"

namespace latwave {

using ordered_json = nlohmann::ordered_json;

namespace {

struct Ctx {
    const ExperimentConfig& cfg;
    std::vector<Certificate>& certs;
    ordered_json& summary;
    std::filesystem::path out;
};

void cert(Ctx& ctx, const std::string& name, bool pass, double margin) {
    ctx.certs.push_back({name, pass, margin});
}

double resolve_speed(const ExperimentConfig& cfg, double c_star) {
    return cfg.numerics.c > 0.0 ? cfg.numerics.c : cfg.numerics.c_factor * c_star;
}

ordered_json dispersion_stage(Ctx& ctx, const Equilibria& eq, const CriticalPair& crit,
                              const RootPair& roots, double c) {
    const ModelParams& p = ctx.cfg.params;
    double tol = 1e-9 * delta_scale(p);
    ordered_json out;
    out["S0"] = eq.S0;
    out["R0"] = eq.R0;
    out["S_star"] = eq.S_star;
    out["I_star"] = eq.I_star;
    out["c_star"] = crit.c_star;
    out["lambda_star"] = crit.lambda_star;
    out["delta_at_critical"] = crit.min_value;
    out["ddelta_at_critical"] = crit.dlambda_value;
    out["c"] = c;
    out["lambda1"] = roots.lambda1;
    out["lambda2"] = roots.lambda2;

    double worst = std::max(std::fabs(crit.min_value), std::fabs(crit.dlambda_value));
    cert(ctx, "dispersion_critical", worst <= tol, tol - worst);
    double rw = std::max(std::fabs(delta(p, c, roots.lambda1)),
                         std::fabs(delta(p, c, roots.lambda2)));
    bool ordered = roots.lambda1 < crit.lambda_star && crit.lambda_star < roots.lambda2;
    cert(ctx, "dispersion_roots", ordered && rw <= tol, tol - rw);

    // sign pattern over 1000 sampled lambda
    double worst_sign = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        double lam = 1.2 * roots.lambda2 * double(i) / 1000.0;
        double v = delta(p, c, lam);
        double want = (lam < roots.lambda1 || lam > roots.lambda2) ? v : -v;
        if (want < worst_sign) worst_sign = want;
    }
    cert(ctx, "dispersion_sign_pattern", worst_sign >= 0.0, worst_sign);

    if (ctx.cfg.emit_plots) {
        std::vector<double> lam, dc, dcrit;
        for (int i = 0; i <= 400; ++i) {
            double l = 1.5 * roots.lambda2 * double(i) / 400.0;
            lam.push_back(l);
            dc.push_back(delta(p, c, l));
            dcrit.push_back(delta(p, crit.c_star, l));
        }
        write_csv((ctx.out / "dispersion_curve.csv").string(),
                  {{"lambda", &lam}, {"delta_at_c", &dc}, {"delta_at_c_star", &dcrit}});
    }
    return out;
}

ordered_json bounds_stage(Ctx& ctx, double c, const EnvelopeParams& env) {
    const ModelParams& p = ctx.cfg.params;
    CertificateReport rep = verify_upper_lower(p, c, env, ctx.cfg.numerics.grid_halfwidth,
                                               ctx.cfg.numerics.grid_points);
    ordered_json out;
    out["I0"] = env.I0;
    out["M1"] = env.M1;
    out["M2"] = env.M2;
    out["eps1"] = env.eps1;
    out["eps2"] = env.eps2;
    out["knot1"] = env.knot1;
    out["knot2"] = env.knot2;
    out["points_checked"] = rep.points_checked;
    out["tolerance"] = rep.tolerance;
    auto ineq = [](const InequalityStats& st) {
        ordered_json o;
        o["min_residual"] = st.min_residual;
        o["max_residual"] = st.max_residual;
        o["violations"] = st.violations;
        o["worst_xi"] = st.worst_xi;
        o["worst_value"] = st.worst_value;
        return o;
    };
    out["upper_S"] = ineq(rep.a);
    out["upper_I"] = ineq(rep.b);
    out["lower_S"] = ineq(rep.c);
    out["lower_I"] = ineq(rep.d);
    out["pass"] = rep.pass;
    cert(ctx, "envelope_certificate", rep.pass,
         -double(rep.a.violations + rep.b.violations + rep.c.violations + rep.d.violations));

    // residual profiles (downsampled to at most ~20k rows)
    std::size_t n = ctx.cfg.numerics.grid_points;
    std::size_t stride = n / 20000 + 1;
    double hw = ctx.cfg.numerics.grid_halfwidth;
    double h = 2.0 * hw / double(n - 1);
    std::vector<double> xs, ra, rb, rc, rd;
    for (std::size_t i = 0; i < n; i += stride) {
        double xi = -hw + h * double(i);
        double a, b, cc, dd;
        envelope_residuals(p, c, env, xi, a, b, cc, dd);
        xs.push_back(xi);
        ra.push_back(a);
        rb.push_back(b);
        rc.push_back(cc);
        rd.push_back(dd);
    }
    write_csv((ctx.out / "bounds_residuals.csv").string(),
              {{"xi", &xs}, {"res_upper_S", &ra}, {"res_upper_I", &rb},
               {"res_lower_S", &rc}, {"res_lower_I", &rd}});
    return out;
}

ordered_json profile_stage(Ctx& ctx, double c, const EnvelopeParams& env,
                           const Equilibria& eq, ProfileGrid& grid_out) {
    const ModelParams& p = ctx.cfg.params;
    const Numerics& n = ctx.cfg.numerics;
    auto [grid, ext] = extend_domain(p, c, env, n.X_list, n.h, n.tol);

    ordered_json out;
    out["X"] = grid.X;
    out["h"] = grid.h;
    out["X_list"] = ext.Xs;
    out["window_sup"] = ext.window_sup;
    out["left_gap_S"] = ext.left_gap_S;
    out["left_gap_I"] = ext.left_gap_I;
    out["cauchy_decreasing"] = ext.cauchy_decreasing;

    double res = residual(p, c, grid);
    out["residual"] = res;
    PositivityReport pos = positivity_check(grid);
    DerivativeBoundsReport db = derivative_bounds_check(p, c, grid);
    RatioBoundsReport rb = ratio_bounds_check(p, c, grid);
    std::vector<double> ss = {0.25 * env.lambda1, 0.5 * env.lambda1, 0.75 * env.lambda1};
    LaplaceReport lp = laplace_identity_check(p, c, grid, ss);

    out["positivity"] = {{"pass", pos.pass}, {"min_S", pos.min_S},
                         {"max_S", pos.max_S}, {"min_I", pos.min_I}};
    out["derivative_bounds"] = {{"pass", db.pass}, {"N1", db.N1}, {"N2", db.N2},
                                {"max_abs_dS", db.max_abs_dS}, {"max_abs_dI", db.max_abs_dI}};
    out["ratio_bounds"] = {{"pass", rb.pass}, {"nu", rb.nu},
                           {"weighted_monotone", rb.weighted_monotone},
                           {"max_fwd_ratio_s", rb.max_fwd_ratio_s},
                           {"fwd_bound_s", rb.fwd_bound_s},
                           {"max_back_ratio_s", rb.max_back_ratio_s},
                           {"back_bound_s", rb.back_bound_s}};
    ordered_json jl = ordered_json::array();
    for (const auto& s : lp.samples)
        jl.push_back({{"s", s.s}, {"lhs", s.lhs}, {"rhs", s.rhs},
                      {"rel_err", s.rel_err}, {"pass", s.pass}});
    out["laplace"] = {{"samples", jl}, {"left_fit_rate", lp.left_fit_rate},
                      {"left_fit_r2", lp.left_fit_r2},
                      {"tail_fit_warning", lp.tail_fit_warning}, {"pass", lp.pass}};

    bool gamma = in_gamma_X(grid);
    cert(ctx, "profile_converged", ext.all_converged, ext.all_converged ? 1.0 : -1.0);
    cert(ctx, "profile_gamma_membership", gamma, gamma ? 1.0 : -1.0);
    cert(ctx, "profile_residual", res <= 5e-3, 5e-3 - res);
    double right_S = std::fabs(grid.S.back() - eq.S_star) / eq.S_star;
    double right_I = std::fabs(grid.I.back() - eq.I_star) / eq.I_star;
    double bgap = std::max({ext.left_gap_S.back(), ext.left_gap_I.back()});
    out["right_gap_S_rel"] = right_S;
    out["right_gap_I_rel"] = right_I;
    cert(ctx, "profile_boundary_left", bgap < 1e-3, 1e-3 - bgap);
    cert(ctx, "profile_boundary_right", std::max(right_S, right_I) < 0.05,
         0.05 - std::max(right_S, right_I));
    cert(ctx, "profile_positivity", pos.pass, -double(pos.violations));
    cert(ctx, "profile_derivative_bounds", db.pass,
         std::min(db.N1 - db.max_abs_dS, db.N2 - db.max_abs_dI));
    cert(ctx, "profile_ratio_bounds", rb.pass, rb.fwd_bound_s - rb.max_fwd_ratio_s);
    double worst_rel = 0.0;
    for (const auto& s : lp.samples) worst_rel = std::max(worst_rel, s.rel_err);
    cert(ctx, "profile_laplace_identity", lp.pass, 0.02 - worst_rel);

    // profile CSV
    std::vector<double> su, sl, iu, il;
    for (double xi : grid.xs) {
        su.push_back(upper_S(env, eq, xi));
        sl.push_back(lower_S(env, eq, xi));
        iu.push_back(upper_I(env, eq, xi));
        il.push_back(lower_I(env, eq, xi));
    }
    std::vector<double> rp = residual_profile(p, c, grid);
    write_csv((ctx.out / "profile.csv").string(),
              {{"xi", &grid.xs}, {"S", &grid.S}, {"I", &grid.I},
               {"S_upper", &su}, {"S_lower", &sl}, {"I_upper", &iu},
               {"I_lower", &il}, {"residual", &rp}});

    grid_out = std::move(grid);
    return out;
}

ordered_json lyapunov_stage(Ctx& ctx, double c, const Equilibria& eq,
                            const ProfileGrid& grid) {
    const ModelParams& p = ctx.cfg.params;
    LyapunovTrace tr = lyapunov_trace(p, c, eq, grid);
    MonotonicityReport mono = monotonicity_report(tr);

    double tol_match = std::max(1e-6, 3.0 * grid.h * grid.h);
    std::size_t matched = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.xs.size(); ++i) {
        double d = std::fabs(tr.dL_analytic[i] - tr.dL_numeric[i]);
        if (d <= tol_match) ++matched;
        worst = std::max(worst, d);
    }
    double match_frac = tr.xs.empty() ? 0.0 : double(matched) / double(tr.xs.size());

    ordered_json out;
    out["nodes"] = tr.xs.size();
    out["max_abs_L"] = tr.max_abs_L;
    out["min_L"] = tr.min_L;
    out["max_positive_dL"] = tr.max_positive_dL;
    out["eps_mono"] = mono.eps_mono;
    out["compliant_fraction"] = mono.compliant_fraction;
    out["match_tolerance"] = tol_match;
    out["match_fraction"] = match_frac;
    out["worst_match_diff"] = worst;

    cert(ctx, "lyapunov_monotone", mono.pass, mono.eps_mono - tr.max_positive_dL);
    cert(ctx, "lyapunov_analytic_match", match_frac >= 0.99, match_frac - 0.99);

    write_csv((ctx.out / "lyapunov.csv").string(),
              {{"xi", &tr.xs}, {"L", &tr.L}, {"dL_analytic", &tr.dL_analytic},
               {"dL_numeric", &tr.dL_numeric}});
    return out;
}

void append_le(std::string& buf, const void* src, std::size_t n) {
    buf.append(static_cast<const char*>(src), n);
}

ordered_json simulate_stage(Ctx& ctx, const Equilibria& eq, double c_star) {
    const ModelParams& p = ctx.cfg.params;
    SimConfig sc = sim_config(ctx.cfg);

    std::size_t snap_idx = 0;
    SnapshotSink sink;
    if (ctx.cfg.numerics.emit_snapshots) {
        sink = [&](const LatticeState& st) {
            // flat binary: int64 Ni, int64 Nj, float64 t, then S, I, R
            // row-major float64, little-endian
            std::string buf;
            std::int64_t ni = std::int64_t(st.Ni), nj = std::int64_t(st.Nj);
            append_le(buf, &ni, 8);
            append_le(buf, &nj, 8);
            append_le(buf, &st.t, 8);
            append_le(buf, st.S.data(), st.S.size() * 8);
            append_le(buf, st.I.data(), st.I.size() * 8);
            append_le(buf, st.R.data(), st.R.size() * 8);
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%04zu.bin", snap_idx++);
            atomic_write((ctx.out / name).string(), buf);
        };
    }

    auto [trace, summary] = run(p, sc, sink);

    ordered_json out;
    out["front_found"] = summary.front_found;
    out["final_max_I"] = summary.final_max_I;
    out["front_margin_ok"] = summary.front_margin_ok;
    out["steps"] = summary.steps;
    if (summary.front_found) {
        out["speed"] = trace.speed;
        out["r_squared"] = trace.r_squared;
        out["c_star"] = c_star;
        out["ratio"] = trace.speed / c_star;
    }

    write_csv((ctx.out / "front_trace.csv").string(),
              {{"t", &trace.times}, {"xi_front", &trace.positions}});

    if (eq.R0 > 1.0) {
        double ratio = summary.front_found ? trace.speed / c_star : 0.0;
        cert(ctx, "sim_speed_vs_cstar",
             summary.front_found && std::fabs(ratio - 1.0) <= 0.10,
             0.10 - std::fabs(ratio - 1.0));
        cert(ctx, "sim_fit_quality", summary.front_found && trace.r_squared > 0.995,
             trace.r_squared - 0.995);
        cert(ctx, "sim_front_margin", summary.front_margin_ok,
             summary.front_margin_ok ? 1.0 : -1.0);
    } else {
        cert(ctx, "sim_extinction", summary.final_max_I < 1e-8,
             1e-8 - summary.final_max_I);
    }
    return out;
}

ordered_json probe_stage(Ctx& ctx, double c_star, const ProfileGrid* profile) {
    const ModelParams& p = ctx.cfg.params;
    SimConfig sc = sim_config(ctx.cfg);
    double c_test = ctx.cfg.numerics.c_test_factor * c_star;
    ProbeShape shape;
    NonexistenceReport rep;
    if (profile) {
        shape.xi = profile->xs;
        shape.S = profile->S;
        shape.I = profile->I;
        rep = nonexistence_probe(p, c_test, sc, &shape);
    } else {
        rep = nonexistence_probe(p, c_test, sc, nullptr);
    }
    ordered_json out;
    out["c_test"] = rep.c_test;
    out["c_star"] = rep.c_star;
    out["min_delta"] = rep.min_delta;
    out["min_delta_grid"] = rep.min_delta_grid;
    out["delta_positive"] = rep.delta_positive;
    out["observed_speed"] = rep.observed_speed;
    out["r_squared"] = rep.r_squared;
    out["margin"] = rep.margin;
    out["pass"] = rep.pass;
    cert(ctx, "probe_delta_positive", rep.delta_positive, rep.min_delta);
    cert(ctx, "probe_front_outruns", rep.margin > 0.0 && rep.pass, rep.margin);
    return out;
}

} // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
    PipelineResult result;
    ordered_json summary;
    summary["schema_version"] = "1";
    summary["mode"] = to_string(cfg.mode);
    {
        ordered_json jp;
        jp["d1"] = cfg.params.d1;
        jp["d2"] = cfg.params.d2;
        jp["d3"] = cfg.params.d3;
        jp["Lambda"] = cfg.params.Lambda;
        jp["beta"] = cfg.params.beta;
        jp["alpha"] = cfg.params.alpha;
        jp["mu1"] = cfg.params.mu1;
        jp["mu2"] = cfg.params.mu2;
        jp["gamma"] = cfg.params.gamma;
        jp["theta"] = cfg.params.theta;
        summary["params"] = jp;
    }

    Ctx ctx{cfg, result.certificates, summary, std::filesystem::path(cfg.output_dir)};
    std::filesystem::create_directories(ctx.out);

    const ModelParams& p = cfg.params;
    const bool needs_wave = cfg.mode != Mode::simulate;  // simulate allows any theta, R0
    if (needs_wave) validate_params(p, true);
    Equilibria eq = equilibria(p);

    switch (cfg.mode) {
        case Mode::dispersion: {
            CriticalPair crit = find_critical(p);
            double c = resolve_speed(cfg, crit.c_star);
            RootPair roots = find_roots(p, c, crit);
            summary["dispersion"] = dispersion_stage(ctx, eq, crit, roots, c);
            break;
        }
        case Mode::verify_bounds: {
            CriticalPair crit = find_critical(p);
            double c = resolve_speed(cfg, crit.c_star);
            RootPair roots = find_roots(p, c, crit);
            EnvelopeParams env = select_envelope(p, c, roots);
            summary["dispersion"] = dispersion_stage(ctx, eq, crit, roots, c);
            summary["bounds"] = bounds_stage(ctx, c, env);
            break;
        }
        case Mode::profile: {
            CriticalPair crit = find_critical(p);
            double c = resolve_speed(cfg, crit.c_star);
            RootPair roots = find_roots(p, c, crit);
            EnvelopeParams env = select_envelope(p, c, roots);
            summary["dispersion"] = dispersion_stage(ctx, eq, crit, roots, c);
            ProfileGrid grid;
            summary["profile"] = profile_stage(ctx, c, env, eq, grid);
            break;
        }
        case Mode::lyapunov: {
            CriticalPair crit = find_critical(p);
            double c = resolve_speed(cfg, crit.c_star);
            RootPair roots = find_roots(p, c, crit);
            EnvelopeParams env = select_envelope(p, c, roots);
            summary["dispersion"] = dispersion_stage(ctx, eq, crit, roots, c);
            ProfileGrid grid;
            summary["profile"] = profile_stage(ctx, c, env, eq, grid);
            summary["lyapunov"] = lyapunov_stage(ctx, c, eq, grid);
            break;
        }
        case Mode::simulate: {
            validate_params(p, false);
            double c_star = 0.0;
            if (eq.R0 > 1.0 && p.d2 > 0.0) c_star = find_critical(p).c_star;
            summary["simulate"] = simulate_stage(ctx, eq, c_star);
            break;
        }
        case Mode::probe_nonexistence: {
            CriticalPair crit = find_critical(p);
            summary["probe"] = probe_stage(ctx, crit.c_star, nullptr);
            break;
        }
        case Mode::full_pipeline: {
            CriticalPair crit = find_critical(p);
            double c = resolve_speed(cfg, crit.c_star);
            RootPair roots = find_roots(p, c, crit);
            EnvelopeParams env = select_envelope(p, c, roots);
            summary["dispersion"] = dispersion_stage(ctx, eq, crit, roots, c);
            summary["bounds"] = bounds_stage(ctx, c, env);
            ProfileGrid grid;
            summary["profile"] = profile_stage(ctx, c, env, eq, grid);
            summary["lyapunov"] = lyapunov_stage(ctx, c, eq, grid);
            summary["simulate"] = simulate_stage(ctx, eq, crit.c_star);
            summary["probe"] = probe_stage(ctx, crit.c_star, &grid);
            break;
        }
    }

    ordered_json jc = ordered_json::array();
    for (const Certificate& c : result.certificates) {
        jc.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
        if (!c.pass && result.first_failure.empty()) result.first_failure = c.name;
    }
    summary["certificates"] = jc;
    bool all = result.first_failure.empty();
    summary["pass"] = all;
    result.exit_code = all ? 0 : 1;
    atomic_write((ctx.out / "summary.json").string(), summary.dump(2) + "\n");
    return result;
}

} // namespace latwave
