#include "latwave/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace latwave {

using nlohmann::json;

Mode mode_from_string(const std::string& s) {
    if (s == "dispersion") return Mode::dispersion;
    if (s == "verify-bounds") return Mode::verify_bounds;
    if (s == "profile") return Mode::profile;
    if (s == "lyapunov") return Mode::lyapunov;
    if (s == "simulate") return Mode::simulate;
    if (s == "probe-nonexistence") return Mode::probe_nonexistence;
    if (s == "full-pipeline") return Mode::full_pipeline;
    throw std::invalid_argument("config: unknown mode \"" + s + "\"");
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::dispersion: return "dispersion";
        case Mode::verify_bounds: return "verify-bounds";
        case Mode::profile: return "profile";
        case Mode::lyapunov: return "lyapunov";
        case Mode::simulate: return "simulate";
        case Mode::probe_nonexistence: return "probe-nonexistence";
        case Mode::full_pipeline: return "full-pipeline";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            fail("unknown key \"" + it.key() + "\" in " + where);
}

double get_num(const json& obj, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) fail(std::string(key) + " must be a number");
    return obj[key].get<double>();
}

void apply_override(json& root, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) fail("override must be KEY=VALUE: " + kv);
    std::string path = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare string
    }
    json* node = &root;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) fail("override has empty key: " + kv);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = parsed;
}

ExperimentConfig from_json(json j) {
    ExperimentConfig cfg;
    reject_unknown(j, {"params", "mode", "numerics", "output_dir", "emit_plots"}, "config");
    if (!j.contains("params")) fail("missing \"params\"");

    const json& jp = j["params"];
    reject_unknown(jp, {"d1", "d2", "d3", "Lambda", "beta", "alpha",
                        "mu1", "mu2", "gamma", "theta"}, "params");
    ModelParams d;  // defaults
    cfg.params.d1 = get_num(jp, "d1", d.d1);
    cfg.params.d2 = get_num(jp, "d2", d.d2);
    cfg.params.d3 = get_num(jp, "d3", d.d3);
    cfg.params.Lambda = get_num(jp, "Lambda", d.Lambda);
    cfg.params.beta = get_num(jp, "beta", d.beta);
    cfg.params.alpha = get_num(jp, "alpha", d.alpha);
    cfg.params.mu1 = get_num(jp, "mu1", d.mu1);
    cfg.params.mu2 = get_num(jp, "mu2", d.mu2);
    cfg.params.gamma = get_num(jp, "gamma", d.gamma);
    cfg.params.theta = get_num(jp, "theta", d.theta);

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail("mode must be a string");
        cfg.mode = mode_from_string(j["mode"].get<std::string>());
        cfg.mode_set = true;
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) fail("output_dir must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("emit_plots")) {
        if (!j["emit_plots"].is_boolean()) fail("emit_plots must be a boolean");
        cfg.emit_plots = j["emit_plots"].get<bool>();
    }

    if (j.contains("numerics")) {
        const json& jn = j["numerics"];
        reject_unknown(jn, {"c", "c_factor", "h", "tol", "maxit", "X_list",
                            "grid_halfwidth", "grid_points", "dt", "t_end",
                            "Ni", "Nj", "front_level", "init_level",
                            "window_fraction", "boundary", "init_shape",
                            "seed_fraction", "record_every", "seed",
                            "c_test_factor", "emit_snapshots"}, "numerics");
        Numerics& n = cfg.numerics;
        if (jn.contains("c") && jn.contains("c_factor"))
            fail("give either numerics.c or numerics.c_factor, not both");
        n.c = get_num(jn, "c", n.c);
        n.c_factor = get_num(jn, "c_factor", n.c_factor);
        n.h = get_num(jn, "h", n.h);
        n.tol = get_num(jn, "tol", n.tol);
        n.maxit = static_cast<std::size_t>(get_num(jn, "maxit", double(n.maxit)));
        if (jn.contains("X_list")) {
            if (!jn["X_list"].is_array()) fail("X_list must be an array");
            n.X_list.clear();
            for (const auto& v : jn["X_list"]) {
                if (!v.is_number()) fail("X_list entries must be numbers");
                n.X_list.push_back(v.get<double>());
            }
        }
        n.grid_halfwidth = get_num(jn, "grid_halfwidth", n.grid_halfwidth);
        n.grid_points = static_cast<std::size_t>(get_num(jn, "grid_points", double(n.grid_points)));
        n.dt = get_num(jn, "dt", n.dt);
        n.t_end = get_num(jn, "t_end", n.t_end);
        n.Ni = static_cast<std::size_t>(get_num(jn, "Ni", double(n.Ni)));
        n.Nj = static_cast<std::size_t>(get_num(jn, "Nj", double(n.Nj)));
        n.front_level = get_num(jn, "front_level", n.front_level);
        n.init_level = get_num(jn, "init_level", n.init_level);
        n.window_fraction = get_num(jn, "window_fraction", n.window_fraction);
        if (jn.contains("boundary")) {
            if (!jn["boundary"].is_string()) fail("boundary must be a string");
            n.boundary = jn["boundary"].get<std::string>();
        }
        if (jn.contains("init_shape")) {
            if (!jn["init_shape"].is_string()) fail("init_shape must be a string");
            n.init_shape = jn["init_shape"].get<std::string>();
        }
        n.seed_fraction = get_num(jn, "seed_fraction", n.seed_fraction);
        n.record_every = get_num(jn, "record_every", n.record_every);
        n.seed = static_cast<std::uint64_t>(get_num(jn, "seed", double(n.seed)));
        n.c_test_factor = get_num(jn, "c_test_factor", n.c_test_factor);
        if (jn.contains("emit_snapshots")) {
            if (!jn["emit_snapshots"].is_boolean()) fail("emit_snapshots must be a boolean");
            n.emit_snapshots = jn["emit_snapshots"].get<bool>();
        }
    }

    // guard bounds
    const Numerics& n = cfg.numerics;
    if (!(n.h > 0.0)) fail("numerics.h must be > 0");
    if (!(n.tol > 0.0)) fail("numerics.tol must be > 0");
    if (n.maxit < 1) fail("numerics.maxit must be >= 1");
    if (n.X_list.empty()) fail("numerics.X_list must be nonempty");
    for (std::size_t i = 0; i < n.X_list.size(); ++i) {
        if (!(n.X_list[i] > 0.0)) fail("numerics.X_list entries must be > 0");
        if (i > 0 && !(n.X_list[i] > n.X_list[i - 1]))
            fail("numerics.X_list must be strictly increasing");
    }
    if (n.c != 0.0 && !(n.c > 0.0)) fail("numerics.c must be > 0");
    if (!(n.c_factor > 0.0)) fail("numerics.c_factor must be > 0");
    if (!(n.dt > 0.0)) fail("numerics.dt must be > 0");
    if (!(n.t_end > 0.0)) fail("numerics.t_end must be > 0");
    if (n.Ni < 4 || n.Nj < 4) fail("numerics.Ni/Nj must be >= 4");
    if (!(n.window_fraction > 0.0 && n.window_fraction <= 1.0))
        fail("numerics.window_fraction must be in (0, 1]");
    if (!(n.seed_fraction > 0.0 && n.seed_fraction < 1.0))
        fail("numerics.seed_fraction must be in (0, 1)");
    if (!(n.record_every > 0.0)) fail("numerics.record_every must be > 0");
    if (n.grid_points < 2) fail("numerics.grid_points must be >= 2");
    if (!(n.grid_halfwidth > 0.0)) fail("numerics.grid_halfwidth must be > 0");
    if (n.boundary != "copy" && n.boundary != "periodic")
        fail("numerics.boundary must be \"copy\" or \"periodic\"");
    if (n.init_shape != "half-plane" && n.init_shape != "disk")
        fail("numerics.init_shape must be \"half-plane\" or \"disk\"");
    if (!(n.c_test_factor > 0.0 && n.c_test_factor < 1.0))
        fail("numerics.c_test_factor must be in (0, 1)");

    validate_params(cfg.params, false);
    return cfg;
}

} // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    for (const std::string& kv : overrides) apply_override(j, kv);
    return from_json(std::move(j));
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

SimConfig sim_config(const ExperimentConfig& cfg) {
    const Numerics& n = cfg.numerics;
    SimConfig s;
    s.Ni = n.Ni;
    s.Nj = n.Nj;
    s.dt = n.dt;
    s.t_end = n.t_end;
    s.boundary = n.boundary == "copy" ? Boundary::copy : Boundary::periodic;
    s.init_shape = n.init_shape == "half-plane" ? InitShape::half_plane : InitShape::disk;
    s.init_level = n.init_level > 0.0 ? n.init_level : -1.0;
    s.seed_fraction = n.seed_fraction;
    s.front_level = n.front_level > 0.0 ? n.front_level : -1.0;
    s.record_every = n.record_every;
    s.window_fraction = n.window_fraction;
    s.seed = n.seed;
    return s;
}

} // namespace latwave
