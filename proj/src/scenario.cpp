#include "nelsonlab/scenario.hpp"

#include <fstream>
#include <set>

namespace nelson {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

FieldSpec parse_field(const json& obj, const std::string& where) {
    require_known_keys(obj, {"type", "base", "amplitude", "harmonic", "phase", "diag"}, where);
    FieldSpec spec;
    spec.type = obj.value("type", spec.type);
    spec.base = obj.value("base", spec.base);
    spec.amplitude = obj.value("amplitude", spec.amplitude);
    spec.harmonic = obj.value("harmonic", spec.harmonic);
    spec.phase = obj.value("phase", spec.phase);
    if (obj.contains("diag")) spec.diag = obj.at("diag").get<std::vector<double>>();
    return spec;
}

json field_to_json(const FieldSpec& spec) {
    json obj;
    obj["type"] = spec.type;
    obj["base"] = spec.base;
    obj["amplitude"] = spec.amplitude;
    obj["harmonic"] = spec.harmonic;
    obj["phase"] = spec.phase;
    if (!spec.diag.empty()) obj["diag"] = spec.diag;
    return obj;
}

DensitySpec parse_density(const json& obj) {
    require_known_keys(obj, {"kind", "q", "width"}, "density");
    DensitySpec spec;
    spec.kind = obj.value("kind", spec.kind);
    spec.q = obj.value("q", spec.q);
    spec.width = obj.value("width", spec.width);
    if (spec.width <= 0.0) throw ConfigError("density width must be positive");
    return spec;
}

const char* kConstant1d = R"json({
  "name": "constant-1d",
  "dim": 1,
  "particle_points": 32, "particle_box": 6.283185307179586,
  "boson_points": 32, "boson_box": 6.283185307179586,
  "a": {"type": "constant", "base": 1.0},
  "v": {"type": "constant", "base": 0.0},
  "m": {"type": "constant", "base": 1.0},
  "A": {"type": "constant", "base": 0.5},
  "W": {"type": "constant", "base": 0.0},
  "density": {"kind": "gaussian", "q": 1.0, "width": 0.5},
  "sigma": 0.2,
  "kappa_ladder": [1.0, 2.0],
  "modes": 4, "n_max": 4, "seed": 20250825,
  "experiments": ["beta_oracle", "ccr_ju88", "van_hove", "density_limit"],
  "overrides": {
    "van_hove": {"boson_points": 32, "boson_box": 16.0, "particle_points": 0,
                 "density": {"kind": "gaussian", "q": 3.0, "width": 2.0},
                 "modes": 9, "n_max": 8, "kappa_ladder": [1.0]},
    "density_limit": {"boson_points": 128, "kappa_ladder": [1.0, 2.0, 4.0]}
  }
})json";

const char* kVariable1d = R"json({
  "name": "variable-1d",
  "dim": 1,
  "particle_points": 64, "particle_box": 6.283185307179586,
  "boson_points": 128, "boson_box": 6.283185307179586,
  "a": {"type": "sinusoidal", "base": 1.0, "amplitude": 0.3, "harmonic": 1},
  "v": {"type": "constant", "base": 0.5},
  "m": {"type": "constant", "base": 0.0},
  "A": {"type": "sinusoidal", "base": 0.5, "amplitude": 0.1, "harmonic": 1},
  "W": {"type": "constant", "base": 0.0},
  "density": {"kind": "gaussian", "q": 1.0, "width": 0.5},
  "sigma": 0.2,
  "kappa_ladder": [1.0, 2.0, 4.0],
  "modes": 4, "n_max": 6, "seed": 20250825,
  "experiments": ["dressing_identity", "beta_norms", "symbol_decay", "a6_bounds",
                  "dressed_consistency", "resolvent_cauchy", "form_bound_klmn",
                  "renorm_limit_d1"],
  "overrides": {
    "dressing_identity": {"kappa_ladder": [1.0, 2.0]},
    "a6_bounds": {"particle_points": 8, "modes": 6, "n_max": 4},
    "dressed_consistency": {"particle_points": 32, "particle_box": 16.0,
        "boson_points": 64, "boson_box": 16.0,
        "density": {"kind": "gaussian", "q": 0.9, "width": 2.0},
        "kappa_ladder": [1.0], "modes": 4, "n_max": 10},
    "resolvent_cauchy": {"particle_points": 8, "boson_points": 256,
        "modes": 6, "n_max": 3, "kappa_ladder": [1.0, 2.0, 4.0, 8.0]},
    "form_bound_klmn": {"particle_points": 8, "boson_points": 256,
        "modes": 6, "n_max": 3, "kappa_ladder": [1.0, 2.0, 4.0, 8.0]},
    "renorm_limit_d1": {"boson_points": 128, "kappa_ladder": [1.0, 2.0, 4.0, 8.0]},
    "symbol_decay": {"boson_points": 256, "v": {"type": "constant", "base": 1.0}}
  }
})json";

const char* kCounterterm3d = R"json({
  "name": "counterterm-3d",
  "dim": 3,
  "particle_points": 0, "boson_points": 0,
  "a": {"type": "constant", "base": 1.0},
  "v": {"type": "constant", "base": 0.0},
  "m": {"type": "constant", "base": 1.0},
  "A": {"type": "constant", "base": 0.5},
  "W": {"type": "constant", "base": 0.0},
  "density": {"kind": "gaussian", "q": 1.0, "width": 1.0},
  "sigma": 0.2,
  "kappa_ladder": [16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0],
  "seed": 20250825,
  "experiments": ["counterterm_slope", "nelson_ladder", "renorm_cancellation"],
  "overrides": {
    "nelson_ladder": {"sigma": 1.0, "m": {"type": "constant", "base": 0.0},
                      "kappa_ladder": [100.0, 200.0, 1000.0, 2000.0, 10000.0, 20000.0]}
  }
})json";

const char* kMasslessFloor1d = R"json({
  "name": "massless-floor-1d",
  "dim": 1,
  "particle_points": 8, "particle_box": 6.283185307179586,
  "boson_points": 32, "boson_box": 6.283185307179586,
  "a": {"type": "constant", "base": 1.0},
  "v": {"type": "constant", "base": 0.0},
  "m": {"type": "constant", "base": 0.0},
  "A": {"type": "constant", "base": 0.5},
  "W": {"type": "constant", "base": 0.0},
  "density": {"kind": "gaussian", "q": 1.0, "width": 0.5},
  "sigma": 0.5,
  "grading_floor": 0.5,
  "kappa_ladder": [1.0],
  "modes": 5, "n_max": 4, "seed": 20250825,
  "experiments": ["massless_checks"]
})json";

}  // namespace

Scenario Scenario::from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
    require_known_keys(doc,
                       {"name", "dim", "particle_points", "particle_box", "boson_points",
                        "boson_box", "a", "v", "m", "A", "W", "density", "sigma",
                        "grading_floor", "kappa_ladder", "modes", "n_max", "seed",
                        "experiments", "overrides"},
                       "scenario");
    Scenario s;
    try {
        s.name = doc.value("name", std::string("unnamed"));
        s.dim = doc.value("dim", 1);
        s.particle_points = doc.value("particle_points", 0l);
        s.particle_box = doc.value("particle_box", s.particle_box);
        s.boson_points = doc.value("boson_points", 0l);
        s.boson_box = doc.value("boson_box", s.boson_box);
        if (doc.contains("a")) s.a = parse_field(doc.at("a"), "a");
        if (doc.contains("v")) s.v = parse_field(doc.at("v"), "v");
        if (doc.contains("m")) s.m = parse_field(doc.at("m"), "m");
        if (doc.contains("A")) s.A = parse_field(doc.at("A"), "A");
        if (doc.contains("W")) s.W = parse_field(doc.at("W"), "W");
        if (doc.contains("density")) s.density = parse_density(doc.at("density"));
        s.sigma = doc.value("sigma", s.sigma);
        s.grading_floor = doc.value("grading_floor", s.grading_floor);
        if (doc.contains("kappa_ladder")) {
            s.kappa_ladder = doc.at("kappa_ladder").get<std::vector<double>>();
        }
        s.modes = doc.value("modes", 0);
        s.n_max = doc.value("n_max", 0);
        s.seed = doc.value("seed", 1234u);
        if (doc.contains("experiments")) {
            s.experiments = doc.at("experiments").get<std::vector<std::string>>();
        }
        if (doc.contains("overrides")) {
            s.overrides = doc.at("overrides");
            if (!s.overrides.is_object()) throw ConfigError("overrides must be an object");
            for (auto it = s.overrides.begin(); it != s.overrides.end(); ++it) {
                if (!it.value().is_object()) {
                    throw ConfigError("override for '" + it.key() + "' must be an object");
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }

    if (s.dim < 1 || s.dim > 3) throw ConfigError("dim must be 1, 2, or 3");
    if (s.particle_points < 0 || s.boson_points < 0) {
        throw ConfigError("grid point counts must be nonnegative");
    }
    if (s.particle_box <= 0.0 || s.boson_box <= 0.0) throw ConfigError("box lengths must be positive");
    if (s.sigma <= 0.0) throw ConfigError("sigma must be positive");
    double prev = 0.0;
    for (double k : s.kappa_ladder) {
        if (k <= prev) throw ConfigError("kappa ladder must be positive and strictly increasing");
        prev = k;
    }
    if (s.modes < 0 || s.n_max < 0) throw ConfigError("modes and n_max must be nonnegative");
    return s;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return from_json(doc);
}

Scenario Scenario::builtin(const std::string& name) {
    const char* text = nullptr;
    if (name == "constant-1d") text = kConstant1d;
    if (name == "variable-1d") text = kVariable1d;
    if (name == "counterterm-3d") text = kCounterterm3d;
    if (name == "massless-floor-1d") text = kMasslessFloor1d;
    if (!text) throw ConfigError("unknown builtin scenario: " + name);
    return from_json(json::parse(text));
}

std::vector<std::string> Scenario::builtin_names() {
    return {"constant-1d", "variable-1d", "counterterm-3d", "massless-floor-1d"};
}

Scenario Scenario::load(const std::string& name_or_path) {
    for (const std::string& b : builtin_names()) {
        if (name_or_path == b) return builtin(name_or_path);
    }
    return from_file(name_or_path);
}

json Scenario::to_json() const {
    json doc;
    doc["name"] = name;
    doc["dim"] = dim;
    doc["particle_points"] = particle_points;
    doc["particle_box"] = particle_box;
    doc["boson_points"] = boson_points;
    doc["boson_box"] = boson_box;
    doc["a"] = field_to_json(a);
    doc["v"] = field_to_json(v);
    doc["m"] = field_to_json(m);
    doc["A"] = field_to_json(A);
    doc["W"] = field_to_json(W);
    doc["density"] = {{"kind", density.kind}, {"q", density.q}, {"width", density.width}};
    doc["sigma"] = sigma;
    doc["grading_floor"] = grading_floor;
    doc["kappa_ladder"] = kappa_ladder;
    doc["modes"] = modes;
    doc["n_max"] = n_max;
    doc["seed"] = seed;
    doc["experiments"] = experiments;
    doc["overrides"] = overrides;
    return doc;
}

Scenario Scenario::for_experiment(const std::string& id) const {
    json doc = to_json();
    if (overrides.contains(id)) {
        for (auto it = overrides.at(id).begin(); it != overrides.at(id).end(); ++it) {
            doc[it.key()] = it.value();
        }
    }
    doc["experiments"] = std::vector<std::string>{id};
    doc["overrides"] = json::object();
    return from_json(doc);
}

ChargeDensity Scenario::make_density() const {
    return nelson::make_density(density.kind, density.q, density.width, dim);
}

std::shared_ptr<const Grid> Scenario::make_boson_grid() const {
    if (boson_points == 0) return nullptr;
    return std::make_shared<Grid>(Grid::build(dim, static_cast<int>(boson_points), boson_box));
}

std::shared_ptr<const Grid> Scenario::make_particle_grid() const {
    if (particle_points == 0) return nullptr;
    return std::make_shared<Grid>(
        Grid::build(dim, static_cast<int>(particle_points), particle_box));
}

ScenarioRuntime make_runtime(const Scenario& scenario) {
    auto coeffs = std::make_shared<CoefficientSet>(scenario.dim, scenario.boson_box,
                                                   scenario.particle_box, scenario.a, scenario.v,
                                                   scenario.m, scenario.A, scenario.W);
    const std::shared_ptr<const Grid> bg = scenario.make_boson_grid();
    const std::shared_ptr<const Grid> pg = scenario.make_particle_grid();
    std::shared_ptr<const OperatorContext> ctx;
    if (bg) {
        coeffs->validate_on(*bg, pg ? *pg : *bg);
        ctx = std::make_shared<OperatorContext>(
            pg ? make_context(pg, bg, *coeffs, scenario.sigma)
               : make_point_context(bg, *coeffs, scenario.sigma));
    }
    return ScenarioRuntime{coeffs, ctx, scenario.make_density()};
}

}  // namespace nelson
