#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nelsonlab/density.hpp"
#include "nelsonlab/dressing.hpp"

namespace nelson {

inline FieldSpec constant_field(double base) {
    FieldSpec f;
    f.type = "constant";
    f.base = base;
    return f;
}

struct DensitySpec {
    std::string kind = "gaussian";
    double q = 1.0;
    double width = 1.0;
};

// Declarative description of one model configuration: coefficient fields,
// grids, charge profile, regularization scale, cutoff ladder, and the list
// of experiments to run. Loaded from JSON; unknown keys are rejected.
//
// Grids are optional (0 points): quadrature-only experiments need none, and
// a missing particle grid means the fixed-source (point particle) limit.
// Per-experiment overrides are shallow JSON patches applied on top of the
// base document before a run.
struct Scenario {
    std::string name;
    int dim = 1;
    long particle_points = 0;
    double particle_box = 6.283185307179586;
    long boson_points = 0;
    double boson_box = 6.283185307179586;
    FieldSpec a{};                         // boson second-order field, default 1
    FieldSpec v = constant_field(0.0);     // boson potential
    FieldSpec m{};                         // boson mass field, default 1
    FieldSpec A = constant_field(0.5);     // particle second-order field
    FieldSpec W = constant_field(0.0);     // particle potential
    DensitySpec density;
    double sigma = 0.2;
    double grading_floor = -1.0;  // >= 0 enables the massless grading variant
    std::vector<double> kappa_ladder;
    int modes = 0;
    int n_max = 0;
    unsigned seed = 1234;
    std::vector<std::string> experiments;
    nlohmann::json overrides = nlohmann::json::object();

    static Scenario from_json(const nlohmann::json& doc);
    static Scenario from_file(const std::string& path);
    static Scenario builtin(const std::string& name);
    static std::vector<std::string> builtin_names();
    // Resolves either a builtin name or a filesystem path.
    static Scenario load(const std::string& name_or_path);

    nlohmann::json to_json() const;
    // Base document with the experiment's override patch applied.
    Scenario for_experiment(const std::string& id) const;

    ChargeDensity make_density() const;
    std::shared_ptr<const Grid> make_boson_grid() const;    // null when absent
    std::shared_ptr<const Grid> make_particle_grid() const; // null when absent
};

// Built objects with their ownership resolved (the context keeps a raw
// pointer into `coeffs`, so the bundle must stay alive while in use).
struct ScenarioRuntime {
    std::shared_ptr<CoefficientSet> coeffs;
    std::shared_ptr<const OperatorContext> context;  // null without a boson grid
    ChargeDensity density;
};

ScenarioRuntime make_runtime(const Scenario& scenario);

}  // namespace nelson
