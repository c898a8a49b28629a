#pragma once

#include <memory>
#include <unordered_map>

#include "hdsg/space.hpp"

namespace hdsg {

/// Synthetic objective: a smooth bowl over the active continuous variables
/// whose center and offset depend on the discrete configuration, so the
/// global optimum sits in one specific subspace.
struct ObjectiveTable {
    std::unordered_map<std::string, double> offsets;                 // by config key
    std::unordered_map<std::string, std::vector<double>> centers;    // normalized, by config key
    std::string best_key;
};

/// Built-in design space plus its synthetic objective and documentation of
/// the worked example it reproduces.
struct ProblemSpec {
    std::string name;
    std::shared_ptr<const DesignSpaceGraph> graph;
    std::shared_ptr<const ObjectiveTable> objective;
    long long known_valid_count = -1;
    RawPoint documented_optimum;
    double documented_optimal_value = 0.0;
    std::string mirrors;
};

const std::vector<std::string>& problem_names();
ProblemSpec get_problem(const std::string& name);

/// Deterministic objective value; the point must be valid for the space.
double evaluate(const ProblemSpec& problem, const ExtendedPoint& x);

/// Conditional level sets for the "mlp_notebook" variant (per-optimizer
/// layer counts and unit levels). The shipped "mlp" space uses the full
/// level sets; filling these in narrows it toward 207 valid configurations.
struct MlpConditionalSets {
    std::vector<long long> layers_asgd;
    std::vector<long long> layers_adam;
    std::vector<long long> units_asgd;
    std::vector<long long> units_adam;
};

ProblemSpec make_mlp_notebook(const MlpConditionalSets& sets);

} // namespace hdsg
