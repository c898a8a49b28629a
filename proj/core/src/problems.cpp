#include "hdsg/problems.hpp"

#include <algorithm>
#include <cmath>

#include "hdsg/errors.hpp"
#include "hdsg/rng.hpp"

namespace hdsg {

namespace {

VariableDecl cont(const std::string& name, double lo, double hi) {
    VariableDecl d;
    d.name = name;
    d.domain.type = VarType::Continuous;
    d.domain.bounds = {lo, hi};
    return d;
}

VariableDecl integer(const std::string& name, std::vector<long long> levels) {
    VariableDecl d;
    d.name = name;
    d.domain.type = VarType::Integer;
    d.domain.int_levels = std::move(levels);
    return d;
}

VariableDecl categorical(const std::string& name, std::vector<std::string> labels) {
    VariableDecl d;
    d.name = name;
    d.domain.type = VarType::Categorical;
    d.domain.labels = std::move(labels);
    return d;
}

Condition when_levels(std::vector<std::size_t> idx) {
    Condition c;
    c.levels = std::move(idx);
    return c;
}

Condition when_any() { return {}; }

Condition when_at_least(double lo) {
    Condition c;
    c.range = Interval{lo, 1e300};
    return c;
}

Effect include_all() {
    Effect e;
    e.kind = EffectKind::Include;
    return e;
}

Effect include_levels(std::vector<std::size_t> idx) {
    Effect e;
    e.kind = EffectKind::Include;
    e.levels = std::move(idx);
    return e;
}

Effect include_range(double lo, double hi) {
    Effect e;
    e.kind = EffectKind::Include;
    e.range = Interval{lo, hi};
    return e;
}

Effect restrict_lower_affine(double offset, double slope) {
    Effect e;
    e.kind = EffectKind::RestrictBounds;
    e.lower = AffineBound{offset, slope};
    return e;
}

Effect restrict_levels(std::vector<std::size_t> idx) {
    Effect e;
    e.kind = EffectKind::RestrictBounds;
    e.levels = std::move(idx);
    return e;
}

Effect restrict_upper_parent() {
    Effect e;
    e.kind = EffectKind::RestrictBounds;
    e.upper = AffineBound{0.0, 1.0};
    return e;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Offsets and bowl centers per discrete configuration, hash-seeded so the
/// table is stable across runs. The lowest-offset configuration is pinned
/// at zero and becomes the documented optimum's subspace.
std::shared_ptr<ObjectiveTable> build_objective(const std::string& name,
                                                const DesignSpaceGraph& g) {
    auto table = std::make_shared<ObjectiveTable>();
    const auto configs = enumerate_discrete(g);
    const auto cont_idx = g.continuous_indices();
    double best = 1e300;
    for (const auto& c : configs) {
        const std::string key = active_discrete_key(g, c.values);
        CounterRng rng(fnv1a(name + "#" + key));
        const double offset = 0.25 + 1.75 * rng.uniform();
        std::vector<double> centers(cont_idx.size(), 0.0);
        for (std::size_t k = 0; k < cont_idx.size(); ++k) centers[k] = rng.uniform(0.15, 0.85);
        table->offsets[key] = offset;
        table->centers[key] = std::move(centers);
        if (offset < best) {
            best = offset;
            table->best_key = key;
        }
    }
    if (!table->best_key.empty()) table->offsets[table->best_key] = 0.0;
    return table;
}

ProblemSpec finish(std::string name, DesignSpaceGraph graph, long long known_valid,
                   std::string mirrors) {
    ProblemSpec p;
    p.name = std::move(name);
    p.graph = std::make_shared<DesignSpaceGraph>(std::move(graph));
    p.objective = build_objective(p.name, *p.graph);
    p.known_valid_count = known_valid;
    p.mirrors = std::move(mirrors);

    // Documented optimum: the best configuration with continuous entries at
    // the bowl centers, passed through correct() so constrained supports
    // (orders, parameterized bounds) stay respected.
    const auto configs = enumerate_discrete(*p.graph);
    const auto cont_idx = p.graph->continuous_indices();
    for (const auto& c : configs) {
        if (active_discrete_key(*p.graph, c.values) != p.objective->best_key) continue;
        RawPoint raw;
        for (std::size_t i = 0; i < p.graph->size(); ++i)
            if (c.values[i] && !p.graph->is_intermediate(i))
                raw[p.graph->variable(i).name] = *c.values[i];
        const auto& centers = p.objective->centers.at(p.objective->best_key);
        for (std::size_t k = 0; k < cont_idx.size(); ++k) {
            const std::size_t v = cont_idx[k];
            if (!c.active[v]) continue;
            const Domain& dom = p.graph->variable(v).domain;
            raw[p.graph->variable(v).name] = dom.bounds.lo + centers[k] * dom.bounds.width();
        }
        const ExtendedPoint opt = correct(*p.graph, raw);
        p.documented_optimum = to_raw(*p.graph, opt);
        p.documented_optimal_value = evaluate(p, opt);
        break;
    }
    return p;
}

// ---- catalog ---------------------------------------------------------

/// Motors/propellers toy space: a two-level decree chain where the motor
/// count includes per-motor propeller counts, each including per-propeller
/// radii.
ProblemSpec motors_propellers() {
    std::vector<VariableDecl> decls = {
        integer("n_motors", {0, 1, 2}),
        integer("propellers_1", {1, 2}),
        integer("propellers_2", {1, 2}),
        cont("radius_1_1", 0.5, 2.0),
        cont("radius_1_2", 0.5, 2.0),
        cont("radius_2_1", 0.5, 2.0),
        cont("radius_2_2", 0.5, 2.0),
    };
    std::vector<DecreeRule> rules = {
        {"n_motors", when_levels({1, 2}), "propellers_1", include_all()},
        {"n_motors", when_levels({2}), "propellers_2", include_all()},
        {"propellers_1", when_levels({0, 1}), "radius_1_1", include_all()},
        {"propellers_1", when_levels({1}), "radius_1_2", include_all()},
        {"propellers_2", when_levels({0, 1}), "radius_2_1", include_all()},
        {"propellers_2", when_levels({1}), "radius_2_2", include_all()},
    };
    return finish("motors_propellers",
                  DesignSpaceGraph::build(std::move(decls), std::move(rules)), 7,
                  "aircraft wing with motor/propeller counts and radii");
}

/// Partial decree: wing length always present, its lower bound raised by
/// the motor count.
ProblemSpec wing_length() {
    std::vector<VariableDecl> decls = {
        integer("n_motors", {0, 1, 2}),
        integer("propellers_1", {1, 2}),
        integer("propellers_2", {1, 2}),
        cont("wing_length", 1.0, 4.0),
    };
    std::vector<DecreeRule> rules = {
        {"n_motors", when_levels({1, 2}), "propellers_1", include_all()},
        {"n_motors", when_levels({2}), "propellers_2", include_all()},
        {"n_motors", when_any(), "wing_length", restrict_lower_affine(1.0, 1.0)},
    };
    return finish("wing_length", DesignSpaceGraph::build(std::move(decls), std::move(rules)), 7,
                  "aircraft wing with a varying number of motors");
}

/// Incompatibility: the large fuel reserve cannot be combined with the
/// full-capacity battery.
ProblemSpec hybrid_energy() {
    std::vector<VariableDecl> decls = {
        categorical("energy_source", {"Fuel", "Electric", "Hybrid"}),
        categorical("reserve_capacity", {"Big", "Small"}),
        categorical("battery_type", {"Safe", "Optimal"}),
        cont("reserve", 50.0, 150.0),
        cont("battery_capacity", 10.0, 40.0),
    };
    std::vector<DecreeRule> rules = {
        {"energy_source", when_levels({0, 2}), "reserve_capacity", include_all()},
        {"energy_source", when_levels({1, 2}), "battery_type", include_all()},
        {"reserve_capacity", when_levels({0}), "reserve", include_range(100.0, 150.0)},
        {"reserve_capacity", when_levels({1}), "reserve", include_range(50.0, 100.0)},
        {"battery_type", when_levels({0}), "battery_capacity", include_range(10.0, 25.0)},
        {"battery_type", when_levels({1}), "battery_capacity", include_range(25.0, 40.0)},
    };
    std::vector<IncompatibilityEdge> incompat = {
        {{"reserve_capacity", Value{std::string("Big")}},
         {"battery_type", Value{std::string("Optimal")}}},
    };
    return finish("hybrid_energy",
                  DesignSpaceGraph::build(std::move(decls), std::move(rules), std::move(incompat)),
                  7, "aircraft with a varying energy source");
}

/// Strict pressure ordering p_min < p_input < p_max via partial decrees
/// plus order edges.
ProblemSpec pressure_order() {
    std::vector<VariableDecl> decls = {
        cont("p_max", 1.5, 5.0),
        cont("p_input", 1.5, 5.0),
        cont("p_min", 1.5, 5.0),
    };
    std::vector<DecreeRule> rules = {
        {"p_max", Condition{{}, Interval{1.5, 5.0}}, "p_input", restrict_upper_parent()},
        {"p_input", Condition{{}, Interval{1.5, 5.0}}, "p_min", restrict_upper_parent()},
    };
    std::vector<OrderRelation> orders = {
        {"p_input", "p_max", true},
        {"p_min", "p_input", true},
    };
    return finish("pressure_order",
                  DesignSpaceGraph::build(std::move(decls), std::move(rules), {}, std::move(orders)),
                  1, "hydrogen tank pressure ordering");
}

/// Intermediate "and" node: the backup battery is needed when the source is
/// electric, or hybrid with an insufficient fuel reserve.
ProblemSpec intermediate_battery() {
    std::vector<VariableDecl> decls = {
        categorical("energy_source", {"Fuel", "Electric", "Hybrid"}),
        cont("fuel_reserve", 50.0, 150.0),
        cont("backup_battery", 10.0, 40.0),
    };
    IntermediateNode low_reserve;
    low_reserve.name = "low_reserve";
    FormulaAtom atom;
    atom.var = "fuel_reserve";
    atom.threshold = 100.0;
    atom.less_than = true;
    low_reserve.atoms = {atom};
    low_reserve.targets = {
        {"low_reserve", when_levels({1}), "backup_battery", include_all()},
    };
    std::vector<DecreeRule> rules = {
        {"energy_source", when_levels({0, 2}), "fuel_reserve", include_all()},
        {"energy_source", when_levels({2}), "low_reserve", include_all()},
        {"energy_source", when_levels({1}), "backup_battery", include_all()},
    };
    return finish("intermediate_battery",
                  DesignSpaceGraph::build(std::move(decls), std::move(rules), {}, {},
                                          {std::move(low_reserve)}),
                  4, "hybrid-electric technology choice with an intermediate node");
}

/// Source-to-consumer assignment: each consumer's source choice is decreed
/// by the consumer count and restricted by the source count.
ProblemSpec source_to_consumer() {
    std::vector<VariableDecl> decls = {
        integer("n_sources", {1, 2}),
        integer("n_consumers", {1, 2}),
        integer("consumer_1_source", {1, 2}),
        integer("consumer_2_source", {1, 2}),
    };
    std::vector<DecreeRule> rules = {
        {"n_consumers", when_levels({0, 1}), "consumer_1_source", include_all()},
        {"n_consumers", when_levels({1}), "consumer_2_source", include_all()},
        {"n_sources", when_levels({0}), "consumer_1_source", restrict_levels({0})},
        {"n_sources", when_levels({0}), "consumer_2_source", restrict_levels({0})},
    };
    return finish("source_to_consumer",
                  DesignSpaceGraph::build(std::move(decls), std::move(rules)), 8,
                  "source-to-consumer assignment");
}

DesignSpaceGraph mlp_graph(const std::vector<long long>& layers_asgd,
                           const std::vector<long long>& layers_adam,
                           const std::vector<long long>& units_asgd,
                           const std::vector<long long>& units_adam) {
    const std::vector<long long> all_layers = {1, 2, 3};
    const std::vector<long long> all_units = {25, 30, 35, 40, 45};
    auto idx_of = [](const std::vector<long long>& domain, const std::vector<long long>& subset) {
        std::vector<std::size_t> out;
        for (long long v : subset)
            out.push_back(static_cast<std::size_t>(
                std::find(domain.begin(), domain.end(), v) - domain.begin()));
        return out;
    };

    std::vector<VariableDecl> decls = {
        cont("learning_rate", 0.0, 1.0),
        categorical("activation", {"ReLU", "Sigmoid", "Tanh"}),
        categorical("optimizer", {"ASGD", "Adam"}),
        integer("n_layers", all_layers),
        cont("decay", 0.0, 1.0),
        cont("power_update", 0.0, 1.0),
        cont("average_start", 1e3, 1e8),
        cont("run_average_1", 0.0, 1.0),
        cont("run_average_2", 0.0, 1.0),
        cont("num_stability", 0.0, 1.0),
        integer("units_1", all_units),
        integer("units_2", all_units),
        integer("units_3", all_units),
    };
    std::vector<DecreeRule> rules = {
        {"optimizer", when_levels({0}), "n_layers", include_levels(idx_of(all_layers, layers_asgd))},
        {"optimizer", when_levels({1}), "n_layers", include_levels(idx_of(all_layers, layers_adam))},
        {"optimizer", when_levels({0}), "decay", include_all()},
        {"optimizer", when_levels({0}), "power_update", include_all()},
        {"optimizer", when_levels({0}), "average_start", include_all()},
        {"optimizer", when_levels({1}), "run_average_1", include_all()},
        {"optimizer", when_levels({1}), "run_average_2", include_all()},
        {"optimizer", when_levels({1}), "num_stability", include_all()},
        {"n_layers", when_at_least(1.0), "units_1", include_all()},
        {"n_layers", when_at_least(2.0), "units_2", include_all()},
        {"n_layers", when_at_least(3.0), "units_3", include_all()},
    };
    // Conditional unit sets narrow the unit levels per optimizer without
    // gating inclusion, which stays with n_layers.
    for (int o = 0; o < 2; ++o) {
        const auto& set = o == 0 ? units_asgd : units_adam;
        if (set.size() == all_units.size()) continue;
        for (const char* unit_var : {"units_1", "units_2", "units_3"})
            rules.push_back({"optimizer", when_levels({static_cast<std::size_t>(o)}), unit_var,
                             restrict_levels(idx_of(all_units, set))});
    }
    return DesignSpaceGraph::build(std::move(decls), std::move(rules));
}

/// Flat MLP hyperparameter space: full level sets everywhere, a 2-level
/// decree chain optimizer -> layers -> units and per-optimizer continuous
/// hyperparameters.
ProblemSpec mlp_flat() {
    return finish("mlp",
                  mlp_graph({1, 2, 3}, {1, 2, 3}, {25, 30, 35, 40, 45}, {25, 30, 35, 40, 45}), 930,
                  "MLP hyperparameter space, unconditional levels");
}

/// DRAGON reduced to its design variables: layout, the cores/motors
/// hierarchy (motors a multiple of 4, 8, or 12 depending on the cores) and
/// ten continuous sizing variables.
ProblemSpec dragon_lite() {
    std::vector<VariableDecl> decls = {
        categorical("layout", {"underwing", "rear"}),
        integer("n_cores", {2, 4, 6}),
        integer("n_motors", {8, 12, 16, 20, 24, 28, 32, 36, 40}),
        cont("fan_pressure_ratio", 1.05, 1.3),
        cont("wing_aspect_ratio", 8.0, 12.0),
        cont("wing_sweep_deg", 15.0, 40.0),
        cont("wing_taper_ratio", 0.2, 0.5),
        cont("ht_aspect_ratio", 3.0, 6.0),
        cont("ht_sweep_deg", 20.0, 40.0),
        cont("ht_taper_ratio", 0.3, 0.5),
        cont("tofl_m", 1800.0, 2500.0),
        cont("climb_speed_ftmin", 300.0, 800.0),
        cont("climb_slope_rad", 0.075, 0.15),
    };
    // multiples of 4 / 8 / 12 inside {8,...,40}
    std::vector<DecreeRule> rules = {
        {"n_cores", when_levels({0}), "n_motors",
         include_levels({0, 1, 2, 3, 4, 5, 6, 7, 8})},
        {"n_cores", when_levels({1}), "n_motors", include_levels({0, 2, 4, 6, 8})},
        {"n_cores", when_levels({2}), "n_motors", include_levels({1, 4, 7})},
    };
    return finish("dragon_lite", DesignSpaceGraph::build(std::move(decls), std::move(rules)), 34,
                  "distributed-propulsion aircraft, 17 (cores, motors) architectures");
}

std::vector<ProblemSpec> build_catalog() {
    std::vector<ProblemSpec> all;
    all.push_back(motors_propellers());
    all.push_back(wing_length());
    all.push_back(hybrid_energy());
    all.push_back(pressure_order());
    all.push_back(intermediate_battery());
    all.push_back(source_to_consumer());
    all.push_back(mlp_flat());
    all.push_back(dragon_lite());
    return all;
}

const std::vector<ProblemSpec>& catalog() {
    static const std::vector<ProblemSpec> all = build_catalog();
    return all;
}

} // namespace

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& p : catalog()) out.push_back(p.name);
        return out;
    }();
    return names;
}

ProblemSpec get_problem(const std::string& name) {
    for (const auto& p : catalog())
        if (p.name == name) return p;
    if (name == "mlp_flat")  // alias for the flat variant
        return get_problem("mlp");
    throw UnknownProblemError("unknown problem '" + name + "'");
}

ProblemSpec make_mlp_notebook(const MlpConditionalSets& sets) {
    ProblemSpec p = finish("mlp_notebook",
                           mlp_graph(sets.layers_asgd, sets.layers_adam, sets.units_asgd,
                                     sets.units_adam),
                           -1, "MLP hyperparameter space, conditional level sets");
    return p;
}

double evaluate(const ProblemSpec& problem, const ExtendedPoint& x) {
    const DesignSpaceGraph& g = *problem.graph;
    const ValidityReport rep = is_valid(g, x);
    if (!rep.ok)
        throw InvalidPointError("point rejected for '" + problem.name + "': " + rep.violations.front());

    const std::string key = active_discrete_key(g, x.values);
    const auto off_it = problem.objective->offsets.find(key);
    if (off_it == problem.objective->offsets.end())
        throw InvalidPointError("configuration '" + key + "' not in the objective table");
    const auto& centers = problem.objective->centers.at(key);

    double value = off_it->second;
    const auto cont_idx = g.continuous_indices();
    for (std::size_t k = 0; k < cont_idx.size(); ++k) {
        const std::size_t v = cont_idx[k];
        if (!x.values[v]) continue;
        const double z = g.variable(v).domain.normalize(*x.values[v]);
        const double d = z - centers[k];
        value += d * d;
    }
    return value;
}

} // namespace hdsg
