#include "hdsg/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdsg/errors.hpp"
#include "hdsg/rng.hpp"

namespace hdsg {

namespace {

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / 2.5066282746310002; }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return seed * 0x9e3779b97f4a7c15ULL + salt + 1;
}

RawPoint perturb_incumbent(const DesignSpaceGraph& g, const ExtendedPoint& inc, CounterRng& rng) {
    RawPoint raw;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!inc.values[i] || g.is_intermediate(i)) continue;
        const Domain& dom = g.variable(i).domain;
        if (dom.type == VarType::Continuous) {
            const double width = dom.bounds.width();
            raw[g.variable(i).name] = std::get<double>(*inc.values[i]) + 0.1 * width * rng.normal();
        } else if (rng.uniform() < 0.3) {
            raw[g.variable(i).name] = dom.level_value(rng.below(dom.level_count()));
        } else {
            raw[g.variable(i).name] = *inc.values[i];
        }
    }
    return raw;
}

double best_target(const GpModel& m) {
    return *std::min_element(m.data.targets.begin(), m.data.targets.end());
}

} // namespace

const char* acquisition_name(Acquisition a) {
    return a == Acquisition::EI ? "EI" : "WB2S";
}

Acquisition acquisition_from_name(const std::string& s) {
    if (s == "EI" || s == "ei") return Acquisition::EI;
    if (s == "WB2S" || s == "wb2s" || s == "WB2s") return Acquisition::WB2S;
    throw DomainError("unknown acquisition '" + s + "'");
}

double expected_improvement_value(double mu, double sd, double f_min) {
    if (sd <= 0.0) return 0.0;
    const double z = (f_min - mu) / sd;
    return std::max(0.0, (f_min - mu) * norm_cdf(z) + sd * norm_pdf(z));
}

double expected_improvement(const GpModel& m, const ExtendedPoint& x, double f_min) {
    const auto [mu, var] = predict(m, x);
    return expected_improvement_value(mu, std::sqrt(var), f_min);
}

double wb2s(const GpModel& m, const ExtendedPoint& x, double f_min, double s) {
    const auto [mu, var] = predict(m, x);
    return s * expected_improvement_value(mu, std::sqrt(var), f_min) - mu;
}

double wb2s_scale(const GpModel& m, const std::vector<ExtendedPoint>& pool, double f_min) {
    double ei_best = 0.0, mu_best = 0.0;
    for (const auto& x : pool) {
        const double ei = expected_improvement(m, x, f_min);
        if (ei > ei_best) {
            ei_best = ei;
            mu_best = predict(m, x).first;
        }
    }
    if (!(ei_best > 0.0)) return 1.0;
    return 100.0 * std::abs(mu_best) / ei_best;
}

ExtendedPoint propose_next(const GpModel& m, const DesignSpaceGraph& g, const BoConfig& cfg,
                           std::uint64_t iteration_seed, const ExtendedPoint* incumbent) {
    std::vector<ExtendedPoint> pool =
        sample_valid(g, static_cast<std::size_t>(cfg.pool), iteration_seed);
    if (incumbent) {
        CounterRng rng(iteration_seed, 0x7e7);
        for (int k = 0; k < cfg.neighbors; ++k)
            pool.push_back(correct(g, perturb_incumbent(g, *incumbent, rng)));
    }
    if (pool.empty()) throw InfeasibleError("empty candidate pool");

    const double f_min = best_target(m);
    const double s = cfg.acq == Acquisition::WB2S ? wb2s_scale(m, pool, f_min) : 0.0;
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double score = cfg.acq == Acquisition::EI
                                 ? expected_improvement(m, pool[i], f_min)
                                 : wb2s(m, pool[i], f_min, s);
        if (score > best) {
            best = score;
            arg = i;
        }
    }
    return pool[arg];
}

BoTrace run_bo(const ProblemSpec& problem, const BoConfig& cfg) {
    if (cfg.budget < 1 || cfg.doe < 2) throw DomainError("BO needs doe >= 2 and budget >= 1");
    const DesignSpaceGraph& g = *problem.graph;

    BoTrace trace;
    trace.doe_points = sample_valid(g, static_cast<std::size_t>(cfg.doe), cfg.seed);
    for (const auto& p : trace.doe_points) trace.doe_values.push_back(evaluate(problem, p));

    Dataset data{trace.doe_points, trace.doe_values, problem.name};
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.seed = mix_seed(cfg.seed, 1);
    GpModel model = fit(problem.graph, data, cfg.kernel, fit_cfg);

    std::size_t inc_at = static_cast<std::size_t>(
        std::min_element(trace.doe_values.begin(), trace.doe_values.end()) -
        trace.doe_values.begin());
    ExtendedPoint inc_point = trace.doe_points[inc_at];
    double incumbent = trace.doe_values[inc_at];

    for (int it = 0; it < cfg.budget; ++it) {
        const ExtendedPoint x =
            propose_next(model, g, cfg, mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(it)),
                         &inc_point);
        const double y = evaluate(problem, x);
        if (y < incumbent) {
            incumbent = y;
            inc_point = x;
        }
        trace.iterations.push_back({x, y, incumbent});
        data.points.push_back(x);
        data.targets.push_back(y);
        if (it + 1 < cfg.budget) model = refit(model, data, cfg.refit_budget);
    }
    trace.final_incumbent = incumbent;
    return trace;
}

BoTrace run_random_baseline(const ProblemSpec& problem, const BoConfig& cfg) {
    if (cfg.budget < 1 || cfg.doe < 1) throw DomainError("baseline needs doe >= 1 and budget >= 1");
    const DesignSpaceGraph& g = *problem.graph;

    BoTrace trace;
    trace.doe_points = sample_valid(g, static_cast<std::size_t>(cfg.doe), cfg.seed);
    for (const auto& p : trace.doe_points) trace.doe_values.push_back(evaluate(problem, p));
    double incumbent = *std::min_element(trace.doe_values.begin(), trace.doe_values.end());

    const auto extra =
        sample_valid(g, static_cast<std::size_t>(cfg.budget), mix_seed(cfg.seed, 0xbace));
    for (const auto& x : extra) {
        const double y = evaluate(problem, x);
        incumbent = std::min(incumbent, y);
        trace.iterations.push_back({x, y, incumbent});
    }
    trace.final_incumbent = incumbent;
    return trace;
}

} // namespace hdsg
