#include <doctest.h>

#include <cmath>

#include "hdsg/bo.hpp"
#include "hdsg/io.hpp"
#include "helpers.hpp"

using namespace hdsg;
using namespace hdsg::testing;

namespace {

GpModel small_model(const ProblemSpec& problem, std::size_t n, std::uint64_t seed) {
    Dataset data;
    data.points = sample_valid(*problem.graph, n, seed);
    for (const auto& p : data.points) data.targets.push_back(evaluate(problem, p));
    return fit(problem.graph, data, KernelKind::Hier);
}

} // namespace

TEST_CASE("expected improvement: closed-form cases") {
    const ProblemSpec problem = get_problem("dragon_lite");
    const GpModel m = small_model(problem, 15, 2);
    const double f_min = *std::min_element(m.data.targets.begin(), m.data.targets.end());

    // sigma = 0 means no improvement is possible, and the sigma -> 0 limit
    // vanishes: EI = 0 at noiseless training points.
    CHECK(expected_improvement_value(f_min, 0.0, f_min) == 0.0);
    CHECK(expected_improvement_value(f_min, 1e-12, f_min) <= 1e-9);
    CHECK(expected_improvement_value(f_min + 5.0, 1e-12, f_min) <= 1e-9);

    // At the best training point the posterior sd nearly collapses; EI
    // shrinks with it.
    std::size_t best = 0;
    for (std::size_t i = 0; i < m.data.targets.size(); ++i)
        if (m.data.targets[i] == f_min) best = i;
    const double sd_best = std::sqrt(predict(m, m.data.points[best]).second);
    CHECK(expected_improvement(m, m.data.points[best], f_min) <= 0.5 * sd_best + 1e-12);

    // mu = f_min with sd > 0 gives EI = sd * phi(0) = sd / sqrt(2 pi);
    // checked against the prediction at a fresh point.
    const auto xs = sample_valid(*problem.graph, 5, 99);
    for (const auto& x : xs) {
        const auto [mu, var] = predict(m, x);
        const double sd = std::sqrt(var);
        if (sd <= 0.0) continue;
        const double ei = expected_improvement(m, x, mu);  // f_min set to mu
        CHECK(ei == doctest::Approx(sd / std::sqrt(2.0 * 3.14159265358979)).epsilon(1e-9));
    }

    // EI grows with sd at fixed mu = f_min: scan a synthetic posterior.
    double prev = 0.0;
    for (double sd = 0.1; sd <= 10.0; sd *= 2.0) {
        const double ei = sd / std::sqrt(2.0 * 3.14159265358979);
        CHECK(ei > prev);
        prev = ei;
    }

    // EI is non-negative over a sweep of candidates.
    for (const auto& x : sample_valid(*problem.graph, 50, 123))
        CHECK(expected_improvement(m, x, f_min) >= 0.0);
}

TEST_CASE("wb2s: limiting cases and the pool-based scale") {
    const ProblemSpec problem = get_problem("dragon_lite");
    const GpModel m = small_model(problem, 15, 3);
    const double f_min = *std::min_element(m.data.targets.begin(), m.data.targets.end());

    // wb2s is s*EI - mu by definition; with EI = 0 it reduces to pure
    // exploitation -mu.
    for (const auto& x : sample_valid(*problem.graph, 8, 44)) {
        const auto [mu, var] = predict(m, x);
        const double ei = expected_improvement_value(mu, std::sqrt(var), f_min);
        CHECK(wb2s(m, x, f_min, 2.5) == doctest::Approx(2.5 * ei - mu).epsilon(1e-12));
    }
    CHECK(expected_improvement_value(0.7, 0.0, 0.1) == 0.0);  // EI = 0 -> wb2s = -mu

    // The scale is finite for every pool; the EI-free case falls back to 1.
    const auto pool = sample_valid(*problem.graph, 64, 5);
    const double s = wb2s_scale(m, pool, f_min);
    CHECK(std::isfinite(s));
    CHECK(wb2s_scale(m, {}, f_min) == 1.0);  // guarded division

    // At the pool's EI argmax with mu = 0, wb2s keeps the same argmax.
    double best_ei = -1.0;
    std::size_t arg_ei = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double ei = expected_improvement(m, pool[i], f_min);
        if (ei > best_ei) {
            best_ei = ei;
            arg_ei = i;
        }
    }
    if (best_ei > 0.0 && std::abs(predict(m, pool[arg_ei]).first) < 1e-12) {
        double best_w = -1e300;
        std::size_t arg_w = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const double w = wb2s(m, pool[i], f_min, s);
            if (w > best_w) {
                best_w = w;
                arg_w = i;
            }
        }
        CHECK(arg_w == arg_ei);
    }
}

TEST_CASE("propose_next is deterministic and always proposes valid points") {
    const ProblemSpec problem = get_problem("mlp");
    const GpModel m = small_model(problem, 12, 4);
    BoConfig cfg;
    cfg.pool = 64;
    cfg.neighbors = 16;

    const ExtendedPoint inc = m.data.points[0];
    const ExtendedPoint a = propose_next(m, *problem.graph, cfg, 555, &inc);
    const ExtendedPoint b = propose_next(m, *problem.graph, cfg, 555, &inc);
    CHECK(points_equal(a, b));

    for (int it = 0; it < 50; ++it) {
        const ExtendedPoint p =
            propose_next(m, *problem.graph, cfg, 1000 + static_cast<std::uint64_t>(it), &inc);
        CHECK(is_valid(*problem.graph, p).ok);
    }
}

TEST_CASE("wb2s proposal picks the dominant candidate") {
    // Pure-discrete space: the proposal pool enumerates exactly the 8 valid
    // points. With EI essentially flat at training points, wb2s reduces to
    // -mu and the proposal must be the pool's wb2s argmax.
    const ProblemSpec problem = get_problem("source_to_consumer");
    Dataset data;
    data.points = sample_valid(*problem.graph, 8, 51);
    for (const auto& p : data.points) data.targets.push_back(evaluate(problem, p));
    const GpModel m = fit(problem.graph, data, KernelKind::Hier);

    BoConfig cfg;
    cfg.pool = 8;
    cfg.acq = Acquisition::WB2S;
    const ExtendedPoint chosen = propose_next(m, *problem.graph, cfg, 321, nullptr);

    const auto pool = sample_valid(*problem.graph, 8, 321);
    const double f_min = *std::min_element(data.targets.begin(), data.targets.end());
    const double s = wb2s_scale(m, pool, f_min);
    std::size_t arg = 0;
    double best = -1e300;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double w = wb2s(m, pool[i], f_min, s);
        if (w > best) {
            best = w;
            arg = i;
        }
    }
    CHECK(points_equal(chosen, pool[arg]));
}

TEST_CASE("argmax is invariant to positive scaling of the acquisition") {
    // By construction propose_next takes an argmax; scaling all scores by
    // c > 0 cannot change it. Exercised through EI vs 10*EI on a fixed pool.
    const ProblemSpec problem = get_problem("dragon_lite");
    const GpModel m = small_model(problem, 10, 6);
    const double f_min = *std::min_element(m.data.targets.begin(), m.data.targets.end());
    const auto pool = sample_valid(*problem.graph, 32, 9);
    std::size_t arg1 = 0, arg10 = 0;
    double b1 = -1e300, b10 = -1e300;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double ei = expected_improvement(m, pool[i], f_min);
        if (ei > b1) {
            b1 = ei;
            arg1 = i;
        }
        if (10.0 * ei > b10) {
            b10 = 10.0 * ei;
            arg10 = i;
        }
    }
    CHECK(arg1 == arg10);
}

TEST_CASE("run_bo: budget 1, trace bookkeeping, reproducibility") {
    const ProblemSpec problem = get_problem("source_to_consumer");
    BoConfig cfg;
    cfg.doe = 5;
    cfg.budget = 1;
    cfg.pool = 32;
    cfg.neighbors = 8;
    cfg.seed = 11;

    const BoTrace t = run_bo(problem, cfg);
    CHECK(t.iterations.size() == 1);
    CHECK(t.doe_points.size() == 5);
    double best = *std::min_element(t.doe_values.begin(), t.doe_values.end());
    best = std::min(best, t.iterations[0].value);
    CHECK(t.final_incumbent == best);

    const BoTrace t2 = run_bo(problem, cfg);
    REQUIRE(t2.iterations.size() == t.iterations.size());
    for (std::size_t i = 0; i < t.iterations.size(); ++i) {
        CHECK(points_equal(t.iterations[i].point, t2.iterations[i].point));
        CHECK(t.iterations[i].value == t2.iterations[i].value);
    }
}

TEST_CASE("incumbent sequences never increase and all points are valid") {
    const ProblemSpec problem = get_problem("dragon_lite");
    BoConfig cfg;
    cfg.doe = 8;
    cfg.budget = 10;
    cfg.pool = 64;
    cfg.neighbors = 16;
    cfg.seed = 17;

    const BoTrace t = run_bo(problem, cfg);
    double prev = 1e300;
    for (const auto& it : t.iterations) {
        CHECK(is_valid(*problem.graph, it.point).ok);
        CHECK(it.incumbent <= prev);
        prev = it.incumbent;
    }
}

TEST_CASE("random baseline shares the DoE prefix and has doe+budget evaluations") {
    const ProblemSpec problem = get_problem("dragon_lite");
    BoConfig cfg;
    cfg.doe = 6;
    cfg.budget = 9;
    cfg.pool = 32;
    cfg.neighbors = 8;
    cfg.seed = 23;

    const BoTrace bo = run_bo(problem, cfg);
    const BoTrace rnd = run_random_baseline(problem, cfg);
    CHECK(rnd.total_evaluations() == 15);
    REQUIRE(bo.doe_points.size() == rnd.doe_points.size());
    for (std::size_t i = 0; i < bo.doe_points.size(); ++i)
        CHECK(points_equal(bo.doe_points[i], rnd.doe_points[i]));

    double prev = 1e300;
    for (const auto& it : rnd.iterations) {
        CHECK(it.incumbent <= prev);
        prev = it.incumbent;
    }
}

TEST_CASE("bo beats random search on the synthetic dragon objective") {
    // Smaller than the acceptance-gate setup; a smoke test of the benefit.
    const ProblemSpec problem = get_problem("dragon_lite");
    BoConfig cfg;
    cfg.doe = 8;
    cfg.budget = 15;
    cfg.pool = 128;
    cfg.neighbors = 32;

    int wins = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        cfg.seed = seed;
        const BoTrace bo = run_bo(problem, cfg);
        const BoTrace rnd = run_random_baseline(problem, cfg);
        if (bo.final_incumbent <= rnd.final_incumbent) ++wins;
    }
    CHECK(wins >= 2);
}
