// Acceptance suite: one check per release criterion, each printing a
// PASS/FAIL line. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdsg/bo.hpp"
#include "hdsg/distance.hpp"
#include "hdsg/io.hpp"
#include "hdsg/kernel.hpp"
#include "hdsg/problems.hpp"
#include "helpers.hpp"

using namespace hdsg;
using namespace hdsg::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool dragon_enumeration(std::string& detail) {
    const auto t0 = Clock::now();
    const auto g = get_problem("dragon_lite").graph;
    const auto configs = enumerate_discrete(*g);
    const double dt = seconds_since(t0);

    std::set<std::pair<long long, long long>> pairs;
    for (const auto& c : configs)
        pairs.insert({std::get<long long>(*c.values[g->index_of("n_cores")]),
                      std::get<long long>(*c.values[g->index_of("n_motors")])});
    bool rule_ok = true;
    for (const auto& [cores, motors] : pairs) {
        const long long unit = cores == 2 ? 4 : cores == 4 ? 8 : 12;
        if (motors % unit != 0 || motors < 8 || motors > 40) rule_ok = false;
    }
    std::ostringstream os;
    os << pairs.size() << " (cores, motors) pairs, rule "
       << (rule_ok ? "holds" : "violated") << ", " << dt << " s";
    detail = os.str();
    return pairs.size() == 17 && rule_ok && dt < 1.0;
}

bool mlp_continuous_statistics(std::string& detail) {
    const ImputationStats st = stats(*get_problem("mlp").graph);
    std::ostringstream os;
    os << "n_dim_cont=" << st.n_dim_cont << " n_dim_cont_mean=" << st.n_dim_cont_mean
       << " cont_imp_ratio=" << st.cont_imp_ratio << " n_declared=" << st.n_declared;
    detail = os.str();
    return st.n_dim_cont == 7 && st.n_dim_cont_mean == 4.0 && st.cont_imp_ratio == 1.75 &&
           st.n_declared == 2250;
}

// The conditional MLP level sets are a transcription slot (only the flat
// sets ship), so the 207-valid target cannot be checked; the substitute is
// exact complete-encoder/brute-force agreement on every built-in space
// small enough to brute force.
bool oracle_equivalence(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : problem_names()) {
        const auto g = get_problem(name).graph;
        long long declared = 1;
        for (std::size_t v : g->discrete_indices())
            declared *= static_cast<long long>(g->variable(v).domain.level_count());
        if (declared > 100000) continue;
        const long long fast = static_cast<long long>(enumerate_discrete(*g).size());
        const long long brute = brute_force_valid_count(*g);
        if (fast != brute) {
            ok = false;
            os << name << ": " << fast << " != " << brute << "; ";
        }
    }
    detail = ok ? "complete encoder = brute force on all spaces" : os.str();
    return ok;
}

bool source_to_consumer_counts(std::string& detail) {
    const ImputationStats st = stats(*get_problem("source_to_consumer").graph);
    std::ostringstream os;
    os << st.n_valid << " valid of " << st.n_declared << ", imp_ratio=" << st.imp_ratio;
    detail = os.str();
    return st.n_valid == 8 && st.n_declared == 16 && st.imp_ratio == 2.0;
}

bool metric_suite(std::string& detail) {
    long long checked = 0;
    for (const auto& name : problem_names()) {
        const auto g = get_problem(name).graph;
        const DistanceParams params = DistanceParams::defaults(*g);
        CounterRng rng(fnv_seed(name) ^ 0x5eed);
        for (int rep = 0; rep < 10000; ++rep) {
            const ExtendedPoint a = correct(*g, random_raw(*g, rng));
            const ExtendedPoint b = correct(*g, random_raw(*g, rng));
            const ExtendedPoint c = correct(*g, random_raw(*g, rng));
            const double ab = hier_distance(*g, a, b, params);
            const double ba = hier_distance(*g, b, a, params);
            const double ac = hier_distance(*g, a, c, params);
            const double cb = hier_distance(*g, c, b, params);
            ++checked;
            if (!(ab >= 0.0)) { detail = name + ": negative distance"; return false; }
            if (ab != ba) { detail = name + ": asymmetric"; return false; }
            if (points_equal(a, b) != (ab == 0.0)) {
                detail = name + ": identity of indiscernibles violated";
                return false;
            }
            if (ab - (ac + cb) > 1e-12) {
                detail = name + ": triangle violated by " + std::to_string(ab - ac - cb);
                return false;
            }
        }
    }
    detail = std::to_string(checked) + " triples across all problems";
    return true;
}

bool spd_suite(std::string& detail) {
    double worst = 1e300;
    for (const auto& name : problem_names()) {
        const auto g = get_problem(name).graph;
        for (const KernelKind kind :
             {KernelKind::Hier, KernelKind::Gower, KernelKind::ContinuousRelaxation}) {
            const KernelHyperparams hp = KernelHyperparams::defaults(*g, kind);
            const Kernel kernel(*g, hp);
            CounterRng rng(fnv_seed(name) ^ static_cast<std::uint64_t>(kind));
            for (int rep = 0; rep < 100; ++rep) {
                const std::size_t n = 2 + rng.below(59);
                const auto pts = sample_valid(*g, n, rng.next_u64());
                const auto [eig, pass] = spd_check(kernel.gram(pts), 1e-8 * hp.sigma2);
                worst = std::min(worst, eig);
                if (!pass) {
                    detail = name + std::string("/") + kernel_kind_name(kind) +
                             ": min eig " + std::to_string(eig);
                    return false;
                }
            }
        }
    }
    detail = "2400 Gram matrices, worst min eig " + std::to_string(worst);
    return true;
}

bool naive_witness(std::string& detail) {
    const auto g = get_problem("motors_propellers").graph;
    try {
        const NaiveWitness w = naive_kernel_witness(*g, 2024, 10000);
        const double hier_min = witness_search_min_eig(*g, KernelKind::Hier, 2024, 10000);
        std::ostringstream os;
        os << "naive witness of size " << w.points.size() << " after " << w.trials
           << " trials (min eig " << w.min_eigenvalue << "); HIER min eig " << hier_min;
        detail = os.str();
        return w.min_eigenvalue < -1e-10 && hier_min >= -1e-10;
    } catch (const SearchExhaustedError&) {
        detail = "no witness found within the trial budget";
        return false;
    }
}

bool gp_interpolation(std::string& detail) {
    double worst = 0.0;
    for (const auto& name : problem_names()) {
        const ProblemSpec problem = get_problem(name);
        Dataset data;
        data.points = distinct_points(*problem.graph, 20, fnv_seed(name) ^ 0x61);
        for (const auto& p : data.points) data.targets.push_back(evaluate(problem, p));
        const GpModel m = fit(problem.graph, data, KernelKind::Hier);
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            const auto [mu, var] = predict(m, data.points[i]);
            (void)var;
            const double rel =
                std::abs(mu - data.targets[i]) / std::max(1.0, std::abs(data.targets[i]));
            worst = std::max(worst, rel);
            if (rel > 1e-6) {
                detail = name + ": relative error " + std::to_string(rel);
                return false;
            }
        }
    }
    detail = "worst relative training error " + std::to_string(worst);
    return true;
}

bool bo_benefit(std::string& detail) {
    const auto t0 = Clock::now();
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : {"dragon_lite", "mlp"}) {
        const ProblemSpec problem = get_problem(name);
        BoConfig cfg;
        cfg.doe = 10;
        cfg.budget = 50;
        cfg.pool = 512;
        cfg.neighbors = 64;
        std::vector<double> bo_finals, rnd_finals;
        int strictly_better = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            cfg.seed = seed;
            const BoTrace bo = run_bo(problem, cfg);
            const BoTrace rnd = run_random_baseline(problem, cfg);
            bo_finals.push_back(bo.final_incumbent);
            rnd_finals.push_back(rnd.final_incumbent);
            if (bo.final_incumbent < rnd.final_incumbent) ++strictly_better;
        }
        auto median = [](std::vector<double> xs) {
            std::sort(xs.begin(), xs.end());
            return 0.5 * (xs[4] + xs[5]);
        };
        const double mb = median(bo_finals), mr = median(rnd_finals);
        os << name << ": bo median " << mb << " vs random " << mr << ", better in "
           << strictly_better << "/10; ";
        if (!(mb <= mr) || strictly_better < 7) ok = false;
    }
    const double dt = seconds_since(t0);
    os << dt << " s";
    detail = os.str();
    return ok && dt < 900.0;
}

bool correction_throughput(std::string& detail) {
    const auto g = get_problem("mlp").graph;
    CounterRng rng(2718);
    std::vector<RawPoint> raws;
    for (int i = 0; i < 1000; ++i) raws.push_back(random_raw(*g, rng));
    const auto t0 = Clock::now();
    std::size_t active_total = 0;
    for (const auto& raw : raws) {
        const ExtendedPoint p = correct(*g, raw);
        for (bool a : p.active) active_total += a ? 1 : 0;
    }
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "1000 corrections in " << dt << " s (" << active_total << " active entries)";
    detail = os.str();
    return dt < 10.0;
}

bool alg_supremum(std::string& detail) {
    double sup = 0.0;
    for (int i = 1; i <= 1000000; ++i) {
        const double x = 1e-3 + 3.0 * static_cast<double>(i) / 1e6;
        sup = std::max(sup, alg_distance(x, -1.0 / x));
    }
    detail = "grid sup = " + std::to_string(sup);
    return std::abs(sup - 1.0) <= 1e-6;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<bool(std::string&)>>> criteria = {
        {"dragon-lite enumeration: 17 (cores, motors) pairs in < 1 s", dragon_enumeration},
        {"mlp continuous statistics: 7 / 4.0 / 1.75 / 2250 exact", mlp_continuous_statistics},
        {"oracle equivalence: complete encoder vs brute force (substitute for the "
         "conditional-set 207 check)",
         oracle_equivalence},
        {"source-to-consumer: 8 valid of 16, imp_ratio 2.0", source_to_consumer_counts},
        {"metric suite: 1e4 triples per problem, triangle slack >= -1e-12", metric_suite},
        {"spd suite: 100 Grams per kernel per problem, min eig >= -1e-8*sigma2", spd_suite},
        {"non-spd witness on motors/propellers; none for HIER", naive_witness},
        {"gp interpolation within 1e-6 relative at nugget 1e-10", gp_interpolation},
        {"bo benefit over random search (10 seeds, DoE 10, 50 iterations)", bo_benefit},
        {"correction throughput: 1000 invalid mlp points in < 10 s", correction_throughput},
        {"algebraic distance supremum 1 within 1e-6 along (x, -1/x)", alg_supremum},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s -- %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
