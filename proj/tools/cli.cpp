#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "hdsg/bo.hpp"
#include "hdsg/distance.hpp"
#include "hdsg/errors.hpp"
#include "hdsg/io.hpp"
#include "hdsg/kernel.hpp"
#include "hdsg/problems.hpp"

namespace hdsg::cli {

namespace {

/// Command-line misuse, distinct from validation failures (exit 1 vs 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpaceArgs {
    std::string space_file;
    std::string problem;
};

void add_space_options(CLI::App* cmd, SpaceArgs& args) {
    auto* f = cmd->add_option("--space", args.space_file, "design-space JSON file");
    auto* p = cmd->add_option("--problem", args.problem, "built-in problem name");
    f->excludes(p);
}

std::shared_ptr<const DesignSpaceGraph> load_space(const SpaceArgs& args) {
    if (!args.problem.empty()) return get_problem(args.problem).graph;
    if (!args.space_file.empty())
        return std::make_shared<DesignSpaceGraph>(parse_design_space(args.space_file));
    throw UsageError("one of --space or --problem is required");
}

std::string csv_config_row(const DiscreteConfig& c, const std::vector<std::size_t>& cols) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t v : cols) {
        if (!first) os << ',';
        first = false;
        os << (c.values[v] ? value_to_string(*c.values[v]) : "EXC");
    }
    return os.str();
}

double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double at = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(at));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(at));
    return xs[lo] + (xs[hi] - xs[lo]) * (at - static_cast<double>(lo));
}

int cmd_problems_list() {
    std::cout << "name              n_vars  n_valid  mirrors\n";
    for (const auto& name : problem_names()) {
        const ProblemSpec p = get_problem(name);
        std::printf("%-17s %6zu %8lld  %s\n", p.name.c_str(), p.graph->size(),
                    p.known_valid_count, p.mirrors.c_str());
    }
    return 0;
}

int cmd_validate(const SpaceArgs& space_args, const std::string& points_file) {
    const auto g = load_space(space_args);
    std::cout << "design space: " << g->size() << " variables, " << g->rules().size()
              << " decree rules -- ok\n";
    if (points_file.empty()) return 0;
    int bad = 0;
    const auto pts = read_point_file(*g, points_file);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const ValidityReport rep = is_valid(*g, pts[i]);
        if (rep.ok) {
            std::cout << "point " << i << ": valid\n";
        } else {
            ++bad;
            std::cout << "point " << i << ": INVALID\n";
            for (const auto& v : rep.violations) std::cout << "  - " << v << "\n";
        }
    }
    return bad ? 2 : 0;
}

int cmd_stats(const SpaceArgs& space_args, long long cap, const std::string& out) {
    const auto g = load_space(space_args);
    const ImputationStats st = stats(*g, cap);
    std::printf("n_valid          %lld\n", st.n_valid);
    std::printf("n_declared       %lld\n", st.n_declared);
    std::printf("imp_ratio        %.6f\n", st.imp_ratio);
    std::printf("n_discrete       %lld\n", st.n_discrete);
    std::printf("n_dim_cont       %lld\n", st.n_dim_cont);
    std::printf("n_dim_cont_mean  %.6f\n", st.n_dim_cont_mean);
    std::printf("cont_imp_ratio   %.6f\n", st.cont_imp_ratio);
    if (!out.empty()) {
        std::ostringstream os;
        os << "n_valid,n_declared,imp_ratio,n_discrete,n_dim_cont,n_dim_cont_mean,cont_imp_ratio\n"
           << st.n_valid << ',' << st.n_declared << ',' << st.imp_ratio << ',' << st.n_discrete
           << ',' << st.n_dim_cont << ',' << st.n_dim_cont_mean << ',' << st.cont_imp_ratio << '\n';
        write_text_file(out, os.str());
    }
    return 0;
}

int cmd_enumerate(const SpaceArgs& space_args, long long cap, const std::string& project,
                  const std::string& out) {
    const auto g = load_space(space_args);
    const auto configs = enumerate_discrete(*g, cap);

    std::vector<std::size_t> cols;
    if (project.empty()) {
        cols = g->discrete_indices();
    } else {
        std::istringstream is(project);
        std::string name;
        while (std::getline(is, name, ',')) cols.push_back(g->index_of(name));
    }
    std::ostringstream header;
    for (std::size_t k = 0; k < cols.size(); ++k)
        header << (k ? "," : "") << g->variable(cols[k]).name;

    std::vector<std::string> rows;
    for (const auto& c : configs) rows.push_back(csv_config_row(c, cols));
    if (!project.empty()) {
        // Projection collapses configurations that agree on the chosen columns.
        std::vector<std::string> unique;
        for (const auto& r : rows)
            if (std::find(unique.begin(), unique.end(), r) == unique.end()) unique.push_back(r);
        rows = std::move(unique);
    }

    std::cout << header.str() << "\n";
    for (const auto& r : rows) std::cout << r << "\n";
    std::cout << "# " << rows.size() << " configurations\n";
    if (!out.empty()) {
        std::ostringstream os;
        os << header.str() << "\n";
        for (const auto& r : rows) os << r << "\n";
        write_text_file(out, os.str());
    }
    return 0;
}

int cmd_sample(const SpaceArgs& space_args, std::size_t n, std::uint64_t seed, long long cap,
               const std::string& out) {
    const auto g = load_space(space_args);
    std::cout << "seed: " << seed << "\n";
    const auto pts = sample_valid(*g, n, seed, cap);
    for (const auto& p : pts) std::cout << format_point(*g, p) << "\n";
    if (!out.empty()) write_point_file(*g, pts, out);
    return 0;
}

int cmd_correct(const SpaceArgs& space_args, const std::string& points_file,
                const std::string& out) {
    const auto g = load_space(space_args);
    const auto raws = read_raw_point_file(*g, points_file);
    std::vector<ExtendedPoint> corrected;
    for (const auto& raw : raws) corrected.push_back(correct(*g, raw));
    for (const auto& p : corrected) {
        std::cout << format_point(*g, p) << "\n";
        std::cout << "# active:";
        for (std::size_t i = 0; i < g->size(); ++i)
            if (p.active[i]) std::cout << ' ' << g->variable(i).name;
        std::cout << "\n";
    }
    if (!out.empty()) write_point_file(*g, corrected, out);
    return 0;
}

int cmd_distance(const SpaceArgs& space_args, const std::string& points_file, double p_exp) {
    const auto g = load_space(space_args);
    const auto pts = read_point_file(*g, points_file);
    if (pts.size() < 2) throw ParseError("distance needs two points in the point file");
    DistanceParams params = DistanceParams::defaults(*g);
    params.p = p_exp;
    std::cout << "variable contributions (theta=1, delta=sup/2):\n";
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->is_intermediate(i)) continue;
        std::printf("  %-20s %.9f\n", g->variable(i).name.c_str(),
                    per_var_distance(*g, i, pts[0].values[i], pts[1].values[i], params));
    }
    std::printf("dist_p (p=%g)         %.9f\n", p_exp,
                hier_distance(*g, pts[0], pts[1], params));
    return 0;
}

int cmd_gram(const SpaceArgs& space_args, const std::string& points_file, const std::string& kind,
             double sigma2, const std::string& out) {
    const auto g = load_space(space_args);
    const auto pts = read_point_file(*g, points_file);
    KernelHyperparams hp = KernelHyperparams::defaults(*g, kernel_kind_from_name(kind));
    hp.sigma2 = sigma2;
    const Eigen::MatrixXd k = gram(*g, pts, hp);
    const auto [min_eig, pass] = spd_check(k, 1e-8 * sigma2);
    std::printf("n=%zu kernel=%s min_eig=%.3e spd=%s\n", pts.size(), kind.c_str(), min_eig,
                pass ? "yes" : "no");
    if (!out.empty()) {
        std::ostringstream os;
        for (Eigen::Index i = 0; i < k.rows(); ++i) {
            for (Eigen::Index j = 0; j < k.cols(); ++j) os << (j ? "," : "") << k(i, j);
            os << '\n';
        }
        write_text_file(out, os.str());
    }
    return 0;
}

int cmd_spdcheck(const SpaceArgs& space_args, const std::string& points_file, std::size_t n,
                 std::uint64_t seed, const std::string& kind, double tol_rel) {
    const auto g = load_space(space_args);
    std::vector<ExtendedPoint> pts;
    if (!points_file.empty()) {
        pts = read_point_file(*g, points_file);
    } else {
        std::cout << "seed: " << seed << "\n";
        pts = sample_valid(*g, n, seed);
    }
    const KernelHyperparams hp = KernelHyperparams::defaults(*g, kernel_kind_from_name(kind));
    const auto [min_eig, pass] = spd_check(gram(*g, pts, hp), tol_rel * hp.sigma2);
    std::printf("n=%zu kernel=%s min_eig=%.3e tol=%.1e: %s\n", pts.size(), kind.c_str(), min_eig,
                tol_rel * hp.sigma2, pass ? "PASS" : "FAIL");
    return pass ? 0 : 2;
}

int cmd_export_dot(const SpaceArgs& space_args, const std::string& out) {
    const auto g = load_space(space_args);
    const std::string dot = to_dot(*g);
    if (out.empty())
        std::cout << dot;
    else
        write_text_file(out, dot);
    return 0;
}

int cmd_model_fit(const std::string& problem_name, std::size_t n, std::uint64_t seed,
                  const std::string& kind, int multistarts, int budget, const std::string& out) {
    const ProblemSpec problem = get_problem(problem_name);
    std::cout << "seed: " << seed << "\n";
    Dataset data;
    data.points = sample_valid(*problem.graph, n, seed);
    for (const auto& p : data.points) data.targets.push_back(evaluate(problem, p));
    data.provenance = problem.name + " seed=" + std::to_string(seed);
    FitConfig cfg;
    cfg.multistarts = multistarts;
    cfg.eval_budget = budget;
    cfg.seed = seed;
    const GpModel m = fit(problem.graph, std::move(data), kernel_kind_from_name(kind), cfg);
    std::printf("fitted %s on %zu points: log_marginal=%.6f sigma2=%.6g mean=%.6g\n",
                kind.c_str(), n, m.log_marginal, m.hp.sigma2, m.mean);
    if (!out.empty()) {
        save_model(m, out);
        std::cout << "model written to " << out << "\n";
    }
    return 0;
}

int cmd_model_predict(const std::string& model_file, const std::string& points_file,
                      const std::string& out) {
    const GpModel m = load_model(model_file);
    const auto pts = read_point_file(*m.graph, points_file);
    std::ostringstream os;
    os << "mean,variance\n";
    for (const auto& p : pts) {
        const auto [mu, var] = predict(m, p);
        std::printf("mean=%.9g variance=%.9g\n", mu, var);
        os << mu << ',' << var << '\n';
    }
    if (!out.empty()) write_text_file(out, os.str());
    return 0;
}

int cmd_bo_run(const std::string& problem_name, const std::string& kind, const std::string& acq,
               int seeds, std::uint64_t seed0, int budget, int doe, int pool,
               const std::string& out, bool with_baseline) {
    const ProblemSpec problem = get_problem(problem_name);
    BoConfig cfg;
    cfg.kernel = kernel_kind_from_name(kind);
    cfg.acq = acquisition_from_name(acq);
    cfg.budget = budget;
    cfg.doe = doe;
    cfg.pool = pool;

    std::ostringstream trace_csv;
    trace_csv << "method,seed,iteration,value,incumbent,point\n";
    std::vector<double> bo_finals, rnd_finals;
    std::vector<std::vector<double>> bo_curves;

    for (int s = 0; s < seeds; ++s) {
        cfg.seed = seed0 + static_cast<std::uint64_t>(s);
        std::cout << "seed: " << cfg.seed << "\n";
        const BoTrace t = run_bo(problem, cfg);
        bo_finals.push_back(t.final_incumbent);
        std::vector<double> curve;
        for (std::size_t i = 0; i < t.iterations.size(); ++i) {
            const auto& it = t.iterations[i];
            curve.push_back(it.incumbent);
            trace_csv << "bo," << cfg.seed << ',' << i << ',' << it.value << ',' << it.incumbent
                      << ',' << '"' << format_point(*problem.graph, it.point) << '"' << '\n';
        }
        bo_curves.push_back(std::move(curve));
        if (with_baseline) {
            const BoTrace r = run_random_baseline(problem, cfg);
            rnd_finals.push_back(r.final_incumbent);
            for (std::size_t i = 0; i < r.iterations.size(); ++i)
                trace_csv << "random," << cfg.seed << ',' << i << ',' << r.iterations[i].value
                          << ',' << r.iterations[i].incumbent << ",\n";
        }
    }

    auto report = [](const char* name, std::vector<double> xs) {
        std::printf("%-8s median=%.6f q1=%.6f q3=%.6f\n", name, quantile(xs, 0.5),
                    quantile(xs, 0.25), quantile(xs, 0.75));
    };
    std::cout << "final incumbents over " << seeds << " seeds:\n";
    report("bo", bo_finals);
    if (with_baseline) report("random", rnd_finals);

    // Fig. 10-style convergence summary: per-iteration incumbent quartiles.
    std::cout << "iteration,median,q1,q3\n";
    std::ostringstream summary;
    summary << "iteration,median,q1,q3\n";
    for (int i = 0; i < budget; ++i) {
        std::vector<double> at;
        for (const auto& c : bo_curves) at.push_back(c[static_cast<std::size_t>(i)]);
        std::ostringstream row;
        row << i << ',' << quantile(at, 0.5) << ',' << quantile(at, 0.25) << ','
            << quantile(at, 0.75) << '\n';
        std::cout << row.str();
        summary << row.str();
    }
    if (!out.empty()) write_text_file(out, trace_csv.str() + summary.str());
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"graph-structured design spaces: validation, distances, kernels, GP surrogates "
                 "and Bayesian optimization"};
    app.require_subcommand(1);

    SpaceArgs space_args;
    std::string points_file, out, project, kind = "HIER", acq = "WB2S", model_file, problem_name;
    std::size_t n = 100;
    std::uint64_t seed = 0;
    long long cap = kDefaultEnumerationCap;
    double p_exp = 2.0, sigma2 = 1.0, tol_rel = 1e-8;
    int seeds = 10, budget = 50, doe = 10, pool = 512, multistarts = 5, fit_budget = 200;
    bool with_baseline = false;

    auto* c_list = app.add_subcommand("problems-list", "list built-in problems");

    auto* c_validate = app.add_subcommand("validate", "validate a design space and optional points");
    add_space_options(c_validate, space_args);
    c_validate->add_option("--points", points_file, "point file to check");

    auto* c_stats = app.add_subcommand("stats", "imputation statistics");
    add_space_options(c_stats, space_args);
    c_stats->add_option("--cap", cap, "enumeration cap");
    c_stats->add_option("--out", out, "CSV output path");

    auto* c_enum = app.add_subcommand("enumerate", "complete encoder: all valid configurations");
    add_space_options(c_enum, space_args);
    c_enum->add_option("--cap", cap, "enumeration cap");
    c_enum->add_option("--project", project, "comma-separated variables to project onto");
    c_enum->add_option("--out", out, "CSV output path");

    auto* c_sample = app.add_subcommand("sample", "sample valid points");
    add_space_options(c_sample, space_args);
    c_sample->add_option("--n", n, "number of points");
    c_sample->add_option("--seed", seed, "random seed");
    c_sample->add_option("--cap", cap, "enumeration cap");
    c_sample->add_option("--out", out, "point file output path");

    auto* c_correct = app.add_subcommand("correct", "correct raw points and report activeness");
    add_space_options(c_correct, space_args);
    c_correct->add_option("--points", points_file, "raw point file")->required();
    c_correct->add_option("--out", out, "corrected point file output path");

    auto* c_dist = app.add_subcommand("distance", "hierarchical distance between two points");
    add_space_options(c_dist, space_args);
    c_dist->add_option("--points", points_file, "point file with two points")->required();
    c_dist->add_option("--p", p_exp, "aggregation exponent");

    auto* c_gram = app.add_subcommand("gram", "kernel Gram matrix over a point file");
    add_space_options(c_gram, space_args);
    c_gram->add_option("--points", points_file, "point file")->required();
    c_gram->add_option("--kernel", kind, "HIER | GD | CR");
    c_gram->add_option("--sigma2", sigma2, "process variance");
    c_gram->add_option("--out", out, "CSV output path");

    auto* c_spd = app.add_subcommand("spdcheck", "minimum Gram eigenvalue check");
    add_space_options(c_spd, space_args);
    c_spd->add_option("--points", points_file, "point file (default: sampled)");
    c_spd->add_option("--n", n, "sampled points when no file given");
    c_spd->add_option("--seed", seed, "sampling seed");
    c_spd->add_option("--kernel", kind, "HIER | GD | CR");
    c_spd->add_option("--tol", tol_rel, "tolerance relative to sigma2");

    auto* c_dot = app.add_subcommand("export-dot", "DOT rendering of the design space graph");
    add_space_options(c_dot, space_args);
    c_dot->add_option("--out", out, "DOT output path");

    auto* c_fit = app.add_subcommand("model-fit", "fit a GP surrogate on a sampled DoE");
    c_fit->add_option("--problem", problem_name, "built-in problem")->required();
    c_fit->add_option("--n", n, "DoE size");
    c_fit->add_option("--seed", seed, "seed");
    c_fit->add_option("--kernel", kind, "HIER | GD | CR");
    c_fit->add_option("--multistarts", multistarts, "hyperparameter search starts");
    c_fit->add_option("--budget", fit_budget, "evaluations per start");
    c_fit->add_option("--out", out, "model JSON output path");

    auto* c_pred = app.add_subcommand("model-predict", "predict with a saved model");
    c_pred->add_option("--model", model_file, "model JSON")->required();
    c_pred->add_option("--points", points_file, "point file")->required();
    c_pred->add_option("--out", out, "CSV output path");

    auto* c_bo = app.add_subcommand("bo-run", "Bayesian optimization benchmark runs");
    c_bo->add_option("--problem", problem_name, "built-in problem")->required();
    c_bo->add_option("--kernel", kind, "HIER | GD | CR");
    c_bo->add_option("--acq", acq, "EI | WB2S");
    c_bo->add_option("--seeds", seeds, "number of seeds");
    c_bo->add_option("--seed", seed, "first seed");
    c_bo->add_option("--budget", budget, "iterations after the DoE");
    c_bo->add_option("--doe", doe, "DoE size");
    c_bo->add_option("--pool", pool, "candidate pool size");
    c_bo->add_flag("--baseline", with_baseline, "also run the random-search baseline");
    c_bo->add_option("--out", out, "trace + summary CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_list->parsed()) return cmd_problems_list();
        if (c_validate->parsed()) return cmd_validate(space_args, points_file);
        if (c_stats->parsed()) return cmd_stats(space_args, cap, out);
        if (c_enum->parsed()) return cmd_enumerate(space_args, cap, project, out);
        if (c_sample->parsed()) return cmd_sample(space_args, n, seed, cap, out);
        if (c_correct->parsed()) return cmd_correct(space_args, points_file, out);
        if (c_dist->parsed()) return cmd_distance(space_args, points_file, p_exp);
        if (c_gram->parsed()) return cmd_gram(space_args, points_file, kind, sigma2, out);
        if (c_spd->parsed()) return cmd_spdcheck(space_args, points_file, n, seed, kind, tol_rel);
        if (c_dot->parsed()) return cmd_export_dot(space_args, out);
        if (c_fit->parsed())
            return cmd_model_fit(problem_name, n, seed, kind, multistarts, fit_budget, out);
        if (c_pred->parsed()) return cmd_model_predict(model_file, points_file, out);
        if (c_bo->parsed())
            return cmd_bo_run(problem_name, kind, acq, seeds, seed, budget, doe, pool, out,
                              with_baseline);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace hdsg::cli
