#include "hdsg/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdsg/errors.hpp"
#include "hdsg/optim.hpp"
#include "hdsg/rng.hpp"

namespace hdsg {

namespace {

constexpr double kNuggetStart = 1e-10;
constexpr double kNuggetMax = 1e-6;
constexpr double kLn2Pi = 1.8378770664093453;

/// Pairwise kernel features for the training set, reused across likelihood
/// evaluations so each theta candidate costs one exp per pair.
struct FeatureCache {
    std::size_t n = 0;
    std::size_t nf = 0;
    std::vector<double> f;  // upper-triangle pairs, row-major

    FeatureCache(const Kernel& k, const std::vector<ExtendedPoint>& pts)
        : n(pts.size()), nf(k.feature_count()) {
        f.resize(n * (n - 1) / 2 * nf);
        std::size_t at = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, at += nf)
                k.features(pts[i], pts[j], &f[at]);
    }

    Eigen::MatrixXd corr(const std::vector<double>& theta) const {
        Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
        std::size_t at = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, at += nf) {
                double acc = 0.0;
                for (std::size_t k = 0; k < nf; ++k) acc += theta[k] * f[at + k];
                const double v = std::exp(-acc);
                r(i, j) = v;
                r(j, i) = v;
            }
        return r;
    }
};

struct Factorized {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double nugget_rel = 0.0;
    double mean = 0.0;
    double sigma2 = 0.0;
    double lml = 0.0;
    bool ok = false;
};

/// Factorizes R with the escalating jitter ladder and profiles the constant
/// mean and process variance.
Factorized factorize(const Eigen::MatrixXd& r, const Eigen::VectorXd& y) {
    const auto n = r.rows();
    Factorized out;
    for (double lam = kNuggetStart; lam <= kNuggetMax * 1.5; lam *= 10.0) {
        Eigen::MatrixXd rj = r;
        rj.diagonal().array() += lam;
        out.llt.compute(rj);
        if (out.llt.info() != Eigen::Success) continue;
        out.nugget_rel = lam;
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        const Eigen::VectorXd ri_y = out.llt.solve(y);
        const Eigen::VectorXd ri_1 = out.llt.solve(ones);
        const double denom = ones.dot(ri_1);
        out.mean = denom > 0 ? ones.dot(ri_y) / denom : y.mean();
        const Eigen::VectorXd resid = y.array() - out.mean;
        const Eigen::VectorXd ri_r = out.llt.solve(resid);
        out.sigma2 = std::max(resid.dot(ri_r) / static_cast<double>(n), 1e-300);
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(out.llt.matrixL()(i, i));
        out.lml = -0.5 * (static_cast<double>(n) * (kLn2Pi + std::log(out.sigma2) + 1.0) + logdet);
        out.ok = true;
        return out;
    }
    return out;
}

std::vector<double> theta_from_log10(const Eigen::VectorXd& x) {
    std::vector<double> t(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) t[i] = std::pow(10.0, x[i]);
    return t;
}

KernelHyperparams hp_with_theta(const DesignSpaceGraph& g, KernelKind kind,
                                const std::vector<double>& theta) {
    KernelHyperparams hp = KernelHyperparams::defaults(g, kind);
    std::size_t at = 0;
    for (auto* v : {&hp.theta_neu, &hp.theta_meta, &hp.theta_dec})
        for (double& t : *v) t = theta[at++];
    return hp;
}

GpModel finish_model(std::shared_ptr<const DesignSpaceGraph> graph, Dataset data,
                     KernelHyperparams hp, const Eigen::MatrixXd& r, const Eigen::VectorXd& y,
                     double forced_sigma2 = -1.0) {
    Factorized fac = factorize(r, y);
    if (!fac.ok) throw SingularError("correlation matrix not factorizable at the maximum nugget");
    GpModel m;
    m.graph = std::move(graph);
    m.data = std::move(data);
    m.hp = std::move(hp);
    m.mean = fac.mean;
    m.nugget_rel = fac.nugget_rel;
    if (forced_sigma2 > 0.0) {
        // Fixed-variance model: report the likelihood at the given sigma2.
        m.hp.sigma2 = forced_sigma2;
        const auto n = y.size();
        const Eigen::VectorXd resid = y.array() - fac.mean;
        const double quad = resid.dot(fac.llt.solve(resid)) / forced_sigma2;
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(fac.llt.matrixL()(i, i));
        logdet += static_cast<double>(n) * std::log(forced_sigma2);
        m.log_marginal = -0.5 * (quad + logdet + static_cast<double>(n) * kLn2Pi);
    } else {
        m.hp.sigma2 = fac.sigma2;
        m.log_marginal = fac.lml;
    }
    m.hp.nugget = m.nugget_rel * m.hp.sigma2;
    m.chol = fac.llt.matrixL();
    const Eigen::VectorXd resid = y.array() - fac.mean;
    m.alpha = fac.llt.solve(resid);
    return m;
}

void check_dataset(const Dataset& d, const DesignSpaceGraph& g, std::size_t min_n) {
    if (d.points.size() != d.targets.size())
        throw WidthError("dataset has " + std::to_string(d.points.size()) + " points and " +
                         std::to_string(d.targets.size()) + " targets");
    if (d.points.size() < min_n)
        throw WidthError("dataset needs at least " + std::to_string(min_n) + " points");
    for (double t : d.targets)
        if (!std::isfinite(t)) throw NonFiniteError("non-finite training target");
    for (const auto& p : d.points)
        if (p.values.size() != g.size()) throw WidthError("training point width mismatch");
}

} // namespace

GpModel fit(std::shared_ptr<const DesignSpaceGraph> graph, Dataset data, KernelKind kind,
            FitConfig cfg) {
    check_dataset(data, *graph, 2);
    const double spread = *std::max_element(data.targets.begin(), data.targets.end()) -
                          *std::min_element(data.targets.begin(), data.targets.end());
    if (spread == 0.0) throw DegenerateError("all training targets are equal");

    const Kernel unit(*graph, KernelHyperparams::defaults(*graph, kind));
    const FeatureCache cache(unit, data.points);
    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(data.targets.data(), static_cast<long>(data.targets.size()));

    const int dim = static_cast<int>(unit.feature_count());
    auto objective = [&](const Eigen::VectorXd& x) {
        const Factorized fac = factorize(cache.corr(theta_from_log10(x)), y);
        return fac.ok ? -fac.lml : 1e12;
    };

    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, cfg.log10_lo);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, cfg.log10_hi);
    CounterRng rng(cfg.seed);

    Eigen::VectorXd best_x;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> start_lml;
    for (int s = 0; s < cfg.multistarts; ++s) {
        Eigen::VectorXd x0(dim);
        if (s == 0)
            x0.setZero();  // theta = 1
        else
            for (int i = 0; i < dim; ++i) x0[i] = rng.uniform(cfg.log10_lo, cfg.log10_hi);
        start_lml.push_back(-objective(x0));
        const NelderMeadResult res = nelder_mead(objective, x0, 0.5, lo, hi, cfg.eval_budget);
        if (res.fx < best_f) {
            best_f = res.fx;
            best_x = res.x;
        }
    }
    if (!std::isfinite(best_f) || best_f >= 1e12)
        throw SingularError("no factorizable hyperparameters found");

    const auto theta = theta_from_log10(best_x);
    GpModel m = finish_model(graph, std::move(data), hp_with_theta(*graph, kind, theta),
                             cache.corr(theta), y);
    m.start_log_marginals = std::move(start_lml);
    return m;
}

GpModel refit(const GpModel& prev, Dataset data, int eval_budget) {
    check_dataset(data, *prev.graph, 2);
    const Kernel unit(*prev.graph, KernelHyperparams::defaults(*prev.graph, prev.hp.kind));
    const FeatureCache cache(unit, data.points);
    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(data.targets.data(), static_cast<long>(data.targets.size()));

    const int dim = static_cast<int>(unit.feature_count());
    auto objective = [&](const Eigen::VectorXd& x) {
        const Factorized fac = factorize(cache.corr(theta_from_log10(x)), y);
        return fac.ok ? -fac.lml : 1e12;
    };
    Eigen::VectorXd x0(dim);
    {
        std::vector<double> prev_theta;
        for (const auto* v : {&prev.hp.theta_neu, &prev.hp.theta_meta, &prev.hp.theta_dec})
            for (double t : *v) prev_theta.push_back(t);
        for (int i = 0; i < dim; ++i) x0[i] = std::log10(prev_theta[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -2.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, 2.0);
    const NelderMeadResult res = nelder_mead(objective, x0, 0.25, lo, hi, eval_budget);
    if (res.fx >= 1e12) throw SingularError("refit found no factorizable hyperparameters");
    const auto theta = theta_from_log10(res.x);
    return finish_model(prev.graph, std::move(data),
                        hp_with_theta(*prev.graph, prev.hp.kind, theta), cache.corr(theta), y);
}

GpModel make_model(std::shared_ptr<const DesignSpaceGraph> graph, Dataset data,
                   KernelHyperparams hp) {
    check_dataset(data, *graph, 1);
    hp.validate(*graph);
    KernelHyperparams corr_hp = hp;
    corr_hp.sigma2 = 1.0;
    corr_hp.nugget = 0.0;
    const Kernel kernel(*graph, corr_hp);
    const FeatureCache cache(kernel, data.points);
    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(data.targets.data(), static_cast<long>(data.targets.size()));
    return finish_model(graph, std::move(data), hp, cache.corr(kernel.theta()), y, hp.sigma2);
}

std::pair<double, double> predict(const GpModel& m, const ExtendedPoint& x) {
    if (x.values.size() != m.graph->size()) throw WidthError("prediction point width mismatch");
    KernelHyperparams corr_hp = m.hp;
    corr_hp.sigma2 = 1.0;
    corr_hp.nugget = 0.0;
    const Kernel kernel(*m.graph, corr_hp);
    const std::size_t n = m.data.points.size();
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) r[static_cast<long>(i)] = kernel(x, m.data.points[i]);
    const double mean = m.mean + r.dot(m.alpha);
    const Eigen::VectorXd v = m.chol.triangularView<Eigen::Lower>().solve(r);
    const double var = std::max(0.0, m.hp.sigma2 * (1.0 - v.squaredNorm()));
    return {mean, var};
}

std::vector<std::pair<double, double>> predict_batch(const GpModel& m,
                                                     const std::vector<ExtendedPoint>& xs) {
    std::vector<std::pair<double, double>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(predict(m, x));
    return out;
}

LooDiagnostics loo_diagnostics(const GpModel& m) {
    const std::size_t n = m.data.points.size();
    if (n < 3) throw WidthError("leave-one-out needs at least 3 points");
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd rinv = m.chol.triangularView<Eigen::Lower>().solve(identity);
    rinv = m.chol.triangularView<Eigen::Lower>().transpose().solve(rinv);

    LooDiagnostics d;
    d.residuals.resize(n);
    d.standardized.resize(n);
    double sq = 0.0;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double qii = rinv(i, i);
        if (qii <= 0.0) throw SingularError("leave-one-out needs a positive-definite factorization");
        const double e = m.alpha[static_cast<long>(i)] / qii;
        const double sd = std::sqrt(std::max(m.hp.sigma2 / qii, 0.0));
        d.residuals[i] = e;
        d.standardized[i] = sd > 0 ? e / sd : 0.0;
        sq += e * e;
        if (std::abs(e) <= 2.0 * sd) ++covered;
    }
    d.rmse = std::sqrt(sq / static_cast<double>(n));
    d.coverage_2sd = static_cast<double>(covered) / static_cast<double>(n);
    return d;
}

} // namespace hdsg
