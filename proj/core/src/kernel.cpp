#include "hdsg/kernel.hpp"

#include <cmath>
#include <limits>

#include "hdsg/distance.hpp"
#include "hdsg/errors.hpp"
#include "hdsg/rng.hpp"

namespace hdsg {

namespace {

constexpr double kDelta = 0.5;  // metric-compliant exclusion constant

bool in_meta_group(Role r) { return r.is_meta(); }
bool in_decreed_group(Role r) { return r.base == BaseRole::Decreed; }

/// Per-variable distance with the delta rule; algebraic for continuous and
/// integer values, rank for ordinal, indicator for categorical.
double per_var(const Domain& dom, const Entry& a, const Entry& b) {
    if (!a && !b) return 0.0;
    if (!a || !b) return kDelta;
    switch (dom.type) {
        case VarType::Continuous:
        case VarType::Integer:
            return alg_distance(dom.normalize(*a), dom.normalize(*b));
        case VarType::Ordinal: {
            const double n = static_cast<double>(dom.level_count());
            return n > 1 ? std::abs(dom.numeric(*a) - dom.numeric(*b)) / (n - 1.0) : 0.0;
        }
        case VarType::Categorical:
            return value_equal(*a, *b) ? 0.0 : 1.0;
    }
    return 0.0;
}

/// Ordered distance for meta coordinates: rank-normalized for finite
/// quantitative domains, indicator for categorical, algebraic as the
/// continuous fallback.
double meta_rank(const Domain& dom, const Entry& a, const Entry& b) {
    if (!a && !b) return 0.0;
    if (!a || !b) return kDelta;
    switch (dom.type) {
        case VarType::Integer:
        case VarType::Ordinal: {
            const double n = static_cast<double>(dom.level_count());
            return n > 1 ? std::abs(static_cast<double>(dom.level_index(*a)) -
                                    static_cast<double>(dom.level_index(*b))) /
                               (n - 1.0)
                         : 0.0;
        }
        case VarType::Categorical:
            return value_equal(*a, *b) ? 0.0 : 1.0;
        case VarType::Continuous:
            return alg_distance(dom.normalize(*a), dom.normalize(*b));
    }
    return 0.0;
}

/// Quantitative Gower term: normalized absolute difference (rank for
/// ordinals).
double gower_qnt(const Domain& dom, const Entry& a, const Entry& b) {
    if (!a && !b) return 0.0;
    if (!a || !b) return kDelta;
    return std::abs(dom.normalize(*a) - dom.normalize(*b));
}

} // namespace

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Hier:                 return "HIER";
        case KernelKind::Gower:                return "GD";
        case KernelKind::ContinuousRelaxation: return "CR";
        case KernelKind::NaiveTest:            return "NAIVE-TEST";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& s) {
    if (s == "HIER" || s == "hier") return KernelKind::Hier;
    if (s == "GD" || s == "gd" || s == "gower") return KernelKind::Gower;
    if (s == "CR" || s == "cr") return KernelKind::ContinuousRelaxation;
    if (s == "NAIVE-TEST" || s == "naive") return KernelKind::NaiveTest;
    throw HyperparamError("unknown kernel kind '" + s + "'");
}

std::array<std::size_t, 3> kernel_theta_sizes(const DesignSpaceGraph& g, KernelKind kind) {
    std::size_t n_neu = 0, n_meta = 0, n_dec = 0, n_cat_levels = 0, n_qnt = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_intermediate(i)) continue;
        const Role r = g.role(i);
        if (r.base == BaseRole::Neutral) ++n_neu;
        if (in_meta_group(r)) ++n_meta;
        if (in_decreed_group(r)) ++n_dec;
        if (g.variable(i).domain.type == VarType::Categorical)
            n_cat_levels += g.variable(i).domain.level_count();
        else
            ++n_qnt;
    }
    switch (kind) {
        case KernelKind::Hier:
            return {n_neu, n_meta, n_meta + n_dec};
        case KernelKind::Gower:
            return {2, 0, 0};
        case KernelKind::ContinuousRelaxation:
            return {n_cat_levels + n_qnt, 0, 0};
        case KernelKind::NaiveTest:
            return {n_neu, 0, n_dec};
    }
    return {0, 0, 0};
}

KernelHyperparams KernelHyperparams::defaults(const DesignSpaceGraph& g, KernelKind kind) {
    const auto sizes = kernel_theta_sizes(g, kind);
    KernelHyperparams hp;
    hp.kind = kind;
    hp.theta_neu.assign(sizes[0], 1.0);
    hp.theta_meta.assign(sizes[1], 1.0);
    hp.theta_dec.assign(sizes[2], 1.0);
    hp.sigma2 = 1.0;
    hp.nugget = 0.0;
    return hp;
}

void KernelHyperparams::validate(const DesignSpaceGraph& g) const {
    const auto sizes = kernel_theta_sizes(g, kind);
    if (theta_neu.size() != sizes[0] || theta_meta.size() != sizes[1] ||
        theta_dec.size() != sizes[2])
        throw HyperparamError(std::string("scale vectors sized {") +
                              std::to_string(theta_neu.size()) + "," + std::to_string(theta_meta.size()) +
                              "," + std::to_string(theta_dec.size()) + "}, expected {" +
                              std::to_string(sizes[0]) + "," + std::to_string(sizes[1]) + "," +
                              std::to_string(sizes[2]) + "} for " + kernel_kind_name(kind));
    for (const auto* v : {&theta_neu, &theta_meta, &theta_dec})
        for (double t : *v)
            if (!(t > 0.0)) throw HyperparamError("kernel scales must be positive");
    if (!(sigma2 > 0.0)) throw HyperparamError("sigma2 must be positive");
    if (nugget < 0.0) throw HyperparamError("nugget must be non-negative");
}

Kernel::Kernel(const DesignSpaceGraph& g, KernelHyperparams hp) : g_(g), hp_(std::move(hp)) {
    hp_.validate(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.is_intermediate(i) && in_meta_group(g.role(i))) meta_vars_.push_back(i);

    auto add = [&](Coord::What what, std::size_t var, std::size_t level = 0) {
        coords_.push_back({what, var, level});
    };
    switch (hp_.kind) {
        case KernelKind::Hier:
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!g.is_intermediate(i) && g.role(i).base == BaseRole::Neutral)
                    add(Coord::What::PerVar, i);
            for (std::size_t i : meta_vars_) add(Coord::What::MetaRank, i);
            for (std::size_t i : meta_vars_) add(Coord::What::PerVar, i);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!g.is_intermediate(i) && in_decreed_group(g.role(i)))
                    add(Coord::What::PerVar, i);
            break;
        case KernelKind::Gower:
            add(Coord::What::GowerCat, 0);
            add(Coord::What::GowerQnt, 0);
            break;
        case KernelKind::ContinuousRelaxation:
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (g.is_intermediate(i)) continue;
                if (g.variable(i).domain.type != VarType::Categorical) continue;
                for (std::size_t l = 0; l < g.variable(i).domain.level_count(); ++l)
                    add(Coord::What::OneHot, i, l);
            }
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!g.is_intermediate(i) && g.variable(i).domain.type != VarType::Categorical)
                    add(Coord::What::PerVar, i);
            break;
        case KernelKind::NaiveTest:
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!g.is_intermediate(i) && g.role(i).base == BaseRole::Neutral)
                    add(Coord::What::PerVar, i);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!g.is_intermediate(i) && in_decreed_group(g.role(i)))
                    add(Coord::What::NaiveDec, i);
            break;
    }
    theta_.reserve(coords_.size());
    for (double t : hp_.theta_neu) theta_.push_back(t);
    for (double t : hp_.theta_meta) theta_.push_back(t);
    for (double t : hp_.theta_dec) theta_.push_back(t);
    if (theta_.size() != coords_.size())
        throw HyperparamError("kernel layout does not match the scale vectors");
}

bool Kernel::same_meta_config(const ExtendedPoint& a, const ExtendedPoint& b) const {
    for (std::size_t i : meta_vars_) {
        if (a.values[i].has_value() != b.values[i].has_value()) return false;
        if (a.values[i] && !value_equal(*a.values[i], *b.values[i])) return false;
    }
    return true;
}

double Kernel::coord_distance(const Coord& c, const ExtendedPoint& a, const ExtendedPoint& b,
                              bool same_subspace) const {
    switch (c.what) {
        case Coord::What::PerVar:
            return per_var(g_.variable(c.var).domain, a.values[c.var], b.values[c.var]);
        case Coord::What::MetaRank:
            return meta_rank(g_.variable(c.var).domain, a.values[c.var], b.values[c.var]);
        case Coord::What::NaiveDec:
            if (!same_subspace) return 0.0;  // degenerate full correlation across subspaces
            return per_var(g_.variable(c.var).domain, a.values[c.var], b.values[c.var]);
        case Coord::What::OneHot: {
            const Entry& x = a.values[c.var];
            const Entry& y = b.values[c.var];
            if (!x && !y) return 0.0;
            if (!x || !y) return kDelta;
            const Domain& dom = g_.variable(c.var).domain;
            const double ux = dom.level_index(*x) == c.level ? 1.0 : 0.0;
            const double uy = dom.level_index(*y) == c.level ? 1.0 : 0.0;
            return std::abs(ux - uy);
        }
        case Coord::What::GowerCat:
        case Coord::What::GowerQnt: {
            const bool want_cat = c.what == Coord::What::GowerCat;
            double sum = 0.0;
            std::size_t n_all = 0;
            for (std::size_t i = 0; i < g_.size(); ++i) {
                if (g_.is_intermediate(i)) continue;
                ++n_all;
                const bool is_cat = g_.variable(i).domain.type == VarType::Categorical;
                if (is_cat != want_cat) continue;
                const Domain& dom = g_.variable(i).domain;
                sum += is_cat ? per_var(dom, a.values[i], b.values[i])
                              : gower_qnt(dom, a.values[i], b.values[i]);
            }
            return n_all > 0 ? sum / static_cast<double>(n_all) : 0.0;
        }
    }
    return 0.0;
}

void Kernel::features(const ExtendedPoint& a, const ExtendedPoint& b, double* out) const {
    const bool same = hp_.kind == KernelKind::NaiveTest && same_meta_config(a, b);
    for (std::size_t k = 0; k < coords_.size(); ++k)
        out[k] = coord_distance(coords_[k], a, b, same);
}

double Kernel::value_from_features(const double* f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < coords_.size(); ++k) acc += theta_[k] * f[k];
    return hp_.sigma2 * std::exp(-acc);
}

double Kernel::operator()(const ExtendedPoint& a, const ExtendedPoint& b) const {
    if (a.values.size() != g_.size() || b.values.size() != g_.size())
        throw WidthError("point width does not match the design space");
    std::vector<double> f(coords_.size());
    features(a, b, f.data());
    return value_from_features(f.data());
}

Eigen::MatrixXd Kernel::gram(const std::vector<ExtendedPoint>& points) const {
    const std::size_t n = points.size();
    if (n == 0) throw WidthError("gram needs at least one point");
    Eigen::MatrixXd k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = hp_.sigma2 + hp_.nugget;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (*this)(points[i], points[j]);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

double k_hier(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
              const KernelHyperparams& hp) {
    if (hp.kind != KernelKind::Hier) throw HyperparamError("k_hier expects HIER hyperparameters");
    return Kernel(g, hp)(x, x2);
}

double k_gower(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
               const KernelHyperparams& hp) {
    if (hp.kind != KernelKind::Gower) throw HyperparamError("k_gower expects GD hyperparameters");
    return Kernel(g, hp)(x, x2);
}

double k_cr(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
            const KernelHyperparams& hp) {
    if (hp.kind != KernelKind::ContinuousRelaxation)
        throw HyperparamError("k_cr expects CR hyperparameters");
    return Kernel(g, hp)(x, x2);
}

Eigen::MatrixXd gram(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& points,
                     const KernelHyperparams& hp) {
    return Kernel(g, hp).gram(points);
}

std::pair<double, bool> spd_check(const Eigen::MatrixXd& k, double tol) {
    if (k.rows() != k.cols()) throw NonSymmetricError("spd_check needs a square matrix");
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetricError("spd_check needs a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    return {min_eig, min_eig >= -tol};
}

namespace {

/// Point sets for the witness search: random configurations drawn with
/// replacement, each realized with its own stream so repeated subspaces get
/// distinct decreed values.
std::vector<ExtendedPoint> witness_set(const DesignSpaceGraph& g,
                                       const std::vector<DiscreteConfig>& configs,
                                       std::uint64_t seed, std::size_t trial) {
    CounterRng rng(seed, trial + 1);
    const std::size_t size = 3 + rng.below(4);  // 3..6
    std::vector<ExtendedPoint> pts;
    pts.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        const std::size_t c = rng.below(configs.size());
        pts.push_back(realize_config(g, configs[c], rng.split(1000 + i)));
    }
    return pts;
}

} // namespace

double witness_search_min_eig(const DesignSpaceGraph& g, KernelKind kind, std::uint64_t seed,
                              std::size_t trial_budget) {
    const auto configs = enumerate_discrete(g);
    if (configs.empty()) throw InfeasibleError("witness search needs a non-empty design space");
    const Kernel kernel(g, KernelHyperparams::defaults(g, kind));
    double min_seen = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trial_budget; ++trial) {
        const auto pts = witness_set(g, configs, seed, trial);
        const auto [min_eig, pass] = spd_check(kernel.gram(pts), 1e30);
        (void)pass;
        min_seen = std::min(min_seen, min_eig);
    }
    return min_seen;
}

NaiveWitness naive_kernel_witness(const DesignSpaceGraph& g, std::uint64_t seed,
                                  std::size_t trial_budget) {
    const auto configs = enumerate_discrete(g);
    if (configs.empty()) throw InfeasibleError("witness search needs a non-empty design space");
    const Kernel kernel(g, KernelHyperparams::defaults(g, KernelKind::NaiveTest));
    for (std::size_t trial = 0; trial < trial_budget; ++trial) {
        auto pts = witness_set(g, configs, seed, trial);
        const auto [min_eig, pass] = spd_check(kernel.gram(pts), 1e30);
        (void)pass;
        if (min_eig < -1e-10) return {std::move(pts), min_eig, trial + 1};
    }
    throw SearchExhaustedError("no naive-kernel witness in " + std::to_string(trial_budget) +
                               " trials");
}

} // namespace hdsg
