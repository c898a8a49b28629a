#include "hdsg/distance.hpp"

#include <cmath>

#include "hdsg/errors.hpp"

namespace hdsg {

double alg_distance(double x, double x2) {
    if (!std::isfinite(x) || !std::isfinite(x2))
        throw NonFiniteError("alg_distance needs finite inputs");
    return std::abs(x - x2) / (std::sqrt(x * x + 1.0) * std::sqrt(x2 * x2 + 1.0));
}

namespace {

double base_distance(const Domain& dom, const Value& a, const Value& b) {
    switch (dom.type) {
        case VarType::Continuous:
        case VarType::Integer:
            return alg_distance(dom.normalize(a), dom.normalize(b));
        case VarType::Ordinal: {
            const double n = static_cast<double>(dom.level_count());
            if (n <= 1.0) return 0.0;
            return std::abs(dom.numeric(a) - dom.numeric(b)) / (n - 1.0);
        }
        case VarType::Categorical:
            return value_equal(a, b) ? 0.0 : 1.0;
    }
    return 0.0;
}

} // namespace

DistanceParams DistanceParams::defaults(const DesignSpaceGraph& g) {
    DistanceParams p;
    p.theta.assign(g.size(), 1.0);
    p.delta.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        p.delta[i] = default_delta(g, g.variable(i).name);
    p.p = 2.0;
    return p;
}

void DistanceParams::validate(const DesignSpaceGraph& g) const {
    if (theta.size() != g.size() || delta.size() != g.size())
        throw WidthError("distance parameters sized " + std::to_string(theta.size()) +
                         ", expected " + std::to_string(g.size()));
    if (p < 1.0) throw DomainError("aggregation exponent p must be >= 1");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(theta[i] > 0.0)) throw DomainError("theta must be positive");
        if (delta[i] < 0.0) throw DomainError("delta must be non-negative");
    }
}

double per_var_distance(const DesignSpaceGraph& g, std::size_t var, const Entry& v, const Entry& v2,
                        const DistanceParams& params) {
    if (!v && !v2) return 0.0;
    if (!v || !v2) return params.delta[var];
    const Domain& dom = g.variable(var).domain;
    if (!dom.contains(*v) || !dom.contains(*v2))
        throw DomainError("value outside the declared domain of '" + g.variable(var).name + "'");
    return params.theta[var] * base_distance(dom, *v, *v2);
}

double hier_distance(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
                     const DistanceParams& params) {
    if (x.values.size() != g.size() || x2.values.size() != g.size())
        throw WidthError("point width does not match the design space");
    params.validate(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_intermediate(i)) continue;  // logic carriers, not design coordinates
        const double d = per_var_distance(g, i, x.values[i], x2.values[i], params);
        acc += std::pow(d, params.p);
    }
    return std::pow(acc, 1.0 / params.p);
}

double default_delta(const DesignSpaceGraph& g, const std::string& var, BaseMetric metric) {
    const std::size_t v = g.index_of(var);
    const Domain& dom = g.variable(v).domain;
    if (metric == BaseMetric::Auto) {
        switch (dom.type) {
            case VarType::Continuous:
            case VarType::Integer:     metric = BaseMetric::Algebraic; break;
            case VarType::Ordinal:     metric = BaseMetric::Rank; break;
            case VarType::Categorical: metric = BaseMetric::Indicator; break;
        }
    }
    if (dom.type == VarType::Continuous &&
        (!std::isfinite(dom.bounds.lo) || !std::isfinite(dom.bounds.hi)))
        throw UnboundedError("variable '" + var + "' has unbounded support");
    if (dom.is_discrete() && dom.level_count() < 2) return 0.0;

    switch (metric) {
        case BaseMetric::Indicator:
        case BaseMetric::Rank:
            return 0.5;  // sup = 1
        case BaseMetric::Algebraic: {
            // Global supremum of the algebraic distance is 1; certify that
            // the normalized declared domain stays below it.
            if (dom.type == VarType::Continuous) {
                constexpr int kGrid = 512;
                double sup = 0.0;
                for (int i = 0; i <= kGrid; ++i)
                    for (int j = i + 1; j <= kGrid; ++j)
                        sup = std::max(sup, alg_distance(static_cast<double>(i) / kGrid,
                                                         static_cast<double>(j) / kGrid));
                if (sup > 1.0)
                    throw DomainError("algebraic distance exceeded its certified supremum");
            }
            return 0.5;
        }
        case BaseMetric::Auto:
            break;
    }
    return 0.5;
}

Eigen::MatrixXd pairwise_matrix(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& points,
                                const DistanceParams& params) {
    const std::size_t n = points.size();
    if (n == 0) throw WidthError("pairwise_matrix needs at least one point");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = hier_distance(g, points[i], points[j], params);
            m(i, j) = d;
            m(j, i) = d;
        }
    return m;
}

} // namespace hdsg
