#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hdsg/space.hpp"

namespace hdsg {

/// Base metric used for a variable's in-support distances.
enum class BaseMetric { Auto, Algebraic, Indicator, Rank };

/// Per-variable scales and exclusion constants plus the aggregation
/// exponent of the hierarchical distance.
struct DistanceParams {
    std::vector<double> theta;  // > 0, one per variable
    std::vector<double> delta;  // >= 0, charged when exactly one side is EXC
    double p = 2.0;

    /// Unit scales, metric-compliant deltas (sup/2), p = 2.
    static DistanceParams defaults(const DesignSpaceGraph& g);
    void validate(const DesignSpaceGraph& g) const;
};

/// Bounded metric |x - x'| / (sqrt(x^2+1) sqrt(x'^2+1)); supremum 1,
/// reached along (x, -1/x) pairs.
double alg_distance(double x, double x2);

/// Distance contribution of one variable between two entries: 0 when both
/// EXC, delta when exactly one is, otherwise theta times the base distance
/// (algebraic on the normalized domain for continuous/integer, rank for
/// ordinal, indicator for categorical).
double per_var_distance(const DesignSpaceGraph& g, std::size_t var, const Entry& v, const Entry& v2,
                        const DistanceParams& params);

/// Hierarchical p-norm distance over all non-intermediate variables.
double hier_distance(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
                     const DistanceParams& params);

/// Half the supremum of the base distance over the declared domain; the
/// smallest exclusion constant preserving the triangle inequality.
/// Continuous domains are certified by grid search.
double default_delta(const DesignSpaceGraph& g, const std::string& var,
                     BaseMetric metric = BaseMetric::Auto);

/// Symmetric matrix of hierarchical distances, each pair computed once.
Eigen::MatrixXd pairwise_matrix(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& points,
                                const DistanceParams& params);

} // namespace hdsg
