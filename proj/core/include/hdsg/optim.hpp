#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hdsg {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fx = 0.0;
    int evals = 0;
};

/// Bounded derivative-free simplex minimization. Candidate vertices are
/// clamped into [lo, hi] componentwise; stops after max_evals objective
/// evaluations or when the simplex collapses.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             Eigen::VectorXd x0, double step, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, int max_evals);

} // namespace hdsg
