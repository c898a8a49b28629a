#pragma once

#include <memory>

#include <Eigen/Dense>

#include "hdsg/kernel.hpp"
#include "hdsg/space.hpp"

namespace hdsg {

struct Dataset {
    std::vector<ExtendedPoint> points;
    std::vector<double> targets;
    std::string provenance;
};

struct FitConfig {
    int multistarts = 5;
    int eval_budget = 200;    // objective evaluations per start
    double log10_lo = -2.0;   // bounds on log10(theta)
    double log10_hi = 2.0;
    std::uint64_t seed = 0;
};

/// Trained surrogate. chol factors sigma2 * (R + nugget_rel * I); alpha
/// solves that system against the centered targets.
struct GpModel {
    std::shared_ptr<const DesignSpaceGraph> graph;
    Dataset data;
    KernelHyperparams hp;          // fitted scales; sigma2 profiled
    double mean = 0.0;             // generalized least-squares constant
    double nugget_rel = 0.0;       // relative jitter actually used
    double log_marginal = 0.0;
    std::vector<double> start_log_marginals;  // value at each multistart seed point
    Eigen::MatrixXd chol;          // lower factor of R + nugget_rel I
    Eigen::VectorXd alpha;         // (R + nugget_rel I)^{-1} (y - mean)
};

/// Maximum-likelihood fit over log theta with sigma2 profiled in closed
/// form; multi-start Nelder-Mead, deterministic for a given seed.
GpModel fit(std::shared_ptr<const DesignSpaceGraph> graph, Dataset data, KernelKind kind,
            FitConfig cfg = {});

/// Model at fixed hyperparameters (no search); mean still profiled.
GpModel make_model(std::shared_ptr<const DesignSpaceGraph> graph, Dataset data,
                   KernelHyperparams hp);

/// Warm-started refit: one local search from the previous scales.
GpModel refit(const GpModel& prev, Dataset data, int eval_budget);

/// Conditional mean and variance (clipped at zero).
std::pair<double, double> predict(const GpModel& m, const ExtendedPoint& x);
std::vector<std::pair<double, double>> predict_batch(const GpModel& m,
                                                     const std::vector<ExtendedPoint>& xs);

struct LooDiagnostics {
    std::vector<double> residuals;      // y_i - loo_mean_i
    std::vector<double> standardized;   // residual / loo_sd
    double rmse = 0.0;
    double coverage_2sd = 0.0;          // fraction inside +-2 sd
};

/// Closed-form leave-one-out residuals from the factorization.
LooDiagnostics loo_diagnostics(const GpModel& m);

} // namespace hdsg
