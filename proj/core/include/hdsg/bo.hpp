#pragma once

#include "hdsg/gp.hpp"
#include "hdsg/problems.hpp"

namespace hdsg {

enum class Acquisition { EI, WB2S };

const char* acquisition_name(Acquisition a);
Acquisition acquisition_from_name(const std::string& s);

struct BoConfig {
    int doe = 10;
    int budget = 50;              // iterations after the DoE
    Acquisition acq = Acquisition::WB2S;
    int pool = 512;               // valid candidates per iteration
    int neighbors = 64;           // corrected incumbent perturbations
    std::uint64_t seed = 0;
    KernelKind kernel = KernelKind::Hier;
    FitConfig fit;
    int refit_budget = 120;       // warm-started refit evaluations per iteration
};

struct BoIteration {
    ExtendedPoint point;
    double value = 0.0;
    double incumbent = 0.0;
};

struct BoTrace {
    std::vector<ExtendedPoint> doe_points;
    std::vector<double> doe_values;
    std::vector<BoIteration> iterations;
    double final_incumbent = 0.0;

    std::size_t total_evaluations() const { return doe_points.size() + iterations.size(); }
};

/// EI = (f_min - mu) Phi(z) + sigma phi(z), z = (f_min - mu)/sigma; zero
/// when sigma vanishes.
double expected_improvement_value(double mu, double sd, double f_min);
double expected_improvement(const GpModel& m, const ExtendedPoint& x, double f_min);

/// Scaled criterion s * EI - mu (larger is better under minimization).
double wb2s(const GpModel& m, const ExtendedPoint& x, double f_min, double s);

/// Pool-based scale: s = 100 |mu(x*)| / EI(x*) at the pool's EI argmax,
/// falling back to 1 when EI vanishes there.
double wb2s_scale(const GpModel& m, const std::vector<ExtendedPoint>& pool, double f_min);

/// Sample-correct-score proposal: valid pool + corrected incumbent
/// neighbors, scored by the configured acquisition, earliest-index ties.
ExtendedPoint propose_next(const GpModel& m, const DesignSpaceGraph& g, const BoConfig& cfg,
                           std::uint64_t iteration_seed, const ExtendedPoint* incumbent);

BoTrace run_bo(const ProblemSpec& problem, const BoConfig& cfg);

/// Random-search baseline at the same total evaluation budget; shares the
/// sampler, so the first doe draws coincide with run_bo's DoE.
BoTrace run_random_baseline(const ProblemSpec& problem, const BoConfig& cfg);

} // namespace hdsg
