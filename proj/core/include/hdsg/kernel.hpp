#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdsg/space.hpp"

namespace hdsg {

enum class KernelKind { Hier, Gower, ContinuousRelaxation, NaiveTest };

const char* kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& s);

/// Scale vectors follow the variable partition by role. HIER uses all three
/// groups (theta_dec covers the meta coordinates re-entering the decreed
/// factor, then the decreed variables). Gower packs its two type-group
/// scales into theta_neu = {cat, qnt}; continuous relaxation packs the
/// one-hot block followed by the quantitative block into theta_neu.
struct KernelHyperparams {
    KernelKind kind = KernelKind::Hier;
    std::vector<double> theta_neu;
    std::vector<double> theta_meta;
    std::vector<double> theta_dec;
    double sigma2 = 1.0;
    double nugget = 0.0;

    static KernelHyperparams defaults(const DesignSpaceGraph& g, KernelKind kind);
    void validate(const DesignSpaceGraph& g) const;
};

/// Expected {neu, meta, dec} scale-vector sizes for a kind.
std::array<std::size_t, 3> kernel_theta_sizes(const DesignSpaceGraph& g, KernelKind kind);

/// Correlation kernel evaluator. All kinds reduce to
/// sigma2 * exp(-sum_k theta_k * f_k) over precomputable per-pair feature
/// coordinates, which keeps single evaluations and Gram assembly bit-identical.
class Kernel {
public:
    Kernel(const DesignSpaceGraph& g, KernelHyperparams hp);

    double operator()(const ExtendedPoint& a, const ExtendedPoint& b) const;
    /// K[i][j] = k(points[i], points[j]); diagonal sigma2 + nugget.
    Eigen::MatrixXd gram(const std::vector<ExtendedPoint>& points) const;

    std::size_t feature_count() const { return coords_.size(); }
    void features(const ExtendedPoint& a, const ExtendedPoint& b, double* out) const;
    double value_from_features(const double* f) const;

    const KernelHyperparams& hyperparams() const { return hp_; }
    const std::vector<double>& theta() const { return theta_; }

private:
    struct Coord {
        enum class What {
            PerVar,     // algebraic/rank/indicator with the delta rule
            MetaRank,   // ordered distance for meta values (rank for finite)
            NaiveDec,   // decreed distance zeroed across subspaces
            OneHot,     // one-hot coordinate of a categorical level
            GowerCat,   // mean categorical Gower term
            GowerQnt    // mean quantitative Gower term
        };
        What what;
        std::size_t var = 0;
        std::size_t level = 0;
    };

    const DesignSpaceGraph& g_;
    KernelHyperparams hp_;
    std::vector<Coord> coords_;
    std::vector<double> theta_;        // concatenated neu | meta | dec
    std::vector<std::size_t> meta_vars_;

    double coord_distance(const Coord& c, const ExtendedPoint& a, const ExtendedPoint& b,
                          bool same_subspace) const;
    bool same_meta_config(const ExtendedPoint& a, const ExtendedPoint& b) const;
};

/// Spec-facing wrappers around Kernel.
double k_hier(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
              const KernelHyperparams& hp);
double k_gower(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
               const KernelHyperparams& hp);
double k_cr(const DesignSpaceGraph& g, const ExtendedPoint& x, const ExtendedPoint& x2,
            const KernelHyperparams& hp);
Eigen::MatrixXd gram(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& points,
                     const KernelHyperparams& hp);

/// Minimum eigenvalue of a symmetric matrix and whether it clears -tol.
std::pair<double, bool> spd_check(const Eigen::MatrixXd& k, double tol);

struct NaiveWitness {
    std::vector<ExtendedPoint> points;
    double min_eigenvalue = 0.0;
    std::size_t trials = 0;
};

/// Random search for a point set whose naive-kernel Gram has a negative
/// eigenvalue (< -1e-10). The naive kernel keeps full decreed-factor
/// correlation across subspaces, which breaks positive definiteness.
NaiveWitness naive_kernel_witness(const DesignSpaceGraph& g, std::uint64_t seed,
                                  std::size_t trial_budget = 10000);

/// Same search against a given kernel kind; returns the most negative
/// eigenvalue seen (no witness expected for SPD kinds).
double witness_search_min_eig(const DesignSpaceGraph& g, KernelKind kind, std::uint64_t seed,
                              std::size_t trial_budget);

} // namespace hdsg
