#pragma once

#include <optional>
#include <vector>

#include "eqgh/group_actions.hpp"
#include "eqgh/metric_space.hpp"

namespace eqgh {

/// Probability weights over the points of one space. Nonnegative, summing to
/// one; renormalized on construction when the sum is within 1e-12 of a
/// positive value.
class DiscreteMeasure {
public:
    DiscreteMeasure(SpacePtr space, std::vector<double> weights);
    static DiscreteMeasure dirac(SpacePtr space, Index at);
    static DiscreteMeasure uniform(SpacePtr space);

    const SpacePtr& space() const { return space_; }
    const std::vector<double>& weights() const { return w_; }
    double weight(Index i) const { return w_[i]; }
    std::vector<Index> support() const;

private:
    SpacePtr space_;
    std::vector<double> w_;
};

/// Transport plan between two measures; marginals are checked to 1e-9.
struct Coupling {
    SpacePtr row_space;
    SpacePtr col_space;
    std::vector<double> matrix;  // row-major |row| x |col|

    Coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::vector<double> m);
    double entry(Index i, Index j) const { return matrix[static_cast<std::size_t>(i) * col_space->size() + j]; }
};

/// Integral of d^p against the plan.
double transport_cost(const Coupling& pi, double p);

struct WassersteinResult {
    double value = 0.0;  // W_p
    double cost = 0.0;   // W_p^p
    Coupling plan;
};

/// Exact discrete W_p as a minimum-cost flow on the support bipartite graph
/// (successive shortest paths with potentials). Optimality is certified by
/// the dual variables before returning.
WassersteinResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

DiscreteMeasure pushforward(const PointMap& f, const DiscreteMeasure& mu);

struct ContractionCheck {
    double lhs = 0.0;  // W_p^p(f_* mu, g_* mu)
    double rhs = 0.0;  // int d^p(f x, g x) d mu
    bool ok = false;
};

/// W_p^p(f_* mu, g_* mu) <= int d^p(f(x), g(x)) dmu(x); certified, since it
/// is a theorem for any pair of maps with a common source and target.
ContractionCheck contraction_check(const PointMap& f, const PointMap& g,
                                   const DiscreteMeasure& mu, double p);

struct LiftGhaReport {
    double eps_tilde = 0.0;  // 8 eps + (9 p M eps)^(1/p)
    double m_const = 0.0;    // diam(src)^(p-1) + diam(dst)^(p-1)
    double worst_pair_gap = 0.0;
    double worst_net = 0.0;
    double worst_equiv = 0.0;
    std::size_t pairs_checked = 0;
};

/// Pushforward lift of an eps-isometry to the Wasserstein space: computes
/// eps-tilde from the formula and verifies, on the sampled measures, the
/// near-isometry of f_*, the covering witness through the approximation
/// inverse, and (when actions are supplied) the equivariance of f_*.
LiftGhaReport lift_gha(const PointMap& f, double eps, double p,
                       const std::vector<DiscreteMeasure>& sample,
                       const std::vector<DiscreteMeasure>& target_sample = {},
                       const FiniteAction* alpha = nullptr, const FiniteAction* beta = nullptr,
                       int window_radius = 1);

/// Box Folner sets: [0, n) for Z, [0, n)^2 for Z2, the full group for cyclic
/// kinds. The per-generator boundary ratio |sF delta F| / |F| is computed
/// exactly and checked against the 2/n envelope.
struct FolnerSequence {
    GeneratedGroup group;
    int n = 0;
    std::vector<GroupElement> elements;
    double boundary_ratio = 0.0;
};

FolnerSequence folner_box(const GeneratedGroup& group, int n);

/// Finite-n Folner average (1/|F|) sum_{g in F} alpha(g)_* (f_* mu).
/// Refuses semigroup-mode actions.
DiscreteMeasure folner_average(const DiscreteMeasure& mu, const FiniteAction& action,
                               const PointMap& f, const FolnerSequence& folner);

/// max over generators s of W_p(alpha(s)_* mu, mu).
double invariance_defect(const DiscreteMeasure& mu, const FiniteAction& action, double p);

struct InvariantNetLiftReport {
    std::vector<DiscreteMeasure> images;
    double d_eps = 0.0;  // 28 eps + (9 p M eps)^(1/p)
    double slack = 0.0;  // finite-n allowance, reported next to every bound
    double worst_pair_gap = 0.0;
    double worst_witness_dist = 0.0;
    std::size_t witnesses = 0;
};

/// Folner-averaged image of a family of near-invariant measures under a
/// lifted eps-isometry, with the D(eps) bound from the formula. The net
/// claim is tested against the supplied invariant witnesses only. When the
/// source action is given, the family's invariance is checked against the
/// tolerance first.
InvariantNetLiftReport invariant_net_lift(const std::vector<DiscreteMeasure>& family,
                                          const PointMap& f, double eps, double p,
                                          const FiniteAction& target_action,
                                          const FolnerSequence& folner, double invariance_tol,
                                          const std::vector<DiscreteMeasure>& target_witnesses,
                                          const FiniteAction* source_action = nullptr);

struct InvariantDiameterEstimate {
    double diameter = 0.0;          // max pairwise W_p of the averaged measures
    double averaging_defect = 0.0;  // worst invariance defect among them
};

/// Upper estimate of the diameter of the invariant-measure set: random
/// measures are Folner-averaged and their pairwise W_p spread is reported
/// together with the residual invariance defect.
InvariantDiameterEstimate invariant_diameter(const FiniteAction& action, double p,
                                             std::size_t n_samples, const FolnerSequence& folner,
                                             std::uint64_t seed = 0);

}  // namespace eqgh
