#pragma once

#include <span>
#include <vector>

#include "eqgh/metric_space.hpp"

namespace eqgh {

/// max( sup_{a in A} inf_{b in B}, sup_{b in B} inf_{a in A} ) within one space.
double hausdorff_distance(const FiniteMetricSpace& space, std::span<const Index> a,
                          std::span<const Index> b);

/// Metric distortion of a map: sup over source pairs of |d_Y(f x, f x') - d_X(x, x')|.
double distortion(const PointMap& f);

/// Covering defect of the image: sup over target points of the distance to f(source).
double net_defect(const PointMap& f);

struct EpsIsometryCheck {
    bool ok = false;
    GhaCertificate cert;
};

/// f is an eps-isometry iff distortion(f) <= eps and the image is an eps-net
/// of the target. The certificate records both quantities either way.
EpsIsometryCheck is_eps_isometry(const PointMap& f, double eps);

struct GhExactResult {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
    std::vector<std::pair<Index, Index>> witness;  // correspondence attaining upper
    std::size_t nodes = 0;

    double value() const { return upper; }
};

/// Exact Gromov-Hausdorff distance as half the minimal correspondence
/// distortion, via branch and bound over map pairs (f: X->Y, g: Y->X);
/// every correspondence contains such a pair, so the minimum is exact.
/// Refuses spaces with more than 8 points per side unless a node budget is
/// supplied, in which case a (lower, upper) interval may come back inexact.
GhExactResult gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y);
GhExactResult gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                       std::size_t node_budget);

struct GhaSearchResult {
    GhaCertificate forward;   // X -> Y
    GhaCertificate backward;  // Y -> X
    double epsilon = 0.0;     // max of the two certified epsilons
    std::size_t evaluations = 0;
};

/// Searches eps-GH approximations in both directions (greedy seeds plus
/// deterministic local swaps) and certifies the best epsilon found; this is
/// the upper estimate of the two-sided GH distance. Always returns a
/// certificate, in the worst case the constant map at max(diam X, diam Y).
GhaSearchResult gha_search(const SpacePtr& x, const SpacePtr& y, std::size_t budget,
                           std::uint64_t seed = 0);

/// Approximation inverse of an eps-isometry: f'(y) is the smallest-index
/// minimizer of d_Y(f(x), y). Certifies distortion(f') <= 3 eps and the
/// round trips d_X(x, f'(f x)) <= 2 eps, d_Y(y, f(f' y)) <= eps.
PointMap approx_inverse(const PointMap& f, double eps);

/// Greedy farthest-point net, seeded at index 0, whose covering radius is <= eps.
std::vector<Index> eps_net(const FiniteMetricSpace& space, double eps);

/// sup over points of the distance to the nearest net point.
double covering_radius(const FiniteMetricSpace& space, std::span<const Index> net);

/// Bound 2 eps + delta from matched eps-nets with delta-close mutual
/// distances; eps is the larger covering radius. When both spaces are small
/// enough for the exact oracle, the bound is certified against it.
double net_approx_bound(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                        std::span<const Index> net_x, std::span<const Index> net_y, double delta);

/// Collapses an eps-isometry f to a map constant on the disjoint cells of an
/// eps-net (first-net-point-within-eps rule). Certifies distortion <= 5 eps,
/// net defect <= 3 eps and sup d_Y(f, f1) <= 2 eps.
PointMap cellwise_gha(const PointMap& f, double eps, std::span<const Index> net);

}  // namespace eqgh
