#pragma once

#include <cstdint>

#include "eqgh/group_actions.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/shadowing.hpp"

namespace eqgh {

/// Circle of radius r sampled at `points` equally spaced sites, arc-length
/// metric. Even meshes realize the diameter pi r exactly.
SpacePtr make_circle(double radius, int points);

/// mesh x mesh torus grid with the product of the two quotient metrics;
/// built as the product of two circumference-one circles, diameter sqrt2/2.
SpacePtr make_torus(int mesh);

/// Cartesian product with the l2 product metric (size guard 20000 points).
SpacePtr product_space(const SpacePtr& a, const SpacePtr& b);

PointMap circle_rotation(const SpacePtr& circle, int steps);

/// Grid self-map of an integer matrix: (i, j) -> A (i, j) mod mesh. Exact,
/// no snapping, because integer matrices preserve the uniform grid.
PointMap torus_matrix_map(const SpacePtr& torus, int mesh, const Mat2i& a);

/// Z action generated by one integer matrix; group mode iff |det| = 1.
FiniteAction toral_matrix_action(const SpacePtr& torus, int mesh, const Mat2i& a);

/// Z^2 action from two commuting integer matrices; group mode iff both are
/// unimodular.
FiniteAction z2_matrix_action(const SpacePtr& torus, int mesh, const Mat2i& a, const Mat2i& b);

/// Product-collapse family: X the torus grid, Y two shrinking circles times
/// X, h the projection and f the section. Every certified quantity is
/// measured on construction; the collapse bound is sqrt2 pi / n.
struct ExampleFamily {
    int n = 0;
    int torus_mesh = 0;
    int circle_mesh = 0;
    SpacePtr x;
    SpacePtr y;
    PointMap h;  // Y -> X projection
    PointMap f;  // X -> Y section at the base circle point
    FiniteAction alpha;  // matrix pair acting on X (semigroup: det != +-1)
    FiniteAction beta;   // product action on Y
    Homomorphism rho_identity;  // identity hom of the acting group
    double bound = 0.0;  // sqrt(2) pi / n
    double slack = 0.0;  // grid allowance: one mesh cell; snapping itself is exact
    double h_distortion = 0.0, h_net = 0.0;
    double f_distortion = 0.0, f_net = 0.0, f_equiv = 0.0;
};

ExampleFamily example_family(int n, int torus_mesh = 32, int circle_mesh = 4);

/// One-generator variant: alpha the Z (semigroup) action of a single
/// hyperbolic matrix on X, beta a Z^2 product action on Y whose (1,0)
/// component is alpha's generator, rho the homomorphism 1 -> (1,0).
struct OneSidedFamily {
    SpacePtr x;
    SpacePtr y;
    FiniteAction alpha;
    FiniteAction beta;
    Homomorphism rho;
    PointMap h;  // Y -> X projection, the reference certificate
    double bound = 0.0;
    double slack = 0.0;
};

OneSidedFamily example_one_sided_family(int n, int torus_mesh = 8, int circle_mesh = 4);

/// Rotation family X_n = S^1_{1/n} x S^1 with the diagonal rotation, and the
/// limit rotation on S^1. All maps are exact grid isometries; the collapse
/// bound is pi / n.
struct IsometryFamily {
    int n = 0;
    int mesh = 0;
    int steps = 0;
    SpacePtr xn;
    SpacePtr x;
    PointMap h;  // X_n -> X projection
    PointMap f;  // X -> X_n section
    FiniteAction action_n;
    FiniteAction action;
    double bound = 0.0;  // pi / n
    double h_distortion = 0.0, h_net = 0.0, h_equiv = 0.0;
    double f_distortion = 0.0, f_net = 0.0, f_equiv = 0.0;
};

IsometryFamily example_isometry_family(int n, int mesh = 16, int steps = 1);

/// Word window of the full shift: points are length-`window` words, metric
/// 2^-(first differing index), the shift dropping into a seeded fixed fresh
/// symbol per word. The window edge makes the action approximate, hence the
/// flag.
struct ShiftSystem {
    FiniteAction action;
    int alphabet = 0;
    int window = 0;
    bool boundary_approximate = true;
};

ShiftSystem full_shift(int alphabet, int window, std::uint64_t seed = 0);

}  // namespace eqgh
