#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "eqgh/group_actions.hpp"

namespace eqgh {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// 2x2 integer matrix acting on the torus R^2/Z^2.
struct Mat2i {
    std::int64_t a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    std::int64_t det() const { return a11 * a22 - a12 * a21; }
    bool unimodular() const { return det() == 1 || det() == -1; }
    Mat2i operator*(const Mat2i& o) const;
    // Integer inverse; precondition |det| == 1.
    Mat2i inverse() const;
    Vec2 apply(const Vec2& v) const;  // no torus reduction
    double operator_norm() const;     // largest singular value
};

double torus_dist(const Vec2& a, const Vec2& b);
Vec2 torus_wrap(const Vec2& v);
// Representative of a - b with both coordinates in [-1/2, 1/2).
Vec2 torus_lift(const Vec2& a, const Vec2& b);

/// Continuous toral system: a Z or Z^2 (semi)group acting by integer
/// matrices. Orbits of dyadic points are computed exactly in modular
/// integer arithmetic, so a zero-noise pseudo-orbit is a true orbit bit for
/// bit.
class TorusSystem {
public:
    TorusSystem(GeneratedGroup group, std::vector<Mat2i> generators);

    const GeneratedGroup& group() const { return group_; }
    const std::vector<Mat2i>& generators() const { return gens_; }
    bool invertible() const { return invertible_; }
    ActionMode mode() const { return invertible_ ? ActionMode::Group : ActionMode::Semigroup; }

    Vec2 apply_generator(std::size_t s, const Vec2& p) const;
    Vec2 apply_element(const GroupElement& g, const Vec2& p) const;
    std::vector<GroupElement> window(int radius) const {
        return group_.ball(radius, !invertible_);
    }

    // Exact orbit of a dyadic point (numerators mod 2^bits).
    static constexpr int kDyadicBits = 40;
    std::array<std::int64_t, 2> apply_element_dyadic(const GroupElement& g,
                                                     std::array<std::int64_t, 2> p) const;

private:
    GeneratedGroup group_;
    std::vector<Mat2i> gens_;
    std::vector<Mat2i> inv_gens_;
    bool invertible_ = false;
};

/// A (delta, S)-pseudo-orbit over a finite window: one continuous point per
/// window element, with every generator step off by less than delta.
struct PseudoOrbit {
    GeneratedGroup group;
    bool semigroup = false;
    std::vector<GroupElement> window;  // a ball, identity included
    std::vector<Vec2> values;
    double delta = 0.0;    // stated bound
    double max_gap = 0.0;  // measured sup of d(alpha_s x_g, x_sg)
};

/// Exact-orbit base point plus seeded per-site perturbations; the pseudo-orbit
/// condition is verified before returning. delta = 0 yields a true orbit.
PseudoOrbit make_pseudo_orbit(const TorusSystem& sys, double delta, int radius,
                              std::uint64_t seed);

struct TracingResult {
    Vec2 point;
    double epsilon = 0.0;      // measured sup over the window of d(alpha_t x, x_t)
    double bound = 0.0;        // C * max_gap + truncation
    double constant = 0.0;     // C from the eigenvalue data
    double truncation = 0.0;   // contribution of cutting the series at the window edge
    double residual = 0.0;     // per-step defect of the reconstructed orbit
    bool unique = true;        // no second tracer found at the scan resolution
    std::vector<Vec2> orbit;   // reconstructed orbit, aligned with the window
};

/// Explicit shadowing for a hyperbolic toral matrix on a Z-interval window:
/// per-step errors are split along the eigendirections, and the stable part
/// is summed forward while the unstable part is summed backward. Refuses
/// matrices with an eigenvalue within 1e-6 of modulus one.
TracingResult shadow_hyperbolic_toral(const PseudoOrbit& po, const Mat2i& a);

struct ExpansivityReport {
    bool expansive_on_sample = true;
    double min_separation = 0.0;  // smallest orbit separation among sampled pairs
    std::optional<std::pair<Index, Index>> witness;  // violating pair, if any
    int horizon = 0;
    std::size_t pairs_checked = 0;
};

/// Checks sup_{g in ball(R)} d(alpha_g x, alpha_g y) > c over sampled pairs.
/// A negative verdict is certified only for the sampled pairs and horizon.
ExpansivityReport expansivity_certificate(const FiniteAction& alpha, double c, int horizon,
                                          const std::vector<std::pair<Index, Index>>& pairs);

/// Smallest radius r <= horizon with: every point y whose ball(r)-orbit stays
/// c-close to x's satisfies d(x, y) < eps. All space points are tested.
/// Throws refusal_error naming the best radius when the horizon is exhausted.
int separation_set(const FiniteAction& alpha, Index x, double eps, double c, int horizon);

struct ConjugacyResult {
    PointMap h;
    double eps1 = 0.0;          // worst tracing epsilon over target points
    double equiv_defect = 0.0;  // sup over the window of d_sup(alpha_g o h, h o beta_rho(g))
    double distortion = 0.0;
    double net_defect = 0.0;
    double tolerance = 0.0;  // 2 eps1, the certified defect allowance
    std::size_t non_unique = 0;  // points whose tracer was not unique at resolution
};

/// Stability conjugacy: for each y the pulled-back family
/// {u(beta_rho(g) y)} over the window is traced exhaustively over the finite
/// target space, and h(y) is the tracing point (smallest index on ties).
/// Certifies d_sup(h, u) <= eps1, the isometry-defect chain, and the
/// windowed equivariance defect <= 2 eps1.
ConjugacyResult build_conjugacy(const PointMap& u, const Homomorphism& rho,
                                const FiniteAction& alpha, const FiniteAction& beta,
                                double delta, int window_radius);

}  // namespace eqgh
