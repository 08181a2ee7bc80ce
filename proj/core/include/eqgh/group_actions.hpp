#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqgh/map_search.hpp"
#include "eqgh/metric_core.hpp"
#include "eqgh/metric_space.hpp"

namespace eqgh {

enum class GroupKind { Z, Z2, Cyclic, FreeMonoid };

/// Reduced-word element of a generated group. Abelian kinds use the integer
/// coordinates; free monoids use the letter sequence.
struct GroupElement {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::vector<std::uint8_t> letters;

    bool operator==(const GroupElement&) const = default;
};

class GeneratedGroup {
public:
    static GeneratedGroup z();
    static GeneratedGroup z2();
    static GeneratedGroup cyclic(int modulus);
    static GeneratedGroup free_monoid(int letter_count);

    GroupKind kind() const { return kind_; }
    int param() const { return param_; }
    std::size_t generator_count() const;
    bool is_abelian() const { return kind_ != GroupKind::FreeMonoid; }

    GroupElement identity() const { return {}; }
    GroupElement generator(std::size_t s) const;
    GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
    // g^k; k < 0 requires an invertible kind (not the free monoid).
    GroupElement power(const GroupElement& g, std::int64_t k) const;
    int word_length(const GroupElement& g) const;
    std::string to_string(const GroupElement& g) const;

    // Reduced words of length <= radius, sorted by (length, coordinates).
    // Semigroup balls avoid inverse generators.
    std::vector<GroupElement> ball(int radius, bool semigroup) const;

private:
    GroupKind kind_ = GroupKind::Z;
    int param_ = 0;
};

enum class ActionMode { Group, Semigroup };

/// A generated group acting on a finite metric space by one self-map per
/// generator. Group mode requires bijective generators; relations of the
/// kind (commutativity, cyclic order) are checked exactly on construction.
class FiniteAction {
public:
    FiniteAction() = default;  // empty shell; every operation validates the space
    FiniteAction(GeneratedGroup group, SpacePtr space, std::vector<PointMap> gen_maps,
                 ActionMode mode);

    const GeneratedGroup& group() const { return group_; }
    const SpacePtr& space() const { return space_; }
    ActionMode mode() const { return mode_; }
    const std::vector<PointMap>& generator_maps() const { return gen_maps_; }
    const std::vector<PointMap>& inverse_maps() const { return inv_maps_; }

    PointMap evaluate(const GroupElement& g) const;
    std::vector<GroupElement> ball(int radius) const {
        return group_.ball(radius, mode_ == ActionMode::Semigroup);
    }
    // Maps for a whole ball at once, composed incrementally along the
    // Cayley graph; aligned with the input element order.
    std::vector<PointMap> orbit_maps(const std::vector<GroupElement>& elements) const;

private:
    GeneratedGroup group_;
    SpacePtr space_;
    std::vector<PointMap> gen_maps_;
    std::vector<PointMap> inv_maps_;  // group mode only
    ActionMode mode_;
};

struct Homomorphism {
    GeneratedGroup source;
    GeneratedGroup target;
    std::vector<GroupElement> gen_images;

    GroupElement apply(const GroupElement& g) const;
    std::string to_string() const;
};

/// All homomorphisms sending the source generators into ball(radius) of the
/// target that respect the source relations.
std::vector<Homomorphism> enumerate_homomorphisms(const GeneratedGroup& source,
                                                  const GeneratedGroup& target, int radius,
                                                  bool target_semigroup = false);

/// sup_x d(f(x), g(x)) for two maps with common source and target.
double d_sup(const PointMap& f, const PointMap& g);

/// sup over generators s and points x of d(alpha_s x, beta_s x); actions on
/// one common space.
double d_S(const FiniteAction& alpha, const FiniteAction& beta);

/// max over generators s of d_sup(beta_s o f, f o alpha_s) for f mapping
/// alpha's space into beta's space.
double equivariant_defect(const PointMap& f, const FiniteAction& alpha, const FiniteAction& beta);

struct EquivariantCertificate {
    double epsilon = 0.0;
    PointMap forward;   // X -> Y
    PointMap backward;  // Y -> X
    double fwd_distortion = 0.0, fwd_net = 0.0, fwd_equiv = 0.0;
    double bwd_distortion = 0.0, bwd_net = 0.0, bwd_equiv = 0.0;
};

/// Upper certificate for the one-group equivariant GH distance: a pair of
/// eps-isometries intertwining the generator maps up to eps. When the two
/// actions share a space the identity seed makes the certificate never
/// exceed d_S.
EquivariantCertificate dgh_s_upper(const FiniteAction& alpha, const FiniteAction& beta,
                                   std::size_t budget, std::vector<PointMap> fwd_seeds = {},
                                   std::vector<PointMap> bwd_seeds = {});

struct OneSidedCertificate {
    double epsilon = 0.0;
    Homomorphism rho;
    PointMap map;  // Y -> X against alpha_g o f = f o beta_rho(g)
    double distortion = 0.0, net = 0.0, equiv = 0.0;
    int ball_radius = 0;
    bool ball_truncated = true;  // the sup over G is evaluated on a finite ball
};

/// Upper certificate for d_GH,1 with a pinned homomorphism.
OneSidedCertificate dgh1_upper_with_rho(const FiniteAction& alpha, const FiniteAction& beta,
                                        const Homomorphism& rho, std::size_t budget,
                                        int g_ball_radius = 6,
                                        std::vector<PointMap> seeds = {});

/// Upper certificate for d_GH,1 minimized over enumerated homomorphisms.
OneSidedCertificate dgh1_upper(const FiniteAction& alpha, const FiniteAction& beta,
                               std::size_t budget, int g_ball_radius = 6, int rho_radius = 1);

struct TwoSidedCertificate {
    OneSidedCertificate forward;   // (rho, f): alpha -> beta
    OneSidedCertificate backward;  // (phi, h): beta -> alpha
    double epsilon = 0.0;
};

TwoSidedCertificate dgh2_upper(const FiniteAction& alpha, const FiniteAction& beta,
                               std::size_t budget, int g_ball_radius = 6, int rho_radius = 1);

/// True iff every generator map (and inverse, in group mode) has zero
/// distortion.
bool is_isometric_action(const FiniteAction& alpha);

struct QuasimetricReport {
    double cert_ab = 0.0, cert_ba = 0.0, cert_ag = 0.0, cert_gb = 0.0;
    double hat_gh = 0.0;   // metric-only certificate for the pair (X, Y)
    double d_s = -1.0;     // only when alpha and beta share a space
    bool symmetric = false;
    bool hat_below_equivariant = false;
    bool bounded_by_d_s = true;
    bool relaxed_triangle = false;
};

/// Checks the certified counterparts of the quasi-metric properties on a
/// triple of same-group actions. Composite maps through gamma are fed back
/// as seeds, which makes the relaxed triangle bound hold by construction.
QuasimetricReport quasimetric_report(const FiniteAction& alpha, const FiniteAction& beta,
                                     const FiniteAction& gamma, std::size_t budget);

}  // namespace eqgh
