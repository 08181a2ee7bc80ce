#include <doctest.h>

#include <cmath>

#include "eqgh/shadowing.hpp"
#include "eqgh/systems.hpp"
#include "oracles.hpp"

using namespace eqgh;

namespace {

const Mat2i kCat{2, 1, 1, 1};          // det 1, eigenvalues (3 +- sqrt5)/2
const Mat2i kPaperA{1, 2, 3, 4};       // det -2, semigroup generator
const Mat2i kShear{1, 1, 0, 1};        // eigenvalue 1, not hyperbolic

TorusSystem cat_system() { return TorusSystem(GeneratedGroup::z(), {kCat}); }

}  // namespace

TEST_CASE("pseudo-orbits with zero noise are exact orbits") {
    const auto po = make_pseudo_orbit(cat_system(), 0.0, 30, 7);
    CHECK(po.max_gap == 0.0);
    const auto tr = shadow_hyperbolic_toral(po, kCat);
    CHECK(tr.epsilon <= 1e-12);
    CHECK(tr.residual <= 1e-12);
    CHECK(torus_dist(tr.point, po.values[0]) <= 1e-12);  // window[0] is the identity
}

TEST_CASE("pseudo-orbit construction verifies its own gap") {
    const auto po = make_pseudo_orbit(cat_system(), 1e-3, 50, 3);
    CHECK(po.window.size() == 101);
    CHECK(po.max_gap > 0.0);
    CHECK(po.max_gap < 1e-3);

    // Z2 window from commuting unimodular matrices (powers of a common base).
    const Mat2i f{1, 1, 1, 0};
    const TorusSystem z2sys(GeneratedGroup::z2(), {f * f, f * f * f});
    const auto po2 = make_pseudo_orbit(z2sys, 1e-3, 5, 9);
    CHECK(po2.window.size() == 61);
    CHECK(po2.max_gap < 1e-3);
}

TEST_CASE("semigroup windows stay one-sided") {
    const TorusSystem semi(GeneratedGroup::z(), {kPaperA});
    CHECK_FALSE(semi.invertible());
    const auto po = make_pseudo_orbit(semi, 1e-3, 20, 5);
    CHECK(po.window.size() == 21);
    for (const auto& g : po.window) CHECK(g.a >= 0);
    const auto tr = shadow_hyperbolic_toral(po, kPaperA);
    CHECK(tr.epsilon <= tr.bound + 1e-9);
}

TEST_CASE("tracer matches the dense linear-solve oracle") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto po = make_pseudo_orbit(cat_system(), 1e-3, 50, seed);
        const auto tr = shadow_hyperbolic_toral(po, kCat);
        const auto oracle_y = oracle::dense_shadowing_solve(po, kCat);
        REQUIRE(oracle_y.size() == po.window.size());
        // Window times sorted ascending in the oracle; reconstruct ours.
        std::vector<std::pair<std::int64_t, std::size_t>> order;
        for (std::size_t k = 0; k < po.window.size(); ++k)
            order.emplace_back(po.window[k].a, k);
        std::sort(order.begin(), order.end());
        double worst = 0.0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Vec2 ours = torus_lift(tr.orbit[k], po.values[order[k].second]);
            worst = std::max({worst, std::abs(ours.x - oracle_y[k].x),
                              std::abs(ours.y - oracle_y[k].y)});
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("complex eigenvalue pairs trace against the dense oracle") {
    // lambda = 1 +- i, both of modulus sqrt2: purely expanding, solved in
    // rotation-scaling coordinates.
    const Mat2i spiral{1, -1, 1, 1};
    const TorusSystem sys(GeneratedGroup::z(), {spiral});
    CHECK_FALSE(sys.invertible());  // det 2, forward windows only
    const auto po = make_pseudo_orbit(sys, 1e-3, 30, 8);
    const auto tr = shadow_hyperbolic_toral(po, spiral);
    CHECK(tr.epsilon <= tr.bound + 1e-9);
    const auto oracle_y = oracle::dense_shadowing_solve(po, spiral);
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    for (std::size_t k = 0; k < po.window.size(); ++k) order.emplace_back(po.window[k].a, k);
    std::sort(order.begin(), order.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Vec2 ours = torus_lift(tr.orbit[k], po.values[order[k].second]);
        worst = std::max({worst, std::abs(ours.x - oracle_y[k].x),
                          std::abs(ours.y - oracle_y[k].y)});
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("tracing epsilon scales linearly in delta") {
    double ratio0 = -1.0;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const auto po = make_pseudo_orbit(cat_system(), delta, 50, 17);
        const auto tr = shadow_hyperbolic_toral(po, kCat);
        CHECK(tr.epsilon <= tr.constant * po.max_gap + tr.truncation + 1e-9);
        const double ratio = tr.epsilon / delta;
        if (ratio0 < 0.0)
            ratio0 = ratio;
        else
            CHECK(std::abs(ratio - ratio0) / ratio0 <= 0.05);
    }
}

TEST_CASE("single-point windows trace trivially") {
    const auto po = make_pseudo_orbit(cat_system(), 1e-3, 0, 4);
    CHECK(po.window.size() == 1);
    const auto tr = shadow_hyperbolic_toral(po, kCat);
    CHECK(tr.epsilon == 0.0);
}

TEST_CASE("non-hyperbolic matrices are refused") {
    const auto po = make_pseudo_orbit(cat_system(), 1e-3, 10, 4);
    CHECK_THROWS_AS(shadow_hyperbolic_toral(po, kShear), precondition_error);
}

TEST_CASE("uniqueness scan flags the two-sided cat window as unique") {
    const auto po = make_pseudo_orbit(cat_system(), 1e-3, 50, 21);
    const auto tr = shadow_hyperbolic_toral(po, kCat);
    CHECK(tr.unique);
}

TEST_CASE("expansivity certificate on grid systems") {
    const auto torus = make_torus(16);
    const auto cat = toral_matrix_action(torus, 16, kCat);
    std::vector<std::pair<Index, Index>> pairs;
    std::uint64_t rng = 5;
    for (int t = 0; t < 40; ++t)
        pairs.emplace_back(static_cast<Index>(splitmix64(rng) % torus->size()),
                           static_cast<Index>(splitmix64(rng) % torus->size()));
    const auto rep = expansivity_certificate(cat, 0.1, 12, pairs);
    CHECK(rep.expansive_on_sample);

    // Identity orbits never separate beyond the initial distance, so any c
    // at or above some pair distance yields a witness.
    const auto idact = FiniteAction(GeneratedGroup::z(), torus, {PointMap::identity(torus)},
                                    ActionMode::Group);
    const auto rep2 = expansivity_certificate(idact, 0.1, 12, {{0, 1}});
    CHECK_FALSE(rep2.expansive_on_sample);
    REQUIRE(rep2.witness.has_value());
    CHECK(rep2.min_separation == doctest::Approx(torus->dist(0, 1)));

    const auto shift = full_shift(2, 6, 3);
    std::vector<std::pair<Index, Index>> all_pairs;
    for (Index i = 0; i < shift.action.space()->size(); ++i)
        for (Index j = i + 1; j < shift.action.space()->size(); ++j) all_pairs.emplace_back(i, j);
    const auto rep3 = expansivity_certificate(shift.action, 0.5, 6, all_pairs);
    CHECK(rep3.expansive_on_sample);
}

TEST_CASE("separation sets shrink with the horizon") {
    const auto torus = make_torus(16);
    const auto cat = toral_matrix_action(torus, 16, kCat);
    // eps above the diameter: the empty condition already separates.
    CHECK(separation_set(cat, 0, torus->diameter() + 0.1, 0.3, 8) == 0);
    const int r = separation_set(cat, 0, 0.05, 0.3, 12);
    // Hyperbolic separation rate: roughly log(c/eps)/log(lambda_u) steps.
    const double lu = (3.0 + std::sqrt(5.0)) / 2.0;
    const int predicted = static_cast<int>(std::ceil(std::log(0.3 / 0.05) / std::log(lu)));
    CHECK(r >= 1);
    CHECK(r <= predicted + 2);

    const auto shift = full_shift(2, 6, 3);
    const int k = 3;
    const int rs = separation_set(shift.action, 0, std::pow(2.0, -k), 0.5, 6);
    CHECK(rs == k);

    const auto idact = FiniteAction(GeneratedGroup::z(), torus, {PointMap::identity(torus)},
                                    ActionMode::Group);
    CHECK_THROWS_AS(separation_set(idact, 0, 0.05, 0.3, 6), refusal_error);
}

TEST_CASE("build_conjugacy recovers the identity at zero noise") {
    const auto fam = example_family(2, 8, 4);
    // u = h (the exact projection): pseudo-orbits are true orbits.
    const auto rho = fam.rho_identity;
    const double delta = fam.bound + 0.05;
    const auto res = build_conjugacy(fam.h, rho, fam.alpha, fam.beta, delta, 2);
    CHECK(res.eps1 <= 1e-12);
    CHECK(res.equiv_defect <= 1e-9);
    CHECK(res.h.image == fam.h.image);
}

TEST_CASE("build_conjugacy tolerates noise up to the stability envelope") {
    const auto fam = example_family(2, 8, 4);
    // Perturb u within delta/2 by moving images to nearby grid points.
    std::uint64_t rng = 13;
    const double noise = 0.26;  // about two grid cells
    std::vector<Index> img = fam.h.image;
    for (auto& v : img) {
        if (uniform01(rng) < 0.5) continue;
        // Random grid point within the noise radius.
        for (int attempt = 0; attempt < 8; ++attempt) {
            const Index cand = static_cast<Index>(splitmix64(rng) % fam.x->size());
            if (fam.x->dist(v, cand) <= noise) {
                v = cand;
                break;
            }
        }
    }
    const PointMap u(fam.y, fam.x, std::move(img));
    const double lip = Mat2i{1, 3, 2, 4}.operator_norm();
    const double delta = std::max(std::max(distortion(u), net_defect(u)),
                                  (1.0 + lip) * noise) + 0.05;
    const auto res = build_conjugacy(u, fam.rho_identity, fam.alpha, fam.beta, delta, 2);
    CHECK(res.eps1 > 0.0);
    CHECK(d_sup(res.h, u) <= res.eps1 + 1e-9);
    CHECK(res.equiv_defect <= 2.0 * res.eps1 + 1e-9);
}
