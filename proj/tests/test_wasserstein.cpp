#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eqgh/systems.hpp"
#include "eqgh/wasserstein.hpp"
#include "oracles.hpp"

using namespace eqgh;

namespace {

constexpr double kPi = std::numbers::pi;

SpacePtr line_space(std::initializer_list<double> xs) {
    std::vector<double> v(xs);
    std::vector<std::string> ids;
    std::vector<double> d(v.size() * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        ids.push_back("x" + std::to_string(i));
        for (std::size_t j = 0; j < v.size(); ++j) d[i * v.size() + j] = std::abs(v[i] - v[j]);
    }
    return FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));
}

}  // namespace

TEST_CASE("measures normalize and validate") {
    const auto sp = line_space({0, 1, 2});
    const auto mu = DiscreteMeasure(sp, {2.0, 1.0, 1.0});
    CHECK(mu.weight(0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(DiscreteMeasure(sp, {1.0, -0.1, 0.0}), precondition_error);
    CHECK_THROWS_AS(DiscreteMeasure(sp, {0.0, 0.0, 0.0}), precondition_error);
    CHECK(DiscreteMeasure::dirac(sp, 1).support() == std::vector<Index>{1});
}

TEST_CASE("transport cost of explicit plans") {
    const auto sp = line_space({0, 1});
    const auto mu = DiscreteMeasure(sp, {1.0, 0.0});
    const auto nu = DiscreteMeasure(sp, {0.0, 1.0});
    // Product coupling mu (x) nu: all mass on the off-diagonal cell.
    const Coupling prod(mu, nu, {0.0, 1.0, 0.0, 0.0});
    CHECK(transport_cost(prod, 1.0) == doctest::Approx(1.0));

    const auto uni = DiscreteMeasure::uniform(sp);
    const Coupling diag(uni, uni, {0.5, 0.0, 0.0, 0.5});
    CHECK(transport_cost(diag, 2.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(Coupling(mu, nu, {1.0, 0.0, 0.0, 0.0}), precondition_error);

    const auto l3 = line_space({0, 1, 2});
    const auto u3 = DiscreteMeasure::uniform(l3);
    std::vector<double> m(9, 1.0 / 9.0);
    const Coupling indep(u3, u3, std::move(m));
    // Hand sum: (1/9) * (4*1 + 2*2) = 8/9 for p = 1.
    CHECK(transport_cost(indep, 1.0) == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("wasserstein on closed-form instances") {
    const auto sp = line_space({0, 1, 2, 3});
    const auto mu = DiscreteMeasure(sp, {0.5, 0.5, 0.0, 0.0});
    const auto nu = DiscreteMeasure(sp, {0.0, 0.0, 0.5, 0.5});
    for (double p : {1.0, 2.0}) {
        const auto r = wasserstein(mu, nu, p);
        CHECK(r.value == doctest::Approx(2.0));  // shift by two, any p
    }
    CHECK(wasserstein(mu, mu, 2.0).value == doctest::Approx(0.0));
    const auto d0 = DiscreteMeasure::dirac(sp, 0);
    const auto d3 = DiscreteMeasure::dirac(sp, 3);
    CHECK(wasserstein(d0, d3, 1.5).value == doctest::Approx(3.0));
    CHECK_THROWS_AS(wasserstein(mu, nu, 0.5), precondition_error);
}

TEST_CASE("wasserstein equals the polytope-vertex oracle") {
    std::uint64_t rng = 314;
    for (int t = 0; t < 30; ++t) {
        const auto sp = oracle::random_real_space(rng, 6);
        const auto mu = oracle::random_sparse_measure(rng, sp, 2 + splitmix64(rng) % 4);
        const auto nu = oracle::random_sparse_measure(rng, sp, 2 + splitmix64(rng) % 4);
        const double p = splitmix64(rng) % 2 ? 1.0 : 2.0;
        const auto got = wasserstein(mu, nu, p);
        const double want = oracle::polytope_transport_cost(mu, nu, p);
        CHECK(got.cost == doctest::Approx(want).epsilon(1e-9));
        CHECK(transport_cost(got.plan, p) == doctest::Approx(got.cost).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein is a metric on random triples") {
    std::uint64_t rng = 2718;
    const auto sp = oracle::random_real_space(rng, 7);
    for (int t = 0; t < 40; ++t) {
        const auto a = oracle::random_measure(rng, sp);
        const auto b = oracle::random_measure(rng, sp);
        const auto c = oracle::random_measure(rng, sp);
        const double p = splitmix64(rng) % 2 ? 1.0 : 2.0;
        const double ab = wasserstein(a, b, p).value;
        const double ba = wasserstein(b, a, p).value;
        const double ac = wasserstein(a, c, p).value;
        const double cb = wasserstein(c, b, p).value;
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ab <= ac + cb + 1e-9);
        CHECK(wasserstein(a, a, p).value <= 1e-9);
    }
}

TEST_CASE("pushforward behaves like an image measure") {
    const auto sp = line_space({0, 1, 2, 3});
    const auto mu = DiscreteMeasure(sp, {0.1, 0.2, 0.3, 0.4});
    CHECK(pushforward(PointMap::identity(sp), mu).weights() == mu.weights());
    const auto delta = pushforward(PointMap::constant(sp, sp, 2), mu);
    CHECK(delta.weight(2) == doctest::Approx(1.0));
    // 2-to-1 fold.
    const PointMap fold(sp, sp, {0, 0, 1, 1});
    const auto folded = pushforward(fold, mu);
    CHECK(folded.weight(0) == doctest::Approx(0.3));
    CHECK(folded.weight(1) == doctest::Approx(0.7));
    double total = 0.0;
    for (double w : folded.weights()) total += w;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("contraction inequality, randomized") {
    const auto circle = make_circle(1.0, 12);
    const auto uni = DiscreteMeasure::uniform(circle);
    const auto id = PointMap::identity(circle);
    const auto rot = circle_rotation(circle, 1);
    const auto same = contraction_check(id, id, uni, 2.0);
    CHECK(same.lhs == doctest::Approx(0.0));
    CHECK(same.rhs == doctest::Approx(0.0));
    const auto step = contraction_check(id, rot, uni, 1.0);
    CHECK(step.rhs == doctest::Approx(2.0 * kPi / 12.0));
    CHECK(step.ok);

    std::uint64_t rng = 161803;
    const auto sp = oracle::random_real_space(rng, 6);
    for (int t = 0; t < 200; ++t) {
        std::vector<Index> fi(sp->size()), gi(sp->size());
        for (auto& v : fi) v = static_cast<Index>(splitmix64(rng) % sp->size());
        for (auto& v : gi) v = static_cast<Index>(splitmix64(rng) % sp->size());
        const auto mu = oracle::random_measure(rng, sp);
        const double p = splitmix64(rng) % 2 ? 1.0 : 2.0;
        const auto res =
            contraction_check(PointMap(sp, sp, fi), PointMap(sp, sp, gi), mu, p);
        CHECK(res.ok);
    }
}

TEST_CASE("lift_gha evaluates the formula and the sampled bounds") {
    // Two-point spaces of diameter one: eps 0.01, p 1 gives exactly 0.26.
    const auto a = line_space({0.0, 1.0});
    const auto b = line_space({0.0, 1.0});
    const auto f = PointMap(a, b, {0, 1});
    std::vector<DiscreteMeasure> sample{DiscreteMeasure::dirac(a, 0), DiscreteMeasure::dirac(a, 1),
                                        DiscreteMeasure::uniform(a)};
    const auto rep = lift_gha(f, 0.01, 1.0, sample);
    CHECK(rep.eps_tilde == doctest::Approx(0.26).epsilon(1e-12));
    CHECK(rep.worst_pair_gap <= 1e-12);

    // Identity with eps = 0: everything collapses to zero.
    const auto rep0 = lift_gha(PointMap::identity(a), 0.0, 2.0, sample,
                               {DiscreteMeasure::uniform(a)});
    CHECK(rep0.eps_tilde == doctest::Approx(0.0));
    CHECK(rep0.worst_net == doctest::Approx(0.0));

    CHECK_THROWS_AS(lift_gha(PointMap::constant(a, b, 0), 0.01, 1.0, sample), precondition_error);
}

TEST_CASE("lift_gha on the collapse family with measures") {
    const auto fam = example_family(4, 8, 4);
    std::uint64_t rng = 55;
    std::vector<DiscreteMeasure> sample;
    for (int t = 0; t < 6; ++t) sample.push_back(oracle::random_measure(rng, fam.x));
    std::vector<DiscreteMeasure> targets;
    for (int t = 0; t < 3; ++t) targets.push_back(oracle::random_measure(rng, fam.y));
    const double eps = fam.bound;  // the section is exact, net defect sqrt2 pi / n
    const auto rep = lift_gha(fam.f, eps, 1.0, sample, targets, &fam.alpha, &fam.beta, 1);
    CHECK(rep.pairs_checked == 15);
    CHECK(rep.worst_pair_gap <= rep.eps_tilde + 1e-9);
    CHECK(rep.worst_equiv <= eps + 1e-9);
}

TEST_CASE("folner boxes and averages") {
    const auto z = GeneratedGroup::z();
    const auto f8 = folner_box(z, 8);
    CHECK(f8.elements.size() == 8);
    CHECK(f8.boundary_ratio == doctest::Approx(0.25));
    const auto z2box = folner_box(GeneratedGroup::z2(), 4);
    CHECK(z2box.elements.size() == 16);

    const auto circle = make_circle(1.0, 8);
    const auto act = FiniteAction(z, circle, {circle_rotation(circle, 2)}, ActionMode::Group);
    const auto id = PointMap::identity(circle);

    // Invariant measure stays put.
    const auto uni = DiscreteMeasure::uniform(circle);
    const auto avg_uni = folner_average(uni, act, id, f8);
    for (Index i = 0; i < circle->size(); ++i)
        CHECK(avg_uni.weight(i) == doctest::Approx(uni.weight(i)));

    // Dirac spreads uniformly over its orbit once the box covers the period.
    const auto avg = folner_average(DiscreteMeasure::dirac(circle, 0), act, id, folner_box(z, 4));
    for (Index i : {0, 2, 4, 6}) CHECK(avg.weight(i) == doctest::Approx(0.25));
    for (Index i : {1, 3, 5, 7}) CHECK(avg.weight(i) == doctest::Approx(0.0));

    // Semigroup actions refuse averaging.
    const auto torus = make_torus(4);
    const auto semi = toral_matrix_action(torus, 4, Mat2i{1, 3, 2, 4});
    CHECK_THROWS_AS(
        folner_average(DiscreteMeasure::uniform(torus), semi, PointMap::identity(torus),
                       folner_box(z, 4)),
        refusal_error);
}

TEST_CASE("cyclic groups average over the whole cycle") {
    const auto circle = make_circle(1.0, 8);
    const auto act = FiniteAction(GeneratedGroup::cyclic(8), circle, {circle_rotation(circle, 1)},
                                  ActionMode::Group);
    const auto box = folner_box(GeneratedGroup::cyclic(8), 8);
    CHECK(box.boundary_ratio == doctest::Approx(0.0));
    const auto avg =
        folner_average(DiscreteMeasure::dirac(circle, 2), act, PointMap::identity(circle), box);
    for (Index i = 0; i < circle->size(); ++i) CHECK(avg.weight(i) == doctest::Approx(0.125));
    CHECK(invariance_defect(avg, act, 1.0) <= 1e-12);
    CHECK_THROWS_AS(folner_box(GeneratedGroup::free_monoid(2), 4), refusal_error);
}

TEST_CASE("invariant_net_lift rejects non-invariant families") {
    const auto circle = make_circle(1.0, 8);
    const auto act = FiniteAction(GeneratedGroup::z(), circle, {circle_rotation(circle, 1)},
                                  ActionMode::Group);
    const auto box = folner_box(GeneratedGroup::z(), 8);
    std::vector<DiscreteMeasure> family{DiscreteMeasure::dirac(circle, 0)};  // not invariant
    CHECK_THROWS_AS(invariant_net_lift(family, PointMap::identity(circle), 0.01, 1.0, act, box,
                                       1e-9, {}, &act),
                    precondition_error);
}

TEST_CASE("folner averaging is affine in the measure") {
    const auto circle = make_circle(1.0, 12);
    const auto act = FiniteAction(GeneratedGroup::z(), circle, {circle_rotation(circle, 5)},
                                  ActionMode::Group);
    const auto id = PointMap::identity(circle);
    const auto box = folner_box(GeneratedGroup::z(), 6);
    std::uint64_t rng = 47;
    for (int t = 0; t < 10; ++t) {
        const auto mu = oracle::random_measure(rng, circle);
        const auto nu = oracle::random_measure(rng, circle);
        const double lam = uniform01(rng);
        std::vector<double> mix(circle->size());
        for (Index i = 0; i < circle->size(); ++i)
            mix[i] = lam * mu.weight(i) + (1.0 - lam) * nu.weight(i);
        const auto avg_mix = folner_average(DiscreteMeasure(circle, mix), act, id, box);
        const auto a1 = folner_average(mu, act, id, box);
        const auto a2 = folner_average(nu, act, id, box);
        for (Index i = 0; i < circle->size(); ++i)
            CHECK(avg_mix.weight(i) ==
                  doctest::Approx(lam * a1.weight(i) + (1.0 - lam) * a2.weight(i)).epsilon(1e-12));
    }
}

TEST_CASE("invariance defect: diracs move by the rotation arc") {
    const auto circle = make_circle(1.0, 16);
    const auto act = FiniteAction(GeneratedGroup::z(), circle, {circle_rotation(circle, 3)},
                                  ActionMode::Group);
    CHECK(invariance_defect(DiscreteMeasure::uniform(circle), act, 1.0) == doctest::Approx(0.0));
    const double arc = 3.0 * 2.0 * kPi / 16.0;
    CHECK(invariance_defect(DiscreteMeasure::dirac(circle, 0), act, 1.0) == doctest::Approx(arc));

    // Averaged defect obeys the boundary-ratio envelope and shrinks with n.
    const auto id = PointMap::identity(circle);
    double last = std::numeric_limits<double>::infinity();
    for (int n : {4, 8, 16}) {
        const auto box = folner_box(GeneratedGroup::z(), n);
        const auto avg = folner_average(DiscreteMeasure::dirac(circle, 0), act, id, box);
        const double defect = invariance_defect(avg, act, 1.0);
        CHECK(defect <= 2.0 * circle->diameter() * box.boundary_ratio + 1e-9);
        CHECK(defect <= last + 1e-9);
        last = defect;
    }
}

TEST_CASE("invariant_net_lift computes D(eps) and verifies the witnesses") {
    // Diameter-one spaces, eps 0.01, p 1: D = 0.46 exactly.
    const auto a = line_space({0.0, 1.0});
    const auto act = FiniteAction(GeneratedGroup::z(), a, {PointMap::identity(a)},
                                  ActionMode::Group);
    const auto box = folner_box(GeneratedGroup::z(), 4);
    std::vector<DiscreteMeasure> family{DiscreteMeasure::uniform(a)};
    const auto rep = invariant_net_lift(family, PointMap::identity(a), 0.01, 1.0, act, box, 1e-9,
                                        {DiscreteMeasure::uniform(a)}, &act);
    CHECK(rep.d_eps == doctest::Approx(0.46).epsilon(1e-12));
    CHECK(rep.worst_pair_gap == doctest::Approx(0.0));
    CHECK(rep.worst_witness_dist <= rep.d_eps + rep.slack + 1e-9);
}

TEST_CASE("invariant_net_lift across the rotation family") {
    // Section into X_n = S^1_{1/n} x S^1; the lone rotation-invariant measure
    // upstairs is uniform, and orbit averages downstairs witness the net.
    const auto fam = example_isometry_family(4, 8, 1);
    std::vector<DiscreteMeasure> family{DiscreteMeasure::uniform(fam.x)};
    const auto box = folner_box(GeneratedGroup::z(), 8);
    std::vector<DiscreteMeasure> witnesses{
        DiscreteMeasure::uniform(fam.xn),
        folner_average(DiscreteMeasure::dirac(fam.xn, 3), fam.action_n, PointMap::identity(fam.xn),
                       box)};
    const auto rep = invariant_net_lift(family, fam.f, fam.bound, 1.0, fam.action_n, box, 1e-9,
                                        witnesses, &fam.action);
    CHECK(rep.images.size() == 1);
    CHECK(rep.worst_witness_dist <= rep.d_eps + rep.slack + 1e-9);
}

TEST_CASE("invariant diameter: identity action spreads, rotations collapse") {
    const auto two = line_space({0.0, 1.0});
    const auto idact = FiniteAction(GeneratedGroup::z(), two, {PointMap::identity(two)},
                                    ActionMode::Group);
    const auto est = invariant_diameter(idact, 1.0, 4, folner_box(GeneratedGroup::z(), 4), 3);
    CHECK(est.diameter == doctest::Approx(1.0));  // the two dirac corners stay apart
    CHECK(est.averaging_defect == doctest::Approx(0.0));

    const auto circle = make_circle(1.0, 16);
    const auto rot = FiniteAction(GeneratedGroup::z(), circle, {circle_rotation(circle, 3)},
                                  ActionMode::Group);
    const auto est2 = invariant_diameter(rot, 1.0, 4, folner_box(GeneratedGroup::z(), 16), 3);
    CHECK(est2.diameter <= 1e-9);  // unique ergodicity surrogate: everything averages to uniform
    CHECK(est2.averaging_defect <= 1e-9);
}
