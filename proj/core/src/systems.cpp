#include "eqgh/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "eqgh/metric_core.hpp"

namespace eqgh {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

SpacePtr make_circle(double radius, int points) {
    require(radius > 0.0, "make_circle: radius must be > 0");
    require(points >= 2, "make_circle: need at least 2 points");
    const int m = points;
    std::vector<std::string> ids(m);
    for (int i = 0; i < m; ++i) ids[i] = "c" + std::to_string(i);
    std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const int k = std::min(std::abs(i - j), m - std::abs(i - j));
            d[static_cast<std::size_t>(i) * m + j] = radius * 2.0 * kPi * k / m;
        }
    return FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));
}

SpacePtr make_torus(int mesh) {
    require(mesh >= 2, "make_torus: mesh must be >= 2");
    // A circumference-one circle carries exactly the R/Z quotient metric.
    const SpacePtr axis = make_circle(1.0 / (2.0 * kPi), mesh);
    return FiniteMetricSpace::product({axis, axis});
}

SpacePtr product_space(const SpacePtr& a, const SpacePtr& b) {
    return FiniteMetricSpace::product({a, b});
}

PointMap circle_rotation(const SpacePtr& circle, int steps) {
    const int m = static_cast<int>(circle->size());
    std::vector<Index> img(m);
    for (int i = 0; i < m; ++i) img[i] = static_cast<Index>(mod_pos(i + steps, m));
    return PointMap(circle, circle, std::move(img));
}

PointMap torus_matrix_map(const SpacePtr& torus, int mesh, const Mat2i& a) {
    require(torus->is_product() && torus->factors().size() == 2 &&
                torus->size() == static_cast<std::size_t>(mesh) * mesh,
            "torus_matrix_map: space is not a mesh x mesh torus grid");
    std::vector<Index> img(torus->size());
    for (Index idx = 0; idx < torus->size(); ++idx) {
        const std::int64_t i = torus->factor_index(0, idx);
        const std::int64_t j = torus->factor_index(1, idx);
        const Index ti = static_cast<Index>(mod_pos(a.a11 * i + a.a12 * j, mesh));
        const Index tj = static_cast<Index>(mod_pos(a.a21 * i + a.a22 * j, mesh));
        img[idx] = torus->compose_index({ti, tj});
    }
    return PointMap(torus, torus, std::move(img));
}

FiniteAction toral_matrix_action(const SpacePtr& torus, int mesh, const Mat2i& a) {
    const ActionMode mode = a.unimodular() ? ActionMode::Group : ActionMode::Semigroup;
    return FiniteAction(GeneratedGroup::z(), torus, {torus_matrix_map(torus, mesh, a)}, mode);
}

FiniteAction z2_matrix_action(const SpacePtr& torus, int mesh, const Mat2i& a, const Mat2i& b) {
    const ActionMode mode =
        (a.unimodular() && b.unimodular()) ? ActionMode::Group : ActionMode::Semigroup;
    return FiniteAction(GeneratedGroup::z2(), torus,
                        {torus_matrix_map(torus, mesh, a), torus_matrix_map(torus, mesh, b)}, mode);
}

ExampleFamily example_family(int n, int torus_mesh, int circle_mesh) {
    require(n >= 1, "example_family: n must be >= 1");
    require(circle_mesh % 2 == 0, "example_family: even circle mesh needed for the diameter");

    ExampleFamily fam;
    fam.n = n;
    fam.torus_mesh = torus_mesh;
    fam.circle_mesh = circle_mesh;
    fam.x = make_torus(torus_mesh);
    const SpacePtr circle = make_circle(1.0 / n, circle_mesh);
    fam.y = FiniteMetricSpace::product({circle, circle, fam.x});
    // After flattening, Y has factors (C, C, axis, axis).

    // Projection h and section f.
    {
        std::vector<Index> himg(fam.y->size());
        for (Index idx = 0; idx < fam.y->size(); ++idx)
            himg[idx] = fam.x->compose_index(
                {fam.y->factor_index(2, idx), fam.y->factor_index(3, idx)});
        fam.h = PointMap(fam.y, fam.x, std::move(himg));
        std::vector<Index> fimg(fam.x->size());
        for (Index idx = 0; idx < fam.x->size(); ++idx)
            fimg[idx] = fam.y->compose_index(
                {0, 0, fam.x->factor_index(0, idx), fam.x->factor_index(1, idx)});
        fam.f = PointMap(fam.x, fam.y, std::move(fimg));
    }

    // Commuting matrix pair; determinants -2 and -6, so the action is a
    // semigroup one.
    const Mat2i a{1, 3, 2, 4};
    const Mat2i b{-3, 3, 2, 0};
    fam.alpha = z2_matrix_action(fam.x, torus_mesh, a, b);

    const PointMap rot = circle_rotation(circle, 1);
    const PointMap amap = torus_matrix_map(fam.x, torus_mesh, a);
    const PointMap bmap = torus_matrix_map(fam.x, torus_mesh, b);
    auto lift = [&](const PointMap& cmap, const PointMap& xmap) {
        std::vector<Index> img(fam.y->size());
        for (Index idx = 0; idx < fam.y->size(); ++idx) {
            const Index c1 = cmap(fam.y->factor_index(0, idx));
            const Index c2 = cmap(fam.y->factor_index(1, idx));
            const Index xi = fam.x->compose_index(
                {fam.y->factor_index(2, idx), fam.y->factor_index(3, idx)});
            const Index xo = xmap(xi);
            img[idx] = fam.y->compose_index(
                {c1, c2, fam.x->factor_index(0, xo), fam.x->factor_index(1, xo)});
        }
        return PointMap(fam.y, fam.y, std::move(img));
    };
    fam.beta = FiniteAction(GeneratedGroup::z2(), fam.y, {lift(rot, amap), lift(rot, bmap)},
                            ActionMode::Semigroup);
    fam.rho_identity = Homomorphism{GeneratedGroup::z2(), GeneratedGroup::z2(),
                                    {GeneratedGroup::z2().generator(0), GeneratedGroup::z2().generator(1)}};

    fam.bound = std::sqrt(2.0) * kPi / n;
    // Integer matrices and grid rotations act on the grids exactly, so the
    // measured snapping error is zero; one torus mesh cell is still granted
    // as the discretization allowance.
    fam.slack = 1.0 / torus_mesh;

    fam.h_distortion = distortion(fam.h);
    fam.h_net = net_defect(fam.h);
    fam.f_distortion = distortion(fam.f);
    fam.f_net = net_defect(fam.f);
    fam.f_equiv = equivariant_defect(fam.f, fam.alpha, fam.beta);

    certify(fam.h_distortion <= fam.bound + fam.slack, "example_family: h distortion bound failed");
    certify(fam.h_net <= kTol, "example_family: projection should be surjective");
    certify(fam.f_distortion <= kTol, "example_family: section should be isometric");
    certify(fam.f_net <= fam.bound + fam.slack, "example_family: f net bound failed");
    certify(fam.f_equiv <= fam.bound + fam.slack, "example_family: f equivariance bound failed");
    for (std::size_t s = 0; s < 2; ++s) {
        const PointMap lhs = PointMap::compose(fam.alpha.generator_maps()[s], fam.h);
        const PointMap rhs = PointMap::compose(fam.h, fam.beta.generator_maps()[s]);
        certify(lhs.image == rhs.image, "example_family: h does not intertwine exactly");
    }
    return fam;
}

OneSidedFamily example_one_sided_family(int n, int torus_mesh, int circle_mesh) {
    require(n >= 1, "example_one_sided_family: n must be >= 1");
    require(circle_mesh % 2 == 0, "example_one_sided_family: even circle mesh required");

    OneSidedFamily fam;
    fam.x = make_torus(torus_mesh);
    const SpacePtr circle = make_circle(1.0 / n, circle_mesh);
    fam.y = FiniteMetricSpace::product({circle, circle, fam.x});

    const Mat2i a{1, 2, 3, 4};
    fam.alpha = toral_matrix_action(fam.x, torus_mesh, a);

    const PointMap rot = circle_rotation(circle, 1);
    const PointMap amap = torus_matrix_map(fam.x, torus_mesh, a);
    const PointMap xid = PointMap::identity(fam.x);
    auto lift = [&](const PointMap& cmap, const PointMap& xmap) {
        std::vector<Index> img(fam.y->size());
        for (Index idx = 0; idx < fam.y->size(); ++idx) {
            const Index c1 = cmap(fam.y->factor_index(0, idx));
            const Index c2 = cmap(fam.y->factor_index(1, idx));
            const Index xi = fam.x->compose_index(
                {fam.y->factor_index(2, idx), fam.y->factor_index(3, idx)});
            const Index xo = xmap(xi);
            img[idx] = fam.y->compose_index(
                {c1, c2, fam.x->factor_index(0, xo), fam.x->factor_index(1, xo)});
        }
        return PointMap(fam.y, fam.y, std::move(img));
    };
    // (1,0) carries the hyperbolic generator, (0,1) only turns the circles.
    fam.beta = FiniteAction(GeneratedGroup::z2(), fam.y, {lift(rot, amap), lift(rot, xid)},
                            ActionMode::Semigroup);
    fam.rho = Homomorphism{GeneratedGroup::z(), GeneratedGroup::z2(),
                           {GeneratedGroup::z2().generator(0)}};

    std::vector<Index> himg(fam.y->size());
    for (Index idx = 0; idx < fam.y->size(); ++idx)
        himg[idx] =
            fam.x->compose_index({fam.y->factor_index(2, idx), fam.y->factor_index(3, idx)});
    fam.h = PointMap(fam.y, fam.x, std::move(himg));

    fam.bound = std::sqrt(2.0) * kPi / n;
    fam.slack = 1.0 / torus_mesh;
    return fam;
}

IsometryFamily example_isometry_family(int n, int mesh, int steps) {
    require(n >= 1, "example_isometry_family: n must be >= 1");
    require(mesh % 2 == 0, "example_isometry_family: even mesh required");
    // steps coprime to the mesh makes the rotation a unique-ergodicity
    // surrogate; other values are still legal actions.

    IsometryFamily fam;
    fam.n = n;
    fam.mesh = mesh;
    fam.steps = steps;
    const SpacePtr small = make_circle(1.0 / n, mesh);
    fam.x = make_circle(1.0, mesh);
    fam.xn = FiniteMetricSpace::product({small, fam.x});

    std::vector<Index> himg(fam.xn->size());
    for (Index idx = 0; idx < fam.xn->size(); ++idx) himg[idx] = fam.xn->factor_index(1, idx);
    fam.h = PointMap(fam.xn, fam.x, std::move(himg));
    std::vector<Index> fimg(fam.x->size());
    for (Index idx = 0; idx < fam.x->size(); ++idx) fimg[idx] = fam.xn->compose_index({0, idx});
    fam.f = PointMap(fam.x, fam.xn, std::move(fimg));

    // The same rotation angle on both factors.
    const PointMap rot_small = circle_rotation(small, steps);
    const PointMap rot_big = circle_rotation(fam.x, steps);
    std::vector<Index> gen(fam.xn->size());
    for (Index idx = 0; idx < fam.xn->size(); ++idx)
        gen[idx] = fam.xn->compose_index(
            {rot_small(fam.xn->factor_index(0, idx)), rot_big(fam.xn->factor_index(1, idx))});
    fam.action_n =
        FiniteAction(GeneratedGroup::z(), fam.xn, {PointMap(fam.xn, fam.xn, std::move(gen))},
                     ActionMode::Group);
    fam.action = FiniteAction(GeneratedGroup::z(), fam.x, {rot_big}, ActionMode::Group);

    fam.bound = kPi / n;
    fam.h_distortion = distortion(fam.h);
    fam.h_net = net_defect(fam.h);
    fam.h_equiv = equivariant_defect(fam.h, fam.action_n, fam.action);
    fam.f_distortion = distortion(fam.f);
    fam.f_net = net_defect(fam.f);
    fam.f_equiv = equivariant_defect(fam.f, fam.action, fam.action_n);

    certify(fam.h_distortion <= fam.bound + kTol, "isometry_family: h distortion bound failed");
    certify(fam.h_net <= kTol, "isometry_family: projection should be surjective");
    certify(fam.h_equiv <= kTol, "isometry_family: h should intertwine exactly");
    certify(fam.f_distortion <= kTol, "isometry_family: section should be isometric");
    certify(fam.f_net <= fam.bound + kTol, "isometry_family: f net bound failed");
    certify(fam.f_equiv <= fam.bound + kTol, "isometry_family: f equivariance bound failed");
    return fam;
}

ShiftSystem full_shift(int alphabet, int window, std::uint64_t seed) {
    require(alphabet >= 2, "full_shift: alphabet must have >= 2 symbols");
    require(window >= 2, "full_shift: window must be >= 2");
    std::size_t count = 1;
    for (int i = 0; i < window; ++i) {
        count *= static_cast<std::size_t>(alphabet);
        require(count <= 4096, "full_shift: word count guard (4096) exceeded");
    }

    auto symbol = [&](std::size_t word, int pos) {
        std::size_t w = word;
        for (int i = window - 1; i > pos; --i) w /= static_cast<std::size_t>(alphabet);
        return static_cast<int>(w % static_cast<std::size_t>(alphabet));
    };

    std::vector<std::string> ids(count);
    for (std::size_t w = 0; w < count; ++w) {
        std::string s;
        for (int i = 0; i < window; ++i) s += static_cast<char>('0' + symbol(w, i));
        ids[w] = s;
    }
    std::vector<double> d(count * count, 0.0);
    for (std::size_t u = 0; u < count; ++u)
        for (std::size_t v = 0; v < count; ++v) {
            if (u == v) continue;
            int first = window;
            for (int i = 0; i < window; ++i)
                if (symbol(u, i) != symbol(v, i)) {
                    first = i;
                    break;
                }
            d[u * count + v] = std::pow(2.0, -first);
        }
    SpacePtr space = FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));

    // Shift left; the vacated last column takes a per-word symbol chosen
    // once from the seed ("boundary-approximate").
    std::uint64_t state = seed ^ 0x51f7ULL;
    std::vector<Index> img(count);
    for (std::size_t w = 0; w < count; ++w) {
        const std::size_t tail = (w * static_cast<std::size_t>(alphabet)) % count;
        const std::size_t fresh = splitmix64(state) % static_cast<std::size_t>(alphabet);
        img[w] = static_cast<Index>(tail + fresh);
    }
    ShiftSystem sys{FiniteAction(GeneratedGroup::z(), space,
                                 {PointMap(space, space, std::move(img))}, ActionMode::Semigroup),
                    alphabet, window, true};
    return sys;
}

}  // namespace eqgh
