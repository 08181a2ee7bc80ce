#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace eqgh::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All maps src -> dst as image arrays, with their distortion, sorted by it.
struct MapTable {
    std::vector<std::vector<Index>> maps;
    std::vector<double> dis;
};

MapTable all_maps(const FiniteMetricSpace& src, const FiniteMetricSpace& dst) {
    const std::size_t n = src.size(), m = dst.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= m;
        require(total <= 2'000'000, "brute_gh: map enumeration guard exceeded");
    }
    MapTable t;
    t.maps.reserve(total);
    t.dis.reserve(total);
    std::vector<Index> f(n, 0);
    while (true) {
        double dis = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                dis = std::max(dis, std::abs(dst.dist(f[i], f[j]) - src.dist(i, j)));
        t.maps.push_back(f);
        t.dis.push_back(dis);
        std::size_t k = 0;
        while (k < n && ++f[k] == m) f[k++] = 0;
        if (k == n) break;
    }
    return t;
}

}  // namespace

double brute_gh(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
    MapTable fs = all_maps(x, y);
    MapTable gs = all_maps(y, x);

    // Process in order of one-sided distortion so dominated pairs stop early.
    std::vector<std::size_t> forder(fs.maps.size()), gorder(gs.maps.size());
    for (std::size_t i = 0; i < forder.size(); ++i) forder[i] = i;
    for (std::size_t i = 0; i < gorder.size(); ++i) gorder[i] = i;
    std::sort(forder.begin(), forder.end(),
              [&](std::size_t a, std::size_t b) { return fs.dis[a] < fs.dis[b]; });
    std::sort(gorder.begin(), gorder.end(),
              [&](std::size_t a, std::size_t b) { return gs.dis[a] < gs.dis[b]; });

    double best = kInf;
    for (std::size_t fi : forder) {
        if (fs.dis[fi] >= best) break;
        const auto& f = fs.maps[fi];
        for (std::size_t gi : gorder) {
            if (gs.dis[gi] >= best) break;
            const auto& g = gs.maps[gi];
            double dis = std::max(fs.dis[fi], gs.dis[gi]);
            for (Index i = 0; i < x.size() && dis < best; ++i)
                for (Index j = 0; j < y.size(); ++j) {
                    dis = std::max(dis, std::abs(x.dist(i, g[j]) - y.dist(f[i], j)));
                    if (dis >= best) break;
                }
            if (dis < best) best = dis;
        }
    }
    return best / 2.0;
}

double polytope_transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    require(mu.space()->uid() == nu.space()->uid(), "polytope oracle: measures on different spaces");
    const auto& sp = *mu.space();
    const auto rows = mu.support();
    const auto cols = nu.support();
    const std::size_t m = rows.size(), n = cols.size();
    require(m >= 1 && n >= 1, "polytope oracle: empty support");

    std::vector<double> cost(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = std::pow(sp.dist(rows[i], cols[j]), p);
    std::vector<double> a(m), b(n);
    for (std::size_t i = 0; i < m; ++i) a[i] = mu.weights()[rows[i]];
    for (std::size_t j = 0; j < n; ++j) b[j] = nu.weights()[cols[j]];

    // Vertices of the transportation polytope are supported on spanning
    // trees of K_{m,n}. Trees are enumerated as parent assignments toward
    // the root (row 0): every non-root node points to a node of the other
    // side, and cyclic assignments are skipped. Flows follow from subtree
    // balances; a negative flow prunes the tree as infeasible.
    const std::size_t v_count = m + n;  // rows first, then columns
    std::size_t combos = 1;
    for (std::size_t i = 1; i < m; ++i) {
        combos *= n;
        require(combos <= 100'000'000, "polytope oracle: size guard exceeded");
    }
    for (std::size_t j = 0; j < n; ++j) {
        combos *= m;
        require(combos <= 100'000'000, "polytope oracle: size guard exceeded");
    }

    std::vector<std::size_t> parent(v_count, 0);  // parent[v] in opposite side's indexing
    std::vector<int> state(v_count);
    std::vector<double> balance(v_count);
    std::vector<std::size_t> order(v_count), path;
    std::vector<int> depth(v_count);
    path.reserve(v_count);

    double best = kInf;
    while (true) {
        // Cycle check: walk each node to the root, marking the path.
        std::fill(state.begin(), state.end(), 0);
        bool ok = true;
        for (std::size_t v = 0; v < v_count && ok; ++v) {
            std::size_t u = v;
            path.clear();
            while (u != 0 && state[u] == 0) {
                path.push_back(u);
                state[u] = 2;  // in progress
                u = u < m ? m + parent[u] : parent[u];
            }
            if (state[u] == 2 && u != 0) ok = false;  // walked into our own path
            for (std::size_t w : path) state[w] = 1;
        }
        if (ok) {
            // Depths, then accumulate subtree balances bottom-up.
            std::fill(depth.begin(), depth.end(), -1);
            depth[0] = 0;
            bool progressed = true;
            while (progressed) {
                progressed = false;
                for (std::size_t v = 1; v < v_count; ++v) {
                    if (depth[v] >= 0) continue;
                    const std::size_t pu = v < m ? m + parent[v] : parent[v];
                    if (depth[pu] >= 0) {
                        depth[v] = depth[pu] + 1;
                        progressed = true;
                    }
                }
            }
            for (std::size_t v = 0; v < v_count; ++v) {
                order[v] = v;
                balance[v] = v < m ? a[v] : -b[v - m];
            }
            std::sort(order.begin(), order.end(),
                      [&](std::size_t u, std::size_t v) { return depth[u] > depth[v]; });
            double total = 0.0;
            bool feasible = true;
            for (std::size_t v : order) {
                if (v == 0) continue;
                const std::size_t pu = v < m ? m + parent[v] : parent[v];
                // Edge (row, col) flow: subtree net supply, oriented so that
                // flow runs from the row side to the column side.
                const double flow = v < m ? balance[v] : -balance[v];
                if (flow < -1e-12) {
                    feasible = false;
                    break;
                }
                const std::size_t row = v < m ? v : pu;
                const std::size_t col = v < m ? pu - m : v - m;
                total += std::max(flow, 0.0) * cost[row * n + col];
                balance[pu] += balance[v];
                if (total >= best) {
                    feasible = false;  // cost already dominated
                    break;
                }
            }
            if (feasible) best = std::min(best, total);
        }
        // Next parent assignment (mixed radix; row 0 is the root).
        std::size_t v = 1;
        while (v < v_count) {
            const std::size_t radix = v < m ? n : m;
            if (++parent[v] < radix) break;
            parent[v++] = 0;
        }
        if (v == v_count) break;
    }
    require(best < kInf, "polytope oracle: no feasible tree found");
    return best;
}

std::vector<Vec2> dense_shadowing_solve(const PseudoOrbit& po, const Mat2i& a) {
    require(po.group.kind() == GroupKind::Z, "dense solve: Z windows only");
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    for (std::size_t k = 0; k < po.window.size(); ++k) order.emplace_back(po.window[k].a, k);
    std::sort(order.begin(), order.end());
    const std::size_t n = order.size();
    std::vector<Vec2> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = po.values[order[k].second];

    Eigen::Matrix2d mat;
    mat << static_cast<double>(a.a11), static_cast<double>(a.a12), static_cast<double>(a.a21),
        static_cast<double>(a.a22);
    const Eigen::EigenSolver<Eigen::Matrix2d> es(mat);
    const auto lam = es.eigenvalues();
    require(std::abs(std::abs(lam(0)) - 1.0) > 1e-6 && std::abs(std::abs(lam(1)) - 1.0) > 1e-6,
            "dense solve: matrix is not hyperbolic");

    const std::size_t dim = 2 * n;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const Vec2 e = torus_lift(p[k + 1], torus_wrap(a.apply(p[k])));
        // y_{k+1} - A y_k = -e_k   (two rows)
        for (int r = 0; r < 2; ++r) {
            sys(2 * k + r, 2 * (k + 1) + r) = 1.0;
            sys(2 * k + r, 2 * k + 0) = -mat(r, 0);
            sys(2 * k + r, 2 * k + 1) = -mat(r, 1);
        }
        rhs(2 * k + 0) = -e.x;
        rhs(2 * k + 1) = -e.y;
    }
    // Boundary rows: stable coordinate of y_0 and unstable coordinate of
    // y_{N-1} vanish, expressed through rows of V^-1. Complex pairs share
    // modulus, so both rows land on the same end.
    Eigen::Matrix2d v;
    Eigen::Vector2d mods;
    if (lam.imag().cwiseAbs().maxCoeff() > 1e-9) {
        const auto vec = es.eigenvectors();
        v.col(0) = vec.col(0).real();
        v.col(1) = vec.col(0).imag();
        mods << std::abs(lam(0)), std::abs(lam(0));
    } else {
        const auto vec = es.eigenvectors();
        v.col(0) = vec.col(0).real();
        v.col(1) = vec.col(1).real();
        mods << std::abs(lam(0).real()), std::abs(lam(1).real());
    }
    const Eigen::Matrix2d vinv = v.inverse();
    for (int c = 0; c < 2; ++c) {
        const std::size_t row = 2 * (n - 1) + c;
        const std::size_t target = mods(c) < 1.0 ? 0 : n - 1;  // stable pins the left end
        sys(row, 2 * target + 0) = vinv(c, 0);
        sys(row, 2 * target + 1) = vinv(c, 1);
        rhs(row) = 0.0;
    }
    const Eigen::VectorXd y = sys.fullPivLu().solve(rhs);
    std::vector<Vec2> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = {y(2 * k), y(2 * k + 1)};
    return out;
}

namespace {

SpacePtr closure_space(std::vector<double> d, std::size_t n) {
    // Shortest-path closure turns any positive symmetric matrix into a metric.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "p" + std::to_string(i);
    return FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));
}

}  // namespace

SpacePtr random_space(std::uint64_t& state, std::size_t n, int max_weight) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = 1.0 + static_cast<double>(splitmix64(state) %
                                                       static_cast<std::uint64_t>(max_weight));
            d[i * n + j] = d[j * n + i] = w;
        }
    return closure_space(std::move(d), n);
}

SpacePtr random_real_space(std::uint64_t& state, std::size_t n, double scale) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = scale * (0.25 + uniform01(state));
            d[i * n + j] = d[j * n + i] = w;
        }
    return closure_space(std::move(d), n);
}

NoisyIsometry random_eps_isometry(std::uint64_t& state, const SpacePtr& source, double noise,
                                  std::size_t extra_points) {
    const std::size_t n = source->size();
    const std::size_t m = n + extra_points;
    std::vector<double> d(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w =
                std::max(source->dist(static_cast<Index>(i), static_cast<Index>(j)) +
                             noise * (2.0 * uniform01(state) - 1.0),
                         noise * 0.05 + 1e-6);
            d[i * m + j] = d[j * m + i] = w;
        }
    // Extra points sit close to random existing ones.
    for (std::size_t e = 0; e < extra_points; ++e) {
        const std::size_t anchor = splitmix64(state) % n;
        const double off = noise * 0.4 * (0.1 + uniform01(state));
        for (std::size_t j = 0; j < n + e; ++j) {
            const double base = j == anchor ? 0.0 : d[anchor * m + j];
            const double w = std::max(base + off, off * 0.5);
            d[(n + e) * m + j] = d[j * m + (n + e)] = w;
        }
    }
    NoisyIsometry out;
    out.target = closure_space(std::move(d), m);
    std::vector<Index> img(n);
    for (Index i = 0; i < n; ++i) img[i] = i;
    out.map = PointMap(source, out.target, std::move(img));
    out.eps = std::max(distortion(out.map), net_defect(out.map));
    return out;
}

DiscreteMeasure random_measure(std::uint64_t& state, const SpacePtr& space) {
    std::vector<double> w(space->size());
    for (double& v : w) v = uniform01(state) + 1e-3;
    return DiscreteMeasure(space, std::move(w));
}

DiscreteMeasure random_sparse_measure(std::uint64_t& state, const SpacePtr& space, std::size_t k) {
    std::vector<double> w(space->size(), 0.0);
    std::size_t placed = 0;
    while (placed < k) {
        const std::size_t at = splitmix64(state) % space->size();
        if (w[at] == 0.0) {
            w[at] = uniform01(state) + 0.05;
            ++placed;
        }
    }
    return DiscreteMeasure(space, std::move(w));
}

}  // namespace eqgh::oracle
