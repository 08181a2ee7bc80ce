#include "eqgh/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eqgh/map_search.hpp"

namespace eqgh {

double hausdorff_distance(const FiniteMetricSpace& space, std::span<const Index> a,
                          std::span<const Index> b) {
    require(!a.empty() && !b.empty(), "hausdorff_distance: empty subset");
    for (Index i : a) require(i < space.size(), "hausdorff_distance: index out of range");
    for (Index i : b) require(i < space.size(), "hausdorff_distance: index out of range");
    auto one_sided = [&](std::span<const Index> from, std::span<const Index> to) {
        double worst = 0.0;
        for (Index i : from) {
            double best = std::numeric_limits<double>::infinity();
            for (Index j : to) best = std::min(best, space.dist(i, j));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

double distortion(const PointMap& f) {
    const auto& src = *f.source;
    const auto& dst = *f.target;
    double dis = 0.0;
    for (Index i = 0; i < src.size(); ++i)
        for (Index j = i + 1; j < src.size(); ++j)
            dis = std::max(dis, std::abs(dst.dist(f(i), f(j)) - src.dist(i, j)));
    return dis;
}

double net_defect(const PointMap& f) {
    const auto& dst = *f.target;
    std::vector<double> nearest(dst.size(), std::numeric_limits<double>::infinity());
    for (Index i = 0; i < f.domain_size(); ++i) {
        const Index v = f(i);
        for (Index y = 0; y < dst.size(); ++y) nearest[y] = std::min(nearest[y], dst.dist(v, y));
    }
    return *std::max_element(nearest.begin(), nearest.end());
}

EpsIsometryCheck is_eps_isometry(const PointMap& f, double eps) {
    require(eps >= 0.0, "is_eps_isometry: eps must be >= 0");
    EpsIsometryCheck out;
    out.cert.forward = f;
    out.cert.distortion = distortion(f);
    out.cert.net_defect = net_defect(f);
    out.cert.epsilon = std::max(out.cert.distortion, out.cert.net_defect);
    out.ok = out.cert.epsilon <= eps + kTol;
    return out;
}

namespace {

// Branch and bound over (f: X->Y, g: Y->X). The induced relation
// graph(f) u graph(g)^T is a correspondence, and every correspondence
// contains one of this shape, so min over pairs equals min over
// correspondences.
struct GhSearcher {
    const FiniteMetricSpace& x;
    const FiniteMetricSpace& y;
    std::size_t budget;
    std::size_t nodes = 0;
    bool truncated = false;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> f, g, best_f, best_g;

    GhSearcher(const FiniteMetricSpace& xs, const FiniteMetricSpace& ys, std::size_t b)
        : x(xs), y(ys), budget(b) {
        f.assign(x.size(), 0);
        g.assign(y.size(), 0);
    }

    void assign_f(std::size_t i, double partial) {
        if (nodes >= budget) {
            truncated = true;
            return;
        }
        ++nodes;
        if (i == x.size()) {
            assign_g(0, partial);
            return;
        }
        // Candidate images ordered by the distortion increment they cause.
        std::vector<std::pair<double, Index>> cand;
        cand.reserve(y.size());
        for (Index v = 0; v < y.size(); ++v) {
            double inc = partial;
            for (std::size_t k = 0; k < i && inc < best; ++k)
                inc = std::max(inc, std::abs(y.dist(v, f[k]) - x.dist(static_cast<Index>(i),
                                                                      static_cast<Index>(k))));
            if (inc < best) cand.emplace_back(inc, v);
        }
        std::sort(cand.begin(), cand.end());
        for (const auto& [inc, v] : cand) {
            if (inc >= best) break;
            f[i] = v;
            assign_f(i + 1, inc);
            if (truncated) return;
        }
    }

    void assign_g(std::size_t j, double partial) {
        if (nodes >= budget) {
            truncated = true;
            return;
        }
        ++nodes;
        if (j == y.size()) {
            if (partial < best) {
                best = partial;
                best_f = f;
                best_g = g;
            }
            return;
        }
        std::vector<std::pair<double, Index>> cand;
        cand.reserve(x.size());
        for (Index u = 0; u < x.size(); ++u) {
            double inc = partial;
            for (std::size_t k = 0; k < j && inc < best; ++k)
                inc = std::max(inc, std::abs(x.dist(u, g[k]) - y.dist(static_cast<Index>(j),
                                                                      static_cast<Index>(k))));
            for (Index i = 0; i < x.size() && inc < best; ++i)
                inc = std::max(inc, std::abs(x.dist(i, u) - y.dist(f[i], static_cast<Index>(j))));
            if (inc < best) cand.emplace_back(inc, u);
        }
        std::sort(cand.begin(), cand.end());
        for (const auto& [inc, u] : cand) {
            if (inc >= best) break;
            g[j] = u;
            assign_g(j + 1, inc);
            if (truncated) return;
        }
    }
};

// Admissible lower bound on correspondence distortion: each point's sorted
// distance row must be matched within dis by some row on the other side.
double row_profile_bound(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
    auto side = [](const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
        double lb = 0.0;
        for (Index i = 0; i < a.size(); ++i) {
            double best_row = std::numeric_limits<double>::infinity();
            for (Index v = 0; v < b.size(); ++v) {
                double row = 0.0;
                for (Index k = 0; k < a.size(); ++k) {
                    double m = std::numeric_limits<double>::infinity();
                    for (Index l = 0; l < b.size(); ++l)
                        m = std::min(m, std::abs(a.dist(i, k) - b.dist(v, l)));
                    row = std::max(row, m);
                }
                best_row = std::min(best_row, row);
            }
            lb = std::max(lb, best_row);
        }
        return lb;
    };
    return std::max(side(x, y), side(y, x));
}

GhExactResult gh_search_impl(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                             std::size_t budget) {
    GhSearcher s(x, y, budget);
    s.assign_f(0, 0.0);
    GhExactResult out;
    out.nodes = s.nodes;
    out.exact = !s.truncated;
    out.upper = s.best / 2.0;
    out.lower = out.exact ? out.upper : std::max(row_profile_bound(x, y) / 2.0, 0.0);
    if (!s.best_f.empty() || x.size() + y.size() > 0) {
        out.witness.reserve(x.size() + y.size());
        for (Index i = 0; i < x.size(); ++i) out.witness.emplace_back(i, s.best_f[i]);
        for (Index j = 0; j < y.size(); ++j) out.witness.emplace_back(s.best_g[j], j);
    }
    return out;
}

}  // namespace

GhExactResult gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
    if (x.size() > 8 || y.size() > 8)
        throw refusal_error("gh_exact: more than 8 points per side; supply a node budget");
    return gh_search_impl(x, y, std::numeric_limits<std::size_t>::max());
}

GhExactResult gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                       std::size_t node_budget) {
    require(node_budget > 0, "gh_exact: budget must be positive");
    return gh_search_impl(x, y, node_budget);
}

GhaSearchResult gha_search(const SpacePtr& x, const SpacePtr& y, std::size_t budget,
                           std::uint64_t seed) {
    require(budget > 0, "gha_search: budget must be positive");
    MapSearchSpec fwd{x, y};
    fwd.budget = budget;
    fwd.seed = seed;
    MapSearchSpec bwd{y, x};
    bwd.budget = budget;
    bwd.seed = seed;
    const MapSearchResult rf = search_map(fwd);
    const MapSearchResult rb = search_map(bwd);

    GhaSearchResult out;
    out.forward.forward = rf.map;
    out.forward.distortion = rf.distortion;
    out.forward.net_defect = rf.net_defect;
    out.forward.epsilon = std::max(rf.distortion, rf.net_defect);
    out.backward.forward = rb.map;
    out.backward.distortion = rb.distortion;
    out.backward.net_defect = rb.net_defect;
    out.backward.epsilon = std::max(rb.distortion, rb.net_defect);
    out.epsilon = std::max(out.forward.epsilon, out.backward.epsilon);
    out.evaluations = rf.evaluations + rb.evaluations;
    return out;
}

PointMap approx_inverse(const PointMap& f, double eps) {
    const auto check = is_eps_isometry(f, eps);
    require(check.ok, "approx_inverse: map is not an eps-isometry at the given eps");
    const auto& src = *f.source;
    const auto& dst = *f.target;

    std::vector<Index> img(dst.size());
    for (Index ypt = 0; ypt < dst.size(); ++ypt) {
        Index arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Index xpt = 0; xpt < src.size(); ++xpt) {
            const double d = dst.dist(f(xpt), ypt);
            if (d < best) {
                best = d;
                arg = xpt;
            }
        }
        img[ypt] = arg;
    }
    PointMap finv(f.target, f.source, std::move(img));

    certify(distortion(finv) <= 3 * eps + kTol, "approx_inverse: 3eps distortion bound failed");
    for (Index xpt = 0; xpt < src.size(); ++xpt)
        certify(src.dist(xpt, finv(f(xpt))) <= 2 * eps + kTol,
                "approx_inverse: 2eps round trip failed");
    for (Index ypt = 0; ypt < dst.size(); ++ypt)
        certify(dst.dist(ypt, f(finv(ypt))) <= eps + kTol, "approx_inverse: eps round trip failed");
    return finv;
}

std::vector<Index> eps_net(const FiniteMetricSpace& space, double eps) {
    require(eps > 0.0, "eps_net: eps must be > 0");
    std::vector<Index> net{0};
    std::vector<double> nearest(space.size());
    for (Index i = 0; i < space.size(); ++i) nearest[i] = space.dist(0, i);
    while (true) {
        Index far = 0;
        for (Index i = 1; i < space.size(); ++i)
            if (nearest[i] > nearest[far]) far = i;
        if (nearest[far] <= eps) break;
        net.push_back(far);
        for (Index i = 0; i < space.size(); ++i)
            nearest[i] = std::min(nearest[i], space.dist(far, i));
    }
    return net;
}

double covering_radius(const FiniteMetricSpace& space, std::span<const Index> net) {
    require(!net.empty(), "covering_radius: empty net");
    double worst = 0.0;
    for (Index i = 0; i < space.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Index s : net) best = std::min(best, space.dist(s, i));
        worst = std::max(worst, best);
    }
    return worst;
}

double net_approx_bound(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                        std::span<const Index> net_x, std::span<const Index> net_y, double delta) {
    require(net_x.size() == net_y.size() && !net_x.empty(),
            "net_approx_bound: nets must match in size");
    require(delta > 0.0, "net_approx_bound: delta must be > 0");
    const double eps = std::max(covering_radius(x, net_x), covering_radius(y, net_y));
    for (std::size_t i = 0; i < net_x.size(); ++i)
        for (std::size_t j = 0; j < net_x.size(); ++j)
            require(std::abs(x.dist(net_x[i], net_x[j]) - y.dist(net_y[i], net_y[j])) < delta,
                    "net_approx_bound: matched nets are not delta-close");
    const double bound = 2 * eps + delta;
    if (x.size() <= 8 && y.size() <= 8)
        certify(gh_exact(x, y).upper < bound + kTol, "net_approx_bound: oracle exceeds 2eps+delta");
    return bound;
}

PointMap cellwise_gha(const PointMap& f, double eps, std::span<const Index> net) {
    require(eps > 0.0, "cellwise_gha: eps must be > 0");
    require(covering_radius(*f.source, net) <= eps + kTol,
            "cellwise_gha: net is not an eps-net of the source");
    const auto check = is_eps_isometry(f, eps);
    require(check.ok, "cellwise_gha: map is not an eps-isometry at the given eps");

    const auto& src = *f.source;
    const auto& dst = *f.target;
    std::vector<Index> img(src.size());
    for (Index i = 0; i < src.size(); ++i) {
        Index cell = 0;
        bool found = false;
        for (std::size_t k = 0; k < net.size(); ++k)
            if (src.dist(i, net[k]) <= eps + kTol) {
                cell = static_cast<Index>(k);
                found = true;
                break;
            }
        require(found, "cellwise_gha: point not covered by the net");
        img[i] = f(net[cell]);
    }
    PointMap f1(f.source, f.target, std::move(img));

    certify(distortion(f1) <= 5 * eps + kTol, "cellwise_gha: 5eps distortion bound failed");
    certify(net_defect(f1) <= 3 * eps + kTol, "cellwise_gha: 3eps net bound failed");
    for (Index i = 0; i < src.size(); ++i)
        certify(dst.dist(f(i), f1(i)) <= 2 * eps + kTol, "cellwise_gha: 2eps proximity failed");
    return f1;
}

}  // namespace eqgh
