#include "eqgh/map_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqgh/metric_core.hpp"

namespace eqgh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Score {
    double max_term = 0.0;
    double sumsq = 0.0;
    double dis = 0.0;
    double net = 0.0;
    double equiv = 0.0;

    bool better_than(const Score& o) const {
        if (max_term < o.max_term - 1e-15) return true;
        if (max_term > o.max_term + 1e-15) return false;
        return sumsq < o.sumsq - 1e-12;
    }
};

struct Engine {
    const MapSearchSpec& spec;
    const FiniteMetricSpace& src;
    const FiniteMetricSpace& dst;
    std::size_t n, m;
    std::size_t evals = 0;
    // Per-constraint incoming edges: in_edges[c][i] lists j with src_loop[j] == i.
    std::vector<std::vector<std::vector<Index>>> in_edges;

    explicit Engine(const MapSearchSpec& s)
        : spec(s), src(*s.source), dst(*s.target), n(s.source->size()), m(s.target->size()) {
        in_edges.resize(spec.constraints.size());
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            in_edges[c].assign(n, {});
            for (Index j = 0; j < n; ++j) in_edges[c][spec.constraints[c].src_loop[j]].push_back(j);
        }
    }

    Score full_score(const std::vector<Index>& f) {
        ++evals;
        Score s;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                const double t = std::abs(dst.dist(f[i], f[j]) - src.dist(i, j));
                s.dis = std::max(s.dis, t);
                s.sumsq += t * t;
            }
        if (spec.include_net_defect) {
            for (Index y = 0; y < m; ++y) {
                double nearest = kInf;
                for (Index i = 0; i < n; ++i) nearest = std::min(nearest, dst.dist(f[i], y));
                s.net = std::max(s.net, nearest);
                s.sumsq += nearest * nearest;
            }
        }
        for (const auto& c : spec.constraints)
            for (Index i = 0; i < n; ++i) {
                const double t = dst.dist(c.dst_loop[f[i]], f[c.src_loop[i]]);
                s.equiv = std::max(s.equiv, t);
                s.sumsq += t * t;
            }
        s.max_term = std::max({s.dis, s.net, s.equiv});
        return s;
    }

    // Max and sum of squares over the terms that involve position i.
    std::pair<double, double> touch_terms(const std::vector<Index>& f, Index i, Index value) {
        double mx = 0.0, ss = 0.0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double t = std::abs(dst.dist(value, f[j]) - src.dist(i, j));
            mx = std::max(mx, t);
            ss += t * t;
        }
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            const auto& cc = spec.constraints[c];
            const Index fwd = cc.src_loop[i];
            const double t = dst.dist(cc.dst_loop[value], fwd == i ? value : f[fwd]);
            mx = std::max(mx, t);
            ss += t * t;
            for (Index j : in_edges[c][i]) {
                if (j == i) continue;  // already counted as the forward term
                const double u = dst.dist(cc.dst_loop[f[j]], value);
                mx = std::max(mx, u);
                ss += u * u;
            }
        }
        return {mx, ss};
    }

    // Greedy assignment in order of distance from a source anchor, each point
    // taking the image with the smallest running distortion against what is
    // already placed.
    std::vector<Index> anchor_seed(Index src_anchor, Index dst_anchor) {
        std::vector<Index> order(n);
        for (Index i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return src.dist(src_anchor, a) < src.dist(src_anchor, b);
        });
        std::vector<Index> f(n, 0);
        std::vector<Index> placed;
        placed.reserve(n);
        for (Index step = 0; step < n; ++step) {
            const Index i = order[step];
            if (step == 0) {
                f[i] = dst_anchor;
                placed.push_back(i);
                continue;
            }
            double best = kInf;
            Index arg = 0;
            for (Index v = 0; v < m; ++v) {
                double worst = 0.0;
                for (Index j : placed) {
                    worst = std::max(worst, std::abs(dst.dist(v, f[j]) - src.dist(i, j)));
                    if (worst >= best) break;
                }
                if (worst < best) {
                    best = worst;
                    arg = v;
                }
            }
            f[i] = arg;
            placed.push_back(i);
        }
        return f;
    }

    // Seed that propagates one image choice per orbit of the constraint
    // generators, so intertwining holds exactly along a spanning tree.
    std::vector<Index> chain_seed() {
        std::vector<std::size_t> gens = spec.chain_generators;
        if (gens.empty())
            for (std::size_t c = 0; c < spec.constraints.size(); ++c) gens.push_back(c);
        std::vector<Index> f(n, 0);
        std::vector<bool> assigned(n, false);
        std::vector<Index> done;  // assignment order, for scoring
        done.reserve(n);

        for (Index root = 0; root < n; ++root) {
            if (assigned[root]) continue;
            // Forward BFS tree over the generator self-maps.
            std::vector<Index> nodes{root};
            std::vector<std::pair<Index, std::size_t>> edge(n);  // child -> (parent, gen)
            std::vector<bool> in_tree(n, false);
            in_tree[root] = true;
            for (std::size_t head = 0; head < nodes.size(); ++head) {
                const Index u = nodes[head];
                for (std::size_t c : gens) {
                    const Index w = spec.constraints[c].src_loop[u];
                    if (!in_tree[w] && !assigned[w]) {
                        in_tree[w] = true;
                        edge[w] = {u, c};
                        nodes.push_back(w);
                    }
                }
            }
            std::vector<Index> val(n, 0);
            double best_mx = kInf, best_ss = kInf;
            std::vector<Index> best_val;
            for (Index x = 0; x < m; ++x) {
                val[root] = x;
                for (std::size_t k = 1; k < nodes.size(); ++k) {
                    const Index w = nodes[k];
                    val[w] = spec.constraints[edge[w].second].dst_loop[val[edge[w].first]];
                }
                double mx = 0.0, ss = 0.0;
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    const Index u = nodes[k];
                    for (std::size_t l = 0; l < k; ++l) {
                        const double t =
                            std::abs(dst.dist(val[u], val[nodes[l]]) - src.dist(u, nodes[l]));
                        mx = std::max(mx, t);
                        ss += t * t;
                    }
                    for (Index j : done) {
                        const double t = std::abs(dst.dist(val[u], f[j]) - src.dist(u, j));
                        mx = std::max(mx, t);
                        ss += t * t;
                    }
                    // Residual on non-tree constraint edges with known endpoints.
                    for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
                        const Index w = spec.constraints[c].src_loop[u];
                        if (in_tree[w] || assigned[w]) {
                            const double t = dst.dist(spec.constraints[c].dst_loop[val[u]],
                                                      in_tree[w] ? val[w] : f[w]);
                            mx = std::max(mx, t);
                            ss += t * t;
                        }
                    }
                }
                if (mx < best_mx - 1e-15 || (mx < best_mx + 1e-15 && ss < best_ss - 1e-12)) {
                    best_mx = mx;
                    best_ss = ss;
                    best_val.assign(nodes.size(), 0);
                    for (std::size_t k = 0; k < nodes.size(); ++k) best_val[k] = val[nodes[k]];
                }
            }
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                f[nodes[k]] = best_val[k];
                assigned[nodes[k]] = true;
                done.push_back(nodes[k]);
            }
        }
        return f;
    }

    // Candidate shortlist for repositioning f[i]: images suggested by each
    // constraint plus the best few against a fixed reference sample.
    std::vector<Index> shortlist(const std::vector<Index>& f, Index i,
                                 const std::vector<Index>& refs) {
        std::vector<Index> out;
        auto push = [&](Index v) {
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        };
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            const auto& cc = spec.constraints[c];
            // Best v for the forward term d(dst_loop[v], f[src_loop[i]]).
            const Index want_fwd = f[cc.src_loop[i]];
            Index arg = 0;
            double best = kInf;
            for (Index v = 0; v < m; ++v) {
                const double d = dst.dist(cc.dst_loop[v], want_fwd);
                if (d < best) {
                    best = d;
                    arg = v;
                }
            }
            push(arg);
            // Best v for one incoming term, if any.
            if (!in_edges[c][i].empty()) {
                const Index j = in_edges[c][i].front();
                push(cc.dst_loop[f[j]]);
            }
        }
        std::vector<std::pair<double, Index>> ranked;
        ranked.reserve(m);
        for (Index v = 0; v < m; ++v) {
            double s = 0.0;
            for (Index j : refs) {
                const double t = std::abs(dst.dist(v, f[j]) - src.dist(i, j));
                s += t * t;
            }
            ranked.emplace_back(s, v);
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t k = 0; k < ranked.size() && out.size() < 12; ++k) push(ranked[k].second);
        return out;
    }

    MapSearchResult run() {
        std::vector<std::vector<Index>> seeds;
        for (const auto& s : spec.extra_seeds) {
            require(s.source->uid() == src.uid() && s.target->uid() == dst.uid(),
                    "search_map: seed spaces mismatch");
            seeds.push_back(s.image);
        }
        if (src.uid() == dst.uid()) seeds.push_back(PointMap::identity(spec.source).image);
        if (!spec.constraints.empty()) seeds.push_back(chain_seed());
        {
            const auto dst_anchors = eps_net(dst, std::max(dst.diameter() / 2.0, 1e-12));
            Index far0 = 0;
            for (Index i = 0; i < n; ++i)
                if (src.dist(0, i) > src.dist(0, far0)) far0 = i;
            for (Index sa : {static_cast<Index>(0), far0})
                for (Index da : dst_anchors) {
                    seeds.push_back(anchor_seed(sa, da));
                    if (seeds.size() > 24) break;
                }
        }

        std::vector<Index> best_f;
        Score best;
        best.max_term = kInf;
        best.sumsq = kInf;
        for (const auto& f : seeds) {
            const Score s = full_score(f);
            if (s.better_than(best)) {
                best = s;
                best_f = f;
            }
        }

        // Fixed reference sample for candidate ranking.
        std::vector<Index> refs;
        std::uint64_t rng = spec.seed ^ 0x9d5f3a1fULL;
        const std::size_t want_refs = std::min<std::size_t>(n, 12);
        for (std::size_t k = 0; k < want_refs; ++k)
            refs.push_back(static_cast<Index>(splitmix64(rng) % n));

        std::vector<Index> f = best_f;
        Score cur = best;
        bool moved = true;
        while (moved && evals < spec.budget) {
            moved = false;
            for (Index i = 0; i < n && evals < spec.budget; ++i) {
                const auto cands = shortlist(f, i, refs);
                const auto [old_mx, old_ss] = touch_terms(f, i, f[i]);
                double pick_mx = kInf, pick_ss = kInf;
                Index pick = f[i];
                for (Index v : cands) {
                    if (v == f[i]) continue;
                    ++evals;
                    const auto [mx, ss] = touch_terms(f, i, v);
                    if (mx < pick_mx - 1e-15 || (mx < pick_mx + 1e-15 && ss < pick_ss - 1e-12)) {
                        pick_mx = mx;
                        pick_ss = ss;
                        pick = v;
                    }
                }
                if (pick == f[i]) continue;
                if (pick_mx > old_mx + 1e-15 ||
                    (pick_mx > old_mx - 1e-15 && pick_ss > old_ss - 1e-12))
                    continue;  // no local gain
                const Index saved = f[i];
                f[i] = pick;
                const Score s = full_score(f);
                if (s.better_than(cur)) {
                    cur = s;
                    moved = true;
                } else {
                    f[i] = saved;
                }
            }
            if (cur.better_than(best)) {
                best = cur;
                best_f = f;
            }
        }

        MapSearchResult out;
        out.map = PointMap(spec.source, spec.target, best_f);
        out.distortion = best.dis;
        out.net_defect = best.net;
        out.equiv_defect = best.equiv;
        out.score = best.max_term;
        out.evaluations = evals;
        return out;
    }
};

}  // namespace

MapSearchResult search_map(const MapSearchSpec& spec) {
    require(spec.source && spec.target, "search_map: null space");
    for (const auto& c : spec.constraints)
        require(c.src_loop.size() == spec.source->size() && c.dst_loop.size() == spec.target->size(),
                "search_map: constraint arity mismatch");
    Engine e(spec);
    return e.run();
}

MapSearchResult score_map(const MapSearchSpec& spec, const PointMap& f) {
    require(f.source->uid() == spec.source->uid() && f.target->uid() == spec.target->uid(),
            "score_map: map spaces mismatch");
    MapSearchResult out;
    out.map = f;
    Engine scorer(spec);
    const auto s = scorer.full_score(f.image);
    out.distortion = s.dis;
    out.net_defect = s.net;
    out.equiv_defect = s.equiv;
    out.score = s.max_term;
    out.evaluations = 1;
    return out;
}

}  // namespace eqgh
