#include "eqgh/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqgh/metric_core.hpp"

namespace eqgh {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), w_(std::move(weights)) {
    require(space_ != nullptr, "measure: null space");
    require(w_.size() == space_->size(), "measure: weight count != point count");
    double sum = 0.0;
    for (double v : w_) {
        require(v >= 0.0 && std::isfinite(v), "measure: weights must be finite and >= 0");
        sum += v;
    }
    require(sum > kMassTol, "measure: total mass must be positive");
    for (double& v : w_) v /= sum;
}

DiscreteMeasure DiscreteMeasure::dirac(SpacePtr space, Index at) {
    require(at < space->size(), "dirac: point out of range");
    std::vector<double> w(space->size(), 0.0);
    w[at] = 1.0;
    return DiscreteMeasure(std::move(space), std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(SpacePtr space) {
    std::vector<double> w(space->size(), 1.0);
    return DiscreteMeasure(std::move(space), std::move(w));
}

std::vector<Index> DiscreteMeasure::support() const {
    std::vector<Index> s;
    for (Index i = 0; i < w_.size(); ++i)
        if (w_[i] > 0.0) s.push_back(i);
    return s;
}

Coupling::Coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::vector<double> m)
    : row_space(mu.space()), col_space(nu.space()), matrix(std::move(m)) {
    const std::size_t nr = row_space->size(), nc = col_space->size();
    require(matrix.size() == nr * nc, "coupling: matrix size mismatch");
    for (double v : matrix) require(v >= -kMassTol, "coupling: negative entry");
    for (std::size_t i = 0; i < nr; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nc; ++j) row += matrix[i * nc + j];
        require(std::abs(row - mu.weights()[i]) <= kTol, "coupling: row marginal violated");
    }
    for (std::size_t j = 0; j < nc; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < nr; ++i) col += matrix[i * nc + j];
        require(std::abs(col - nu.weights()[j]) <= kTol, "coupling: column marginal violated");
    }
}

double transport_cost(const Coupling& pi, double p) {
    require(p > 0.0, "transport_cost: p must be > 0");
    require(pi.row_space->uid() == pi.col_space->uid(),
            "transport_cost: plan must live on one space");
    const auto& sp = *pi.row_space;
    double cost = 0.0;
    for (Index i = 0; i < sp.size(); ++i)
        for (Index j = 0; j < sp.size(); ++j) {
            const double m = pi.entry(i, j);
            if (m > 0.0) cost += m * std::pow(sp.dist(i, j), p);
        }
    return cost;
}

WassersteinResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    require(mu.space()->uid() == nu.space()->uid(), "wasserstein: measures on different spaces");
    require(p >= 1.0, "wasserstein: p must be >= 1");
    const auto& sp = *mu.space();
    const auto rows = mu.support();
    const auto cols = nu.support();
    const std::size_t m = rows.size(), n = cols.size();

    std::vector<double> cost(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = std::pow(sp.dist(rows[i], cols[j]), p);

    std::vector<double> supply(m), demand(n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = mu.weights()[rows[i]];
    for (std::size_t j = 0; j < n; ++j) demand[j] = nu.weights()[cols[j]];

    // Successive shortest paths with potentials on the support bipartite
    // graph. Each augmentation exhausts a supply or a demand, so the loop is
    // finite; optimality is certified from the duals below.
    std::vector<double> flow(m * n, 0.0);
    std::vector<double> pot(m + n, 0.0);
    const std::size_t v_count = m + n;
    std::vector<double> dist(v_count);
    std::vector<int> parent(v_count);
    std::vector<bool> done(v_count);

    double remaining = 0.0;
    for (double s : supply) remaining += s;
    std::size_t guard = 0;
    while (remaining > 1e-14 && guard++ < 4 * (m + n) + 16) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), false);
        for (std::size_t i = 0; i < m; ++i)
            if (supply[i] > 1e-14) dist[i] = 0.0;
        for (std::size_t it = 0; it < v_count; ++it) {
            std::size_t u = v_count;
            double best = kInf;
            for (std::size_t k = 0; k < v_count; ++k)
                if (!done[k] && dist[k] < best) {
                    best = dist[k];
                    u = k;
                }
            if (u == v_count) break;
            done[u] = true;
            if (u < m) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double rc = cost[u * n + j] + pot[u] - pot[m + j];
                    const double cand = dist[u] + std::max(rc, 0.0);
                    if (cand < dist[m + j] - 1e-18) {
                        dist[m + j] = cand;
                        parent[m + j] = static_cast<int>(u);
                    }
                }
            } else {
                const std::size_t j = u - m;
                for (std::size_t i = 0; i < m; ++i)
                    if (flow[i * n + j] > 1e-16) {
                        const double rc = -cost[i * n + j] + pot[m + j] - pot[i];
                        const double cand = dist[u] + std::max(rc, 0.0);
                        if (cand < dist[i] - 1e-18) {
                            dist[i] = cand;
                            parent[i] = static_cast<int>(u);
                        }
                    }
            }
        }
        // Closest sink with unmet demand.
        std::size_t sink = v_count;
        double best = kInf;
        for (std::size_t j = 0; j < n; ++j)
            if (demand[j] > 1e-14 && dist[m + j] < best) {
                best = dist[m + j];
                sink = m + j;
            }
        require(sink != v_count, "wasserstein: flow network disconnected");
        for (std::size_t k = 0; k < v_count; ++k)
            if (dist[k] < kInf) pot[k] += dist[k];

        // Bottleneck along the augmenting path; the start is a supply node.
        std::size_t start = sink;
        double push = demand[sink - m];
        for (std::size_t v = sink; parent[v] >= 0;) {
            const std::size_t u = static_cast<std::size_t>(parent[v]);
            if (u >= m) push = std::min(push, flow[v * n + (u - m)]);  // backward edge
            start = u;
            v = u;
        }
        push = std::min(push, supply[start]);
        for (std::size_t v = sink; parent[v] >= 0;) {
            const std::size_t u = static_cast<std::size_t>(parent[v]);
            if (u < m)
                flow[u * n + (v - m)] += push;
            else
                flow[v * n + (u - m)] -= push;
            v = u;
        }
        supply[start] -= push;
        demand[sink - m] -= push;
        remaining -= push;
    }
    require(remaining <= 1e-10, "wasserstein: augmentation failed to route all mass");

    // Dual certificate of exact optimality: reduced costs nonnegative, and
    // complementary slackness on the support of the plan.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double rc = cost[i * n + j] + pot[i] - pot[m + j];
            certify(rc >= -1e-9, "wasserstein: dual feasibility violated");
            if (flow[i * n + j] > 1e-12)
                certify(std::abs(rc) <= 1e-9, "wasserstein: complementary slackness violated");
        }

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) total += flow[i * n + j] * cost[i * n + j];

    std::vector<double> full(static_cast<std::size_t>(sp.size()) * sp.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            full[static_cast<std::size_t>(rows[i]) * sp.size() + cols[j]] =
                std::max(flow[i * n + j], 0.0);

    WassersteinResult out{std::pow(std::max(total, 0.0), 1.0 / p), std::max(total, 0.0),
                          Coupling(mu, nu, std::move(full))};
    return out;
}

DiscreteMeasure pushforward(const PointMap& f, const DiscreteMeasure& mu) {
    require(f.source->uid() == mu.space()->uid(), "pushforward: map does not act on the measure");
    std::vector<double> w(f.target->size(), 0.0);
    for (Index i = 0; i < f.domain_size(); ++i) w[f(i)] += mu.weights()[i];
    return DiscreteMeasure(f.target, std::move(w));
}

ContractionCheck contraction_check(const PointMap& f, const PointMap& g,
                                   const DiscreteMeasure& mu, double p) {
    require(f.source->uid() == g.source->uid() && f.target->uid() == g.target->uid(),
            "contraction_check: maps must share source and target");
    require(f.source->uid() == mu.space()->uid(), "contraction_check: measure on the wrong space");
    ContractionCheck out;
    out.lhs = wasserstein(pushforward(f, mu), pushforward(g, mu), p).cost;
    const auto& dst = *f.target;
    for (Index i = 0; i < f.domain_size(); ++i)
        out.rhs += mu.weights()[i] * std::pow(dst.dist(f(i), g(i)), p);
    out.ok = out.lhs <= out.rhs + kTol;
    certify(out.ok, "contraction_check: W_p^p exceeds the transported integral");
    return out;
}

LiftGhaReport lift_gha(const PointMap& f, double eps, double p,
                       const std::vector<DiscreteMeasure>& sample,
                       const std::vector<DiscreteMeasure>& target_sample,
                       const FiniteAction* alpha, const FiniteAction* beta, int window_radius) {
    require(p >= 1.0, "lift_gha: p must be >= 1");
    const auto check = is_eps_isometry(f, eps);
    require(check.ok, "lift_gha: map is not an eps-isometry at the given eps");

    LiftGhaReport rep;
    rep.m_const = std::pow(f.source->diameter(), p - 1.0) + std::pow(f.target->diameter(), p - 1.0);
    rep.eps_tilde = 8.0 * eps + std::pow(9.0 * p * rep.m_const * eps, 1.0 / p);

    for (std::size_t i = 0; i < sample.size(); ++i)
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            const double before = wasserstein(sample[i], sample[j], p).value;
            const double after =
                wasserstein(pushforward(f, sample[i]), pushforward(f, sample[j]), p).value;
            rep.worst_pair_gap = std::max(rep.worst_pair_gap, std::abs(after - before));
            ++rep.pairs_checked;
            certify(std::abs(after - before) <= rep.eps_tilde + kTol,
                    "lift_gha: pushforward broke the eps-tilde bound");
        }

    if (!target_sample.empty()) {
        const PointMap finv = approx_inverse(f, eps);
        const PointMap round_trip = PointMap::compose(f, finv);
        for (const auto& nu : target_sample) {
            const double d = wasserstein(pushforward(round_trip, nu), nu, p).value;
            rep.worst_net = std::max(rep.worst_net, d);
            certify(d <= eps + kTol, "lift_gha: covering witness exceeded eps");
        }
    }

    if (alpha != nullptr && beta != nullptr) {
        const auto window = alpha->ball(window_radius);
        for (const auto& g : window) {
            const PointMap ag = alpha->evaluate(g);
            const PointMap bg = beta->evaluate(g);
            for (const auto& mu : sample) {
                const double d = wasserstein(pushforward(bg, pushforward(f, mu)),
                                             pushforward(f, pushforward(ag, mu)), p)
                                     .value;
                rep.worst_equiv = std::max(rep.worst_equiv, d);
                certify(d <= eps + kTol, "lift_gha: lifted equivariance defect exceeded eps");
            }
        }
    }
    return rep;
}

FolnerSequence folner_box(const GeneratedGroup& group, int n) {
    require(n >= 1, "folner_box: n must be >= 1");
    FolnerSequence f;
    f.group = group;
    f.n = n;
    switch (group.kind()) {
        case GroupKind::Z: {
            for (int a = 0; a < n; ++a) f.elements.push_back({a, 0, {}});
            f.boundary_ratio = 2.0 / n;  // sF delta F = {0, n}
            break;
        }
        case GroupKind::Z2: {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) f.elements.push_back({a, b, {}});
            f.boundary_ratio = 2.0 / n;
            break;
        }
        case GroupKind::Cyclic: {
            const int m = group.param();
            for (int a = 0; a < std::min(n, m); ++a) f.elements.push_back({a, 0, {}});
            f.boundary_ratio = n >= m ? 0.0 : 2.0 / n;
            break;
        }
        case GroupKind::FreeMonoid:
            throw refusal_error("folner_box: free monoids are not amenable targets here");
    }
    certify(f.boundary_ratio <= 2.0 / n + kTol, "folner_box: boundary ratio out of envelope");
    return f;
}

DiscreteMeasure folner_average(const DiscreteMeasure& mu, const FiniteAction& action,
                               const PointMap& f, const FolnerSequence& folner) {
    if (action.mode() != ActionMode::Group)
        throw refusal_error("folner_average: semigroup actions cannot be averaged");
    require(folner.group.kind() == action.group().kind(), "folner_average: group kind mismatch");
    const DiscreteMeasure pushed = pushforward(f, mu);
    require(pushed.space()->uid() == action.space()->uid(),
            "folner_average: map must land in the action's space");

    std::vector<double> w(action.space()->size(), 0.0);
    const auto maps = action.orbit_maps(folner.elements);
    const double inv = 1.0 / static_cast<double>(folner.elements.size());
    for (const auto& m : maps)
        for (Index i = 0; i < m.domain_size(); ++i) w[m(i)] += inv * pushed.weights()[i];
    return DiscreteMeasure(action.space(), std::move(w));
}

double invariance_defect(const DiscreteMeasure& mu, const FiniteAction& action, double p) {
    require(action.mode() == ActionMode::Group, "invariance_defect: group mode required");
    require(mu.space()->uid() == action.space()->uid(),
            "invariance_defect: measure on the wrong space");
    double worst = 0.0;
    for (const auto& gen : action.generator_maps())
        worst = std::max(worst, wasserstein(pushforward(gen, mu), mu, p).value);
    return worst;
}

InvariantNetLiftReport invariant_net_lift(const std::vector<DiscreteMeasure>& family,
                                          const PointMap& f, double eps, double p,
                                          const FiniteAction& target_action,
                                          const FolnerSequence& folner, double invariance_tol,
                                          const std::vector<DiscreteMeasure>& target_witnesses,
                                          const FiniteAction* source_action) {
    require(!family.empty(), "invariant_net_lift: empty family");
    const auto check = is_eps_isometry(f, eps);
    require(check.ok, "invariant_net_lift: map is not an eps-isometry at the given eps");
    if (source_action != nullptr)
        for (const auto& mu : family)
            require(invariance_defect(mu, *source_action, p) <= invariance_tol + kTol,
                    "invariant_net_lift: family member is not invariant within tolerance");

    InvariantNetLiftReport rep;
    const double m_const =
        std::pow(f.source->diameter(), p - 1.0) + std::pow(f.target->diameter(), p - 1.0);
    rep.d_eps = 28.0 * eps + std::pow(9.0 * p * m_const * eps, 1.0 / p);

    for (const auto& mu : family) {
        require(mu.space()->uid() == f.source->uid(), "invariant_net_lift: family on wrong space");
        rep.images.push_back(folner_average(mu, target_action, f, folner));
    }
    double image_defect = 0.0;
    for (const auto& im : rep.images)
        image_defect = std::max(image_defect, invariance_defect(im, target_action, p));
    rep.slack = 2.0 * f.target->diameter() * folner.boundary_ratio + image_defect;

    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double before = wasserstein(family[i], family[j], p).value;
            const double after = wasserstein(rep.images[i], rep.images[j], p).value;
            rep.worst_pair_gap = std::max(rep.worst_pair_gap, std::abs(after - before));
            certify(std::abs(after - before) <= rep.d_eps + rep.slack + kTol,
                    "invariant_net_lift: pairwise distances drifted past D(eps) + slack");
        }
    rep.witnesses = target_witnesses.size();
    for (const auto& nu : target_witnesses) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& im : rep.images)
            nearest = std::min(nearest, wasserstein(nu, im, p).value);
        rep.worst_witness_dist = std::max(rep.worst_witness_dist, nearest);
        certify(nearest <= rep.d_eps + rep.slack + kTol,
                "invariant_net_lift: witness farther than D(eps) + slack from the image set");
    }
    return rep;
}

InvariantDiameterEstimate invariant_diameter(const FiniteAction& action, double p,
                                             std::size_t n_samples, const FolnerSequence& folner,
                                             std::uint64_t seed) {
    require(n_samples >= 1, "invariant_diameter: need at least one sample");
    std::uint64_t state = seed * 0x2545f4914f6cdd1dULL + 0x1111ULL;
    const PointMap id = PointMap::identity(action.space());

    // Two dirac probes at fixed indices widen the spread deterministically;
    // the rest are seeded random measures.
    std::vector<DiscreteMeasure> averaged;
    const Index far = static_cast<Index>(action.space()->size() / 2);
    if (n_samples >= 2 && far > 0) {
        averaged.push_back(
            folner_average(DiscreteMeasure::dirac(action.space(), 0), action, id, folner));
        averaged.push_back(
            folner_average(DiscreteMeasure::dirac(action.space(), far), action, id, folner));
    }
    while (averaged.size() < n_samples) {
        std::vector<double> w(action.space()->size());
        for (double& v : w) v = uniform01(state) + 1e-6;
        averaged.push_back(
            folner_average(DiscreteMeasure(action.space(), std::move(w)), action, id, folner));
    }
    InvariantDiameterEstimate est;
    for (std::size_t i = 0; i < averaged.size(); ++i)
        for (std::size_t j = i + 1; j < averaged.size(); ++j)
            est.diameter = std::max(est.diameter, wasserstein(averaged[i], averaged[j], p).value);
    for (const auto& mu : averaged)
        est.averaging_defect = std::max(est.averaging_defect, invariance_defect(mu, action, p));
    return est;
}

}  // namespace eqgh
