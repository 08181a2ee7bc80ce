#include "eqgh/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace eqgh {

namespace {

double wrap_half(double t) {
    // Representative in [-1/2, 1/2).
    return t - std::floor(t + 0.5);
}

}  // namespace

Mat2i Mat2i::operator*(const Mat2i& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
}

Mat2i Mat2i::inverse() const {
    const std::int64_t d = det();
    require(d == 1 || d == -1, "Mat2i::inverse: matrix is not unimodular");
    return {d * a22, -d * a12, -d * a21, d * a11};
}

Vec2 Mat2i::apply(const Vec2& v) const {
    return {static_cast<double>(a11) * v.x + static_cast<double>(a12) * v.y,
            static_cast<double>(a21) * v.x + static_cast<double>(a22) * v.y};
}

double Mat2i::operator_norm() const {
    const double f = static_cast<double>(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    const double d = static_cast<double>(det());
    const double disc = std::max(f * f - 4.0 * d * d, 0.0);
    return std::sqrt((f + std::sqrt(disc)) / 2.0);
}

Vec2 torus_wrap(const Vec2& v) {
    return {v.x - std::floor(v.x), v.y - std::floor(v.y)};
}

Vec2 torus_lift(const Vec2& a, const Vec2& b) {
    return {wrap_half(a.x - b.x), wrap_half(a.y - b.y)};
}

double torus_dist(const Vec2& a, const Vec2& b) {
    const Vec2 d = torus_lift(a, b);
    return std::sqrt(d.x * d.x + d.y * d.y);
}

TorusSystem::TorusSystem(GeneratedGroup group, std::vector<Mat2i> generators)
    : group_(std::move(group)), gens_(std::move(generators)) {
    require(group_.kind() == GroupKind::Z || group_.kind() == GroupKind::Z2,
            "TorusSystem: only Z and Z2 systems are supported");
    require(gens_.size() == group_.generator_count(), "TorusSystem: one matrix per generator");
    if (group_.kind() == GroupKind::Z2) {
        const Mat2i ab = gens_[0] * gens_[1];
        const Mat2i ba = gens_[1] * gens_[0];
        require(ab.a11 == ba.a11 && ab.a12 == ba.a12 && ab.a21 == ba.a21 && ab.a22 == ba.a22,
                "TorusSystem: Z2 generator matrices must commute");
    }
    invertible_ = true;
    for (const auto& m : gens_) invertible_ = invertible_ && m.unimodular();
    if (invertible_)
        for (const auto& m : gens_) inv_gens_.push_back(m.inverse());
}

Vec2 TorusSystem::apply_generator(std::size_t s, const Vec2& p) const {
    require(s < gens_.size(), "TorusSystem: generator index out of range");
    return torus_wrap(gens_[s].apply(p));
}

Vec2 TorusSystem::apply_element(const GroupElement& g, const Vec2& p) const {
    auto pow_apply = [&](std::size_t s, std::int64_t k, Vec2 v) {
        const Mat2i& m = k >= 0 ? gens_[s] : inv_gens_[s];
        if (k < 0) require(invertible_, "TorusSystem: inverse step in a semigroup system");
        for (std::int64_t i = 0; i < std::llabs(k); ++i) v = torus_wrap(m.apply(v));
        return v;
    };
    Vec2 v = pow_apply(0, g.a, p);
    if (group_.kind() == GroupKind::Z2) v = pow_apply(1, g.b, v);
    return v;
}

std::array<std::int64_t, 2> TorusSystem::apply_element_dyadic(const GroupElement& g,
                                                              std::array<std::int64_t, 2> p) const {
    const std::int64_t mod = std::int64_t{1} << kDyadicBits;
    auto step = [&](const Mat2i& m, std::array<std::int64_t, 2> v) {
        const __int128 x = static_cast<__int128>(m.a11) * v[0] + static_cast<__int128>(m.a12) * v[1];
        const __int128 y = static_cast<__int128>(m.a21) * v[0] + static_cast<__int128>(m.a22) * v[1];
        auto reduce = [&](__int128 t) {
            std::int64_t r = static_cast<std::int64_t>(t % mod);
            return r < 0 ? r + mod : r;
        };
        return std::array<std::int64_t, 2>{reduce(x), reduce(y)};
    };
    auto pow_apply = [&](std::size_t s, std::int64_t k, std::array<std::int64_t, 2> v) {
        if (k < 0) require(invertible_, "TorusSystem: inverse step in a semigroup system");
        const Mat2i& m = k >= 0 ? gens_[s] : inv_gens_[s];
        for (std::int64_t i = 0; i < std::llabs(k); ++i) v = step(m, v);
        return v;
    };
    auto v = pow_apply(0, g.a, p);
    if (group_.kind() == GroupKind::Z2) v = pow_apply(1, g.b, v);
    return v;
}

PseudoOrbit make_pseudo_orbit(const TorusSystem& sys, double delta, int radius,
                              std::uint64_t seed) {
    require(delta >= 0.0, "make_pseudo_orbit: delta must be >= 0");
    require(radius >= 0, "make_pseudo_orbit: radius must be >= 0");

    PseudoOrbit po;
    po.group = sys.group();
    po.semigroup = !sys.invertible();
    po.window = sys.window(radius);
    po.delta = delta;

    const std::int64_t mod = std::int64_t{1} << TorusSystem::kDyadicBits;
    std::uint64_t state = seed * 0x9e3779b97f4a7c15ULL + 0x1234567ULL;
    const std::array<std::int64_t, 2> base = {
        static_cast<std::int64_t>(splitmix64(state) % static_cast<std::uint64_t>(mod)),
        static_cast<std::int64_t>(splitmix64(state) % static_cast<std::uint64_t>(mod))};

    double lip = 1.0;
    for (const auto& m : sys.generators()) lip = std::max(lip, m.operator_norm());
    // Strict margin so the measured gap stays below delta.
    const double scale = 0.999 * delta / (1.0 + lip) / std::sqrt(2.0);

    po.values.reserve(po.window.size());
    for (const auto& g : po.window) {
        const auto num = sys.apply_element_dyadic(g, base);
        Vec2 v{static_cast<double>(num[0]) / static_cast<double>(mod),
               static_cast<double>(num[1]) / static_cast<double>(mod)};
        if (delta > 0.0) {
            v.x += scale * (2.0 * uniform01(state) - 1.0);
            v.y += scale * (2.0 * uniform01(state) - 1.0);
            v = torus_wrap(v);
        }
        po.values.push_back(v);
    }

    // Verify the defining inequality before handing the orbit out.
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> where;
    for (std::size_t k = 0; k < po.window.size(); ++k)
        where[{po.window[k].a, po.window[k].b}] = k;
    double gap = 0.0;
    for (std::size_t s = 0; s < sys.generators().size(); ++s) {
        const GroupElement gen = sys.group().generator(s);
        for (std::size_t k = 0; k < po.window.size(); ++k) {
            const GroupElement tgt = sys.group().multiply(gen, po.window[k]);
            const auto it = where.find({tgt.a, tgt.b});
            if (it == where.end()) continue;
            gap = std::max(gap,
                           torus_dist(torus_wrap(sys.generators()[s].apply(po.values[k])),
                                      po.values[it->second]));
        }
    }
    po.max_gap = gap;
    certify(delta == 0.0 ? gap == 0.0 : gap < delta,
            "make_pseudo_orbit: constructed orbit violates its own delta");
    return po;
}

namespace {

struct EigenSplit {
    bool real = true;
    double l1 = 0.0, l2 = 0.0;    // eigenvalues (real case) or modulus in l1 (complex)
    Vec2 v1{}, v2{};              // basis columns
    double cond = 1.0;            // condition number of the basis
};

double cond2(const Vec2& c1, const Vec2& c2) {
    // Condition number of the 2x2 matrix with columns c1, c2.
    const double a = c1.x, c = c1.y, b = c2.x, d = c2.y;
    const double f = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(f * f - 4.0 * det * det, 0.0);
    const double smax = std::sqrt((f + std::sqrt(disc)) / 2.0);
    const double smin2 = (f - std::sqrt(disc)) / 2.0;
    require(smin2 > 1e-24, "shadowing: eigenbasis is numerically singular");
    return smax / std::sqrt(smin2);
}

EigenSplit eigen_split(const Mat2i& a) {
    const double tr = static_cast<double>(a.a11 + a.a22);
    const double det = static_cast<double>(a.det());
    const double disc = tr * tr - 4.0 * det;
    EigenSplit es;
    if (disc > 1e-12) {
        es.real = true;
        const double sq = std::sqrt(disc);
        es.l1 = (tr - sq) / 2.0;
        es.l2 = (tr + sq) / 2.0;
        auto eigvec = [&](double lam) {
            Vec2 v{static_cast<double>(a.a12), lam - static_cast<double>(a.a11)};
            if (std::abs(v.x) + std::abs(v.y) < 1e-12)
                v = {lam - static_cast<double>(a.a22), static_cast<double>(a.a21)};
            const double n = std::sqrt(v.x * v.x + v.y * v.y);
            return Vec2{v.x / n, v.y / n};
        };
        es.v1 = eigvec(es.l1);
        es.v2 = eigvec(es.l2);
    } else if (disc < -1e-12) {
        es.real = false;
        es.l1 = std::sqrt(det);  // common modulus of the complex pair
        const double p = tr / 2.0;
        const double q = std::sqrt(-disc) / 2.0;
        // Real similarity A = W [[p,-q],[q,p]] W^-1 with W from the complex
        // eigenvector v_r + i v_i of lambda = p + i q.
        Vec2 vr{static_cast<double>(a.a12), p - static_cast<double>(a.a11)};
        Vec2 vi{0.0, q};
        if (std::abs(vr.x) + std::abs(vr.y) < 1e-12) {
            vr = {p - static_cast<double>(a.a22), static_cast<double>(a.a21)};
            vi = {q, 0.0};
        }
        es.v1 = vr;
        es.v2 = vi;
    } else {
        // Repeated eigenvalue: only the scalar case is diagonalizable.
        require(a.a12 == 0 && a.a21 == 0 && a.a11 == a.a22,
                "shadowing: defective repeated eigenvalue");
        es.real = true;
        es.l1 = es.l2 = tr / 2.0;
        es.v1 = {1.0, 0.0};
        es.v2 = {0.0, 1.0};
    }
    es.cond = cond2(es.v1, es.v2);
    return es;
}

void solve_component_forward(std::vector<double>& y, const std::vector<double>& e, double lam) {
    y[0] = 0.0;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) y[k + 1] = lam * y[k] - e[k];
}

void solve_component_backward(std::vector<double>& y, const std::vector<double>& e, double lam) {
    y.back() = 0.0;
    for (std::size_t k = y.size() - 1; k-- > 0;) y[k] = (y[k + 1] + e[k]) / lam;
}

}  // namespace

TracingResult shadow_hyperbolic_toral(const PseudoOrbit& po, const Mat2i& a) {
    require(po.group.kind() == GroupKind::Z, "shadow_hyperbolic_toral: window must be a Z interval");
    require(!po.window.empty(), "shadow_hyperbolic_toral: empty window");

    // Window times, sorted; the ball is an interval so they are consecutive.
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    for (std::size_t k = 0; k < po.window.size(); ++k) order.emplace_back(po.window[k].a, k);
    std::sort(order.begin(), order.end());
    const std::size_t n = order.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        require(order[k + 1].first == order[k].first + 1,
                "shadow_hyperbolic_toral: window is not an interval of Z");

    std::vector<Vec2> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = po.values[order[k].second];

    // Per-step errors e_k = p_{k+1} - A p_k, lifted to [-1/2, 1/2)^2.
    std::vector<Vec2> e(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) e[k] = torus_lift(p[k + 1], torus_wrap(a.apply(p[k])));

    const EigenSplit es = eigen_split(a);
    const double m1 = std::abs(es.l1), m2 = es.real ? std::abs(es.l2) : std::abs(es.l1);
    require(std::abs(m1 - 1.0) > 1e-6 && std::abs(m2 - 1.0) > 1e-6,
            "shadow_hyperbolic_toral: eigenvalue of modulus within 1e-6 of one (not hyperbolic)");

    // Coordinates of e in the eigenbasis (columns v1, v2).
    const double det_v = es.v1.x * es.v2.y - es.v2.x * es.v1.y;
    std::vector<double> e1(e.size()), e2(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        e1[k] = (e[k].x * es.v2.y - es.v2.x * e[k].y) / det_v;
        e2[k] = (es.v1.x * e[k].y - e[k].x * es.v1.y) / det_v;
    }

    std::vector<double> y1(n, 0.0), y2(n, 0.0);
    double expansion = std::max(m1, m2);
    double series_factor = 0.0;
    if (es.real) {
        auto solve = [&](std::vector<double>& y, const std::vector<double>& comp, double lam) {
            if (std::abs(lam) < 1.0) {
                solve_component_forward(y, comp, lam);
                series_factor = std::max(series_factor, 1.0 / (1.0 - std::abs(lam)));
            } else {
                solve_component_backward(y, comp, lam);
                series_factor = std::max(series_factor, 1.0 / (std::abs(lam) - 1.0));
            }
        };
        solve(y1, e1, es.l1);
        solve(y2, e2, es.l2);
    } else {
        // Complex pair lambda = p +- iq with eigenvector v1 + i v2: the
        // relations A v1 = p v1 - q v2 and A v2 = q v1 + p v2 make the
        // matrix [[p, q], [-q, p]] in the (v1, v2) coordinates.
        const double tr = static_cast<double>(a.a11 + a.a22);
        const double pr = tr / 2.0;
        const double q = std::sqrt(std::max(4.0 * static_cast<double>(a.det()) - tr * tr, 0.0)) / 2.0;
        const double mod2 = pr * pr + q * q;
        if (m1 > 1.0) {
            // inverse: (1/|lambda|^2) [[p, -q], [q, p]]
            y1[n - 1] = y2[n - 1] = 0.0;
            for (std::size_t k = n - 1; k-- > 0;) {
                const double ux = y1[k + 1] + e1[k];
                const double uy = y2[k + 1] + e2[k];
                y1[k] = (pr * ux - q * uy) / mod2;
                y2[k] = (q * ux + pr * uy) / mod2;
            }
            series_factor = 1.0 / (m1 - 1.0);
        } else {
            y1[0] = y2[0] = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                y1[k + 1] = pr * y1[k] + q * y2[k] - e1[k];
                y2[k + 1] = -q * y1[k] + pr * y2[k] - e2[k];
            }
            series_factor = 1.0 / (1.0 - m1);
        }
    }

    TracingResult out;
    out.constant = std::sqrt(2.0) * es.cond * series_factor;
    // Cutting the unstable backward series at the window edge; purely
    // contracting systems cut nothing.
    out.truncation = expansion > 1.0
                         ? std::pow(expansion, -static_cast<double>(n) / 2.0) * (std::sqrt(2.0) / 2.0)
                         : 0.0;
    out.orbit.resize(n);
    double eps = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 y{y1[k] * es.v1.x + y2[k] * es.v2.x, y1[k] * es.v1.y + y2[k] * es.v2.y};
        out.orbit[k] = torus_wrap({p[k].x + y.x, p[k].y + y.y});
        eps = std::max(eps, std::sqrt(y.x * y.x + y.y * y.y));
    }
    out.epsilon = eps;
    out.bound = out.constant * po.max_gap + out.truncation;
    // Anchor the tracing point at window time zero (the identity element).
    std::size_t zero_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (order[k].first == 0) zero_pos = k;
    out.point = out.orbit[zero_pos];

    double residual = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const Vec2 r = torus_lift(out.orbit[k + 1], torus_wrap(a.apply(out.orbit[k])));
        residual = std::max(residual, std::sqrt(r.x * r.x + r.y * r.y));
    }
    out.residual = residual;
    certify(residual <= 1e-9, "shadow_hyperbolic_toral: reconstructed orbit violates the recurrence");
    certify(eps <= out.bound + kTol, "shadow_hyperbolic_toral: tracing exceeded the certified bound");

    // Uniqueness scan: displaced starts within radius 2 eps, checked against
    // the same window. Only a falsification, never a proof.
    out.unique = true;
    const double step = std::max(eps / 2.0, 1e-9);
    const bool can_backward = a.unimodular();
    for (int oi = -4; oi <= 4 && out.unique; ++oi)
        for (int oj = -4; oj <= 4 && out.unique; ++oj) {
            const Vec2 off{oi * step, oj * step};
            const double off_norm = std::sqrt(off.x * off.x + off.y * off.y);
            if (off_norm <= step / 2.0 || off_norm > 2.0 * eps + 10.0 * step) continue;
            bool traces = true;
            // Forward from time zero.
            Vec2 u = off;
            for (std::size_t k = zero_pos; k < n && traces; ++k) {
                const Vec2 z{wrap_half(out.orbit[k].x - p[k].x + u.x),
                             wrap_half(out.orbit[k].y - p[k].y + u.y)};
                if (std::sqrt(z.x * z.x + z.y * z.y) > eps + kTol) traces = false;
                u = {wrap_half(static_cast<double>(a.a11) * u.x + static_cast<double>(a.a12) * u.y),
                     wrap_half(static_cast<double>(a.a21) * u.x + static_cast<double>(a.a22) * u.y)};
            }
            if (traces && can_backward && zero_pos > 0) {
                const Mat2i ainv = a.inverse();
                u = off;
                for (std::size_t k = zero_pos; k-- > 0 && traces;) {
                    u = {wrap_half(static_cast<double>(ainv.a11) * u.x +
                                   static_cast<double>(ainv.a12) * u.y),
                         wrap_half(static_cast<double>(ainv.a21) * u.x +
                                   static_cast<double>(ainv.a22) * u.y)};
                    const Vec2 z{wrap_half(out.orbit[k].x - p[k].x + u.x),
                                 wrap_half(out.orbit[k].y - p[k].y + u.y)};
                    if (std::sqrt(z.x * z.x + z.y * z.y) > eps + kTol) traces = false;
                }
            }
            if (traces) out.unique = false;
        }
    return out;
}

ExpansivityReport expansivity_certificate(const FiniteAction& alpha, double c, int horizon,
                                          const std::vector<std::pair<Index, Index>>& pairs) {
    require(c > 0.0, "expansivity_certificate: c must be > 0");
    const auto ball = alpha.ball(horizon);
    const auto maps = alpha.orbit_maps(ball);
    const auto& sp = *alpha.space();

    ExpansivityReport rep;
    rep.horizon = horizon;
    rep.pairs_checked = pairs.size();
    rep.min_separation = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        require(x < sp.size() && y < sp.size(), "expansivity_certificate: index out of range");
        if (x == y) continue;
        double sep = 0.0;
        for (const auto& m : maps) sep = std::max(sep, sp.dist(m(x), m(y)));
        rep.min_separation = std::min(rep.min_separation, sep);
        if (sep <= c && !rep.witness) {
            rep.expansive_on_sample = false;
            rep.witness = {x, y};
        }
    }
    if (pairs.empty()) rep.min_separation = 0.0;
    return rep;
}

int separation_set(const FiniteAction& alpha, Index x, double eps, double c, int horizon) {
    require(eps > 0.0 && c > 0.0, "separation_set: eps and c must be > 0");
    const auto& sp = *alpha.space();
    require(x < sp.size(), "separation_set: base point out of range");
    const auto ball = alpha.ball(horizon);
    const auto maps = alpha.orbit_maps(ball);

    // sep[r][y]: max displacement within word length r, built incrementally.
    std::vector<double> sep(sp.size(), 0.0);
    int best = -1;
    for (int r = 0; r <= horizon; ++r) {
        for (std::size_t k = 0; k < ball.size(); ++k) {
            if (alpha.group().word_length(ball[k]) != r) continue;
            const auto& m = maps[k];
            for (Index y = 0; y < sp.size(); ++y)
                sep[y] = std::max(sep[y], sp.dist(m(x), m(y)));
        }
        bool ok = true;
        for (Index y = 0; y < sp.size() && ok; ++y)
            if (y != x && sep[y] <= c && sp.dist(x, y) >= eps) ok = false;
        if (ok) return r;
        best = r;
    }
    throw refusal_error("separation_set: horizon " + std::to_string(horizon) +
                        " exhausted; best radius tried " + std::to_string(best));
}

ConjugacyResult build_conjugacy(const PointMap& u, const Homomorphism& rho,
                                const FiniteAction& alpha, const FiniteAction& beta,
                                double delta, int window_radius) {
    require(u.source->uid() == beta.space()->uid() && u.target->uid() == alpha.space()->uid(),
            "build_conjugacy: u must map beta's space into alpha's space");
    require(rho.source.kind() == alpha.group().kind() && rho.target.kind() == beta.group().kind(),
            "build_conjugacy: homomorphism endpoints do not match the actions");
    require(delta > 0.0, "build_conjugacy: delta must be > 0");

    const auto check = is_eps_isometry(u, delta);
    require(check.ok, "build_conjugacy: u is not a delta-isometry");

    const auto window = alpha.ball(window_radius);
    const auto amap = alpha.orbit_maps(window);
    std::vector<PointMap> bmap;
    bmap.reserve(window.size());
    for (const auto& g : window) bmap.push_back(beta.evaluate(rho.apply(g)));

    const auto& x_space = *alpha.space();
    const std::size_t nx = x_space.size();
    const std::size_t ny = beta.space()->size();

    // Generator-step defect: this is what makes the pulled-back families
    // (delta, S)-pseudo-orbits.
    for (std::size_t s = 0; s < alpha.group().generator_count(); ++s) {
        const PointMap as = alpha.generator_maps()[s];
        const PointMap bs = beta.evaluate(rho.apply(alpha.group().generator(s)));
        double defect = 0.0;
        for (Index ypt = 0; ypt < ny; ++ypt)
            defect = std::max(defect, x_space.dist(as(u(ypt)), u(bs(ypt))));
        require(defect < delta, "build_conjugacy: generator defect of u is not below delta");
    }

    std::vector<Index> himg(ny);
    double eps1 = 0.0;
    std::size_t non_unique = 0;
    std::vector<Index> po(window.size());
    for (Index ypt = 0; ypt < ny; ++ypt) {
        for (std::size_t k = 0; k < window.size(); ++k) po[k] = u(bmap[k](ypt));
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        Index arg = 0;
        for (Index cand = 0; cand < nx; ++cand) {
            double score = 0.0;
            for (std::size_t k = 0; k < window.size(); ++k) {
                score = std::max(score, x_space.dist(amap[k](cand), po[k]));
                if (score >= second) break;
            }
            if (score < best) {
                second = best;
                best = score;
                arg = cand;
            } else if (score < second) {
                second = score;
            }
        }
        himg[ypt] = arg;
        eps1 = std::max(eps1, best);
        if (second <= best + 1e-12) ++non_unique;
    }

    ConjugacyResult out;
    out.h = PointMap(beta.space(), alpha.space(), std::move(himg));
    out.eps1 = eps1;
    out.non_unique = non_unique;
    out.tolerance = 2.0 * eps1;

    certify(d_sup(out.h, u) <= eps1 + kTol, "build_conjugacy: d_sup(h, u) exceeds eps1");
    out.distortion = distortion(out.h);
    out.net_defect = net_defect(out.h);
    certify(out.distortion <= check.cert.distortion + 2.0 * eps1 + kTol,
            "build_conjugacy: distortion chain 2 eps1 + delta failed");
    certify(out.net_defect <= check.cert.net_defect + eps1 + kTol,
            "build_conjugacy: net-defect chain failed");

    double defect = 0.0;
    for (std::size_t k = 0; k < window.size(); ++k) {
        for (Index ypt = 0; ypt < ny; ++ypt)
            defect = std::max(defect, x_space.dist(amap[k](out.h(ypt)), out.h(bmap[k](ypt))));
    }
    out.equiv_defect = defect;
    certify(defect <= out.tolerance + kTol,
            "build_conjugacy: windowed equivariance defect exceeds 2 eps1");
    return out;
}

}  // namespace eqgh
