#include "eqgh/group_actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqgh {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

GeneratedGroup GeneratedGroup::z() {
    GeneratedGroup g;
    g.kind_ = GroupKind::Z;
    return g;
}

GeneratedGroup GeneratedGroup::z2() {
    GeneratedGroup g;
    g.kind_ = GroupKind::Z2;
    return g;
}

GeneratedGroup GeneratedGroup::cyclic(int modulus) {
    require(modulus >= 1, "cyclic: modulus must be >= 1");
    GeneratedGroup g;
    g.kind_ = GroupKind::Cyclic;
    g.param_ = modulus;
    return g;
}

GeneratedGroup GeneratedGroup::free_monoid(int letter_count) {
    require(letter_count >= 1 && letter_count <= 255, "free_monoid: bad letter count");
    GeneratedGroup g;
    g.kind_ = GroupKind::FreeMonoid;
    g.param_ = letter_count;
    return g;
}

std::size_t GeneratedGroup::generator_count() const {
    switch (kind_) {
        case GroupKind::Z: return 1;
        case GroupKind::Z2: return 2;
        case GroupKind::Cyclic: return 1;
        case GroupKind::FreeMonoid: return static_cast<std::size_t>(param_);
    }
    return 0;
}

GroupElement GeneratedGroup::generator(std::size_t s) const {
    require(s < generator_count(), "generator: index out of range");
    GroupElement g;
    switch (kind_) {
        case GroupKind::Z:
        case GroupKind::Cyclic: g.a = 1; break;
        case GroupKind::Z2:
            if (s == 0)
                g.a = 1;
            else
                g.b = 1;
            break;
        case GroupKind::FreeMonoid: g.letters = {static_cast<std::uint8_t>(s)}; break;
    }
    return g;
}

GroupElement GeneratedGroup::multiply(const GroupElement& g, const GroupElement& h) const {
    GroupElement r;
    switch (kind_) {
        case GroupKind::Z: r.a = g.a + h.a; break;
        case GroupKind::Z2:
            r.a = g.a + h.a;
            r.b = g.b + h.b;
            break;
        case GroupKind::Cyclic: r.a = mod_pos(g.a + h.a, param_); break;
        case GroupKind::FreeMonoid:
            r.letters = g.letters;
            r.letters.insert(r.letters.end(), h.letters.begin(), h.letters.end());
            break;
    }
    return r;
}

GroupElement GeneratedGroup::power(const GroupElement& g, std::int64_t k) const {
    GroupElement r;
    switch (kind_) {
        case GroupKind::Z: r.a = g.a * k; break;
        case GroupKind::Z2:
            r.a = g.a * k;
            r.b = g.b * k;
            break;
        case GroupKind::Cyclic: r.a = mod_pos(g.a * k, param_); break;
        case GroupKind::FreeMonoid: {
            require(k >= 0, "power: negative power in a free monoid");
            for (std::int64_t i = 0; i < k; ++i)
                r.letters.insert(r.letters.end(), g.letters.begin(), g.letters.end());
            break;
        }
    }
    return r;
}

int GeneratedGroup::word_length(const GroupElement& g) const {
    switch (kind_) {
        case GroupKind::Z: return static_cast<int>(std::llabs(g.a));
        case GroupKind::Z2: return static_cast<int>(std::llabs(g.a) + std::llabs(g.b));
        case GroupKind::Cyclic: {
            const std::int64_t a = mod_pos(g.a, param_);
            return static_cast<int>(std::min(a, param_ - a));
        }
        case GroupKind::FreeMonoid: return static_cast<int>(g.letters.size());
    }
    return 0;
}

std::string GeneratedGroup::to_string(const GroupElement& g) const {
    switch (kind_) {
        case GroupKind::Z: return std::to_string(g.a);
        case GroupKind::Z2: return "(" + std::to_string(g.a) + "," + std::to_string(g.b) + ")";
        case GroupKind::Cyclic: return std::to_string(mod_pos(g.a, param_)) + " mod " + std::to_string(param_);
        case GroupKind::FreeMonoid: {
            std::string s;
            for (std::uint8_t l : g.letters) s += static_cast<char>('a' + l);
            return s.empty() ? "e" : s;
        }
    }
    return "?";
}

std::vector<GroupElement> GeneratedGroup::ball(int radius, bool semigroup) const {
    require(radius >= 0, "ball: radius must be >= 0");
    std::vector<GroupElement> out;
    switch (kind_) {
        case GroupKind::Z: {
            const std::int64_t lo = semigroup ? 0 : -static_cast<std::int64_t>(radius);
            for (std::int64_t a = lo; a <= radius; ++a) out.push_back({a, 0, {}});
            break;
        }
        case GroupKind::Z2: {
            for (std::int64_t a = semigroup ? 0 : -radius; a <= radius; ++a) {
                const std::int64_t rem = radius - std::llabs(a);
                for (std::int64_t b = semigroup ? 0 : -rem; b <= rem; ++b) out.push_back({a, b, {}});
            }
            break;
        }
        case GroupKind::Cyclic: {
            for (std::int64_t a = 0; a < param_; ++a) {
                const int len = semigroup ? static_cast<int>(a)
                                          : static_cast<int>(std::min(a, param_ - a));
                if (len <= radius) out.push_back({a, 0, {}});
            }
            break;
        }
        case GroupKind::FreeMonoid: {
            std::size_t count = 1, layer = 1;
            for (int r = 1; r <= radius; ++r) {
                layer *= static_cast<std::size_t>(param_);
                count += layer;
                require(count <= 2'000'000, "ball: free monoid ball too large");
            }
            out.push_back({});
            std::size_t begin = 0;
            for (int r = 1; r <= radius; ++r) {
                const std::size_t end = out.size();
                for (std::size_t i = begin; i < end; ++i)
                    for (int l = 0; l < param_; ++l) {
                        GroupElement w = out[i];
                        w.letters.push_back(static_cast<std::uint8_t>(l));
                        out.push_back(std::move(w));
                    }
                begin = end;
            }
            break;
        }
    }
    std::stable_sort(out.begin(), out.end(), [this](const GroupElement& x, const GroupElement& y) {
        const int lx = word_length(x), ly = word_length(y);
        if (lx != ly) return lx < ly;
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.letters < y.letters;
    });
    return out;
}

FiniteAction::FiniteAction(GeneratedGroup group, SpacePtr space, std::vector<PointMap> gen_maps,
                           ActionMode mode)
    : group_(std::move(group)), space_(std::move(space)), gen_maps_(std::move(gen_maps)), mode_(mode) {
    require(space_ != nullptr, "action: null space");
    require(gen_maps_.size() == group_.generator_count(), "action: one map per generator required");
    for (const auto& m : gen_maps_) {
        require(m.source->uid() == space_->uid() && m.target->uid() == space_->uid(),
                "action: generator map must be a self-map of the space");
    }
    if (mode_ == ActionMode::Group) {
        for (const auto& m : gen_maps_) {
            require(m.is_bijection(), "action: group mode requires bijective generators");
            inv_maps_.push_back(m.inverse());
        }
    }
    // Relations of the kind, checked at index level.
    switch (group_.kind()) {
        case GroupKind::Z: break;
        case GroupKind::Z2: {
            const PointMap st = PointMap::compose(gen_maps_[0], gen_maps_[1]);
            const PointMap ts = PointMap::compose(gen_maps_[1], gen_maps_[0]);
            require(st.image == ts.image, "action: Z2 generators do not commute");
            break;
        }
        case GroupKind::Cyclic: {
            PointMap p = PointMap::identity(space_);
            for (int i = 0; i < group_.param(); ++i) p = PointMap::compose(gen_maps_[0], p);
            require(p.image == PointMap::identity(space_).image,
                    "action: cyclic generator order does not divide the modulus");
            break;
        }
        case GroupKind::FreeMonoid: break;
    }
}

PointMap FiniteAction::evaluate(const GroupElement& g) const {
    auto pow_map = [&](std::size_t s, std::int64_t k) {
        PointMap p = PointMap::identity(space_);
        if (k >= 0) {
            for (std::int64_t i = 0; i < k; ++i) p = PointMap::compose(gen_maps_[s], p);
        } else {
            require(mode_ == ActionMode::Group, "evaluate: inverse power in semigroup mode");
            for (std::int64_t i = 0; i < -k; ++i) p = PointMap::compose(inv_maps_[s], p);
        }
        return p;
    };
    switch (group_.kind()) {
        case GroupKind::Z: return pow_map(0, g.a);
        case GroupKind::Cyclic: {
            const std::int64_t a = mod_pos(g.a, group_.param());
            // Use the shorter direction when inverses exist.
            if (mode_ == ActionMode::Group && a > group_.param() - a)
                return pow_map(0, a - group_.param());
            return pow_map(0, a);
        }
        case GroupKind::Z2: return PointMap::compose(pow_map(0, g.a), pow_map(1, g.b));
        case GroupKind::FreeMonoid: {
            PointMap p = PointMap::identity(space_);
            for (auto it = g.letters.rbegin(); it != g.letters.rend(); ++it)
                p = PointMap::compose(gen_maps_[*it], p);
            return p;
        }
    }
    return PointMap::identity(space_);
}

std::vector<PointMap> FiniteAction::orbit_maps(const std::vector<GroupElement>& elements) const {
    std::vector<PointMap> out;
    out.reserve(elements.size());
    for (const auto& g : elements) out.push_back(evaluate(g));
    return out;
}

GroupElement Homomorphism::apply(const GroupElement& g) const {
    switch (source.kind()) {
        case GroupKind::Z: return target.power(gen_images[0], g.a);
        case GroupKind::Cyclic: return target.power(gen_images[0], mod_pos(g.a, source.param()));
        case GroupKind::Z2:
            return target.multiply(target.power(gen_images[0], g.a),
                                   target.power(gen_images[1], g.b));
        case GroupKind::FreeMonoid: {
            GroupElement r = target.identity();
            for (std::uint8_t l : g.letters) r = target.multiply(r, gen_images[l]);
            return r;
        }
    }
    return target.identity();
}

std::string Homomorphism::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < gen_images.size(); ++i) {
        if (i) s += ", ";
        s += target.to_string(gen_images[i]);
    }
    return s + "]";
}

std::vector<Homomorphism> enumerate_homomorphisms(const GeneratedGroup& source,
                                                  const GeneratedGroup& target, int radius,
                                                  bool target_semigroup) {
    const auto candidates = target.ball(radius, target_semigroup);
    std::vector<Homomorphism> out;
    auto commutes = [&](const GroupElement& x, const GroupElement& y) {
        return target.multiply(x, y) == target.multiply(y, x);
    };
    switch (source.kind()) {
        case GroupKind::Z: {
            for (const auto& h : candidates) out.push_back({source, target, {h}});
            break;
        }
        case GroupKind::Z2: {
            for (const auto& h1 : candidates)
                for (const auto& h2 : candidates)
                    if (commutes(h1, h2)) out.push_back({source, target, {h1, h2}});
            break;
        }
        case GroupKind::Cyclic: {
            for (const auto& h : candidates)
                if (target.power(h, source.param()) == target.identity())
                    out.push_back({source, target, {h}});
            break;
        }
        case GroupKind::FreeMonoid: {
            // No relations: every tuple of images works. Kept to pairs of
            // letters at most to avoid exponential blowups.
            require(source.generator_count() <= 2,
                    "enumerate_homomorphisms: free monoid sources limited to 2 letters");
            if (source.generator_count() == 1) {
                for (const auto& h : candidates) out.push_back({source, target, {h}});
            } else {
                for (const auto& h1 : candidates)
                    for (const auto& h2 : candidates) out.push_back({source, target, {h1, h2}});
            }
            break;
        }
    }
    return out;
}

double d_sup(const PointMap& f, const PointMap& g) {
    require(f.source->uid() == g.source->uid() && f.target->uid() == g.target->uid(),
            "d_sup: maps must share source and target");
    double worst = 0.0;
    for (Index i = 0; i < f.domain_size(); ++i)
        worst = std::max(worst, f.target->dist(f(i), g(i)));
    return worst;
}

double d_S(const FiniteAction& alpha, const FiniteAction& beta) {
    require(alpha.space()->uid() == beta.space()->uid(), "d_S: actions must share a space");
    require(alpha.group().kind() == beta.group().kind(), "d_S: actions of different groups");
    double worst = 0.0;
    for (std::size_t s = 0; s < alpha.generator_maps().size(); ++s)
        worst = std::max(worst, d_sup(alpha.generator_maps()[s], beta.generator_maps()[s]));
    return worst;
}

double equivariant_defect(const PointMap& f, const FiniteAction& alpha, const FiniteAction& beta) {
    require(f.source->uid() == alpha.space()->uid() && f.target->uid() == beta.space()->uid(),
            "equivariant_defect: map must send alpha's space to beta's space");
    require(alpha.group().kind() == beta.group().kind(),
            "equivariant_defect: actions of different groups");
    const auto& y = *beta.space();
    double worst = 0.0;
    for (std::size_t s = 0; s < alpha.generator_maps().size(); ++s) {
        const auto& as = alpha.generator_maps()[s];
        const auto& bs = beta.generator_maps()[s];
        for (Index i = 0; i < f.domain_size(); ++i)
            worst = std::max(worst, y.dist(bs(f(i)), f(as(i))));
    }
    return worst;
}

namespace {

MapSearchSpec equivariant_spec(const FiniteAction& alpha, const FiniteAction& beta,
                               std::size_t budget, std::vector<PointMap> seeds) {
    // Searched map goes alpha.space -> beta.space.
    MapSearchSpec spec{alpha.space(), beta.space()};
    for (std::size_t s = 0; s < alpha.generator_maps().size(); ++s) {
        EquivariantConstraint c;
        c.src_loop = alpha.generator_maps()[s].image;
        c.dst_loop = beta.generator_maps()[s].image;
        spec.constraints.push_back(std::move(c));
    }
    spec.extra_seeds = std::move(seeds);
    spec.budget = budget;
    return spec;
}

}  // namespace

EquivariantCertificate dgh_s_upper(const FiniteAction& alpha, const FiniteAction& beta,
                                   std::size_t budget, std::vector<PointMap> fwd_seeds,
                                   std::vector<PointMap> bwd_seeds) {
    require(alpha.group().kind() == beta.group().kind() &&
                alpha.group().param() == beta.group().param(),
            "dgh_s_upper: actions must share the generated group");
    const MapSearchResult rf =
        search_map(equivariant_spec(alpha, beta, budget, std::move(fwd_seeds)));
    const MapSearchResult rb =
        search_map(equivariant_spec(beta, alpha, budget, std::move(bwd_seeds)));

    EquivariantCertificate cert;
    cert.forward = rf.map;
    cert.backward = rb.map;
    cert.fwd_distortion = rf.distortion;
    cert.fwd_net = rf.net_defect;
    cert.fwd_equiv = rf.equiv_defect;
    cert.bwd_distortion = rb.distortion;
    cert.bwd_net = rb.net_defect;
    cert.bwd_equiv = rb.equiv_defect;
    cert.epsilon = std::max(rf.score, rb.score);

    if (alpha.space()->uid() == beta.space()->uid())
        certify(cert.epsilon <= d_S(alpha, beta) + kTol,
                "dgh_s_upper: certificate exceeds d_S on a common space");
    return cert;
}

OneSidedCertificate dgh1_upper_with_rho(const FiniteAction& alpha, const FiniteAction& beta,
                                        const Homomorphism& rho, std::size_t budget,
                                        int g_ball_radius, std::vector<PointMap> seeds) {
    require(rho.source.kind() == alpha.group().kind() && rho.target.kind() == beta.group().kind(),
            "dgh1_upper: homomorphism endpoints do not match the actions");
    // The pulled-back generator maps must satisfy the source relations.
    switch (alpha.group().kind()) {
        case GroupKind::Z2: {
            const auto s = beta.evaluate(rho.apply(alpha.group().generator(0)));
            const auto t = beta.evaluate(rho.apply(alpha.group().generator(1)));
            require(PointMap::compose(s, t).image == PointMap::compose(t, s).image,
                    "dgh1_upper: pulled-back Z2 generators do not commute");
            break;
        }
        case GroupKind::Cyclic: {
            const auto s = beta.evaluate(rho.apply(alpha.group().generator(0)));
            PointMap p = PointMap::identity(beta.space());
            for (int i = 0; i < alpha.group().param(); ++i) p = PointMap::compose(s, p);
            require(p.image == PointMap::identity(beta.space()).image,
                    "dgh1_upper: pulled-back cyclic relation fails");
            break;
        }
        default: break;
    }
    const auto ball = alpha.ball(g_ball_radius);

    // The searched map goes beta.space -> alpha.space.
    MapSearchSpec spec{beta.space(), alpha.space()};
    spec.budget = budget;
    spec.extra_seeds = std::move(seeds);
    const auto gens = [&] {
        std::vector<GroupElement> g;
        for (std::size_t s = 0; s < alpha.group().generator_count(); ++s)
            g.push_back(alpha.group().generator(s));
        return g;
    }();
    for (const auto& g : ball) {
        if (g == alpha.group().identity()) continue;
        EquivariantConstraint c;
        c.src_loop = beta.evaluate(rho.apply(g)).image;
        c.dst_loop = alpha.evaluate(g).image;
        if (std::find(gens.begin(), gens.end(), g) != gens.end())
            spec.chain_generators.push_back(spec.constraints.size());
        spec.constraints.push_back(std::move(c));
    }
    const MapSearchResult r = search_map(spec);

    OneSidedCertificate cert;
    cert.epsilon = r.score;
    cert.rho = rho;
    cert.map = r.map;
    cert.distortion = r.distortion;
    cert.net = r.net_defect;
    cert.equiv = r.equiv_defect;
    cert.ball_radius = g_ball_radius;
    cert.ball_truncated = !(alpha.group().kind() == GroupKind::Cyclic &&
                            static_cast<int>(ball.size()) == alpha.group().param());
    return cert;
}

OneSidedCertificate dgh1_upper(const FiniteAction& alpha, const FiniteAction& beta,
                               std::size_t budget, int g_ball_radius, int rho_radius) {
    const auto rhos =
        enumerate_homomorphisms(alpha.group(), beta.group(), rho_radius,
                                beta.mode() == ActionMode::Semigroup);
    require(!rhos.empty(), "dgh1_upper: no homomorphism candidates");
    const std::size_t per = std::max<std::size_t>(budget / rhos.size(), 1000);
    OneSidedCertificate best;
    best.epsilon = std::numeric_limits<double>::infinity();
    for (const auto& rho : rhos) {
        OneSidedCertificate c = dgh1_upper_with_rho(alpha, beta, rho, per, g_ball_radius);
        if (c.epsilon < best.epsilon - 1e-15) best = c;
    }
    return best;
}

TwoSidedCertificate dgh2_upper(const FiniteAction& alpha, const FiniteAction& beta,
                               std::size_t budget, int g_ball_radius, int rho_radius) {
    TwoSidedCertificate cert;
    cert.forward = dgh1_upper(alpha, beta, budget, g_ball_radius, rho_radius);
    cert.backward = dgh1_upper(beta, alpha, budget, g_ball_radius, rho_radius);
    cert.epsilon = std::max(cert.forward.epsilon, cert.backward.epsilon);
    return cert;
}

bool is_isometric_action(const FiniteAction& alpha) {
    for (const auto& m : alpha.generator_maps())
        if (distortion(m) > 1e-12) return false;
    for (const auto& m : alpha.inverse_maps())
        if (distortion(m) > 1e-12) return false;
    return true;
}

QuasimetricReport quasimetric_report(const FiniteAction& alpha, const FiniteAction& beta,
                                     const FiniteAction& gamma, std::size_t budget) {
    const EquivariantCertificate ag = dgh_s_upper(alpha, gamma, budget);
    const EquivariantCertificate gb = dgh_s_upper(gamma, beta, budget);
    const PointMap through_fwd = PointMap::compose(gb.forward, ag.forward);    // X -> Y
    const PointMap through_bwd = PointMap::compose(ag.backward, gb.backward);  // Y -> X
    const EquivariantCertificate ab =
        dgh_s_upper(alpha, beta, budget, {through_fwd}, {through_bwd});
    const EquivariantCertificate ba =
        dgh_s_upper(beta, alpha, budget, {through_bwd}, {through_fwd});

    QuasimetricReport rep;
    rep.cert_ab = ab.epsilon;
    rep.cert_ba = ba.epsilon;
    rep.cert_ag = ag.epsilon;
    rep.cert_gb = gb.epsilon;
    rep.symmetric = std::abs(ab.epsilon - ba.epsilon) <= kTol;

    const GhaSearchResult hat = gha_search(alpha.space(), beta.space(), budget);
    rep.hat_gh = std::min(hat.epsilon,
                          std::max({ab.fwd_distortion, ab.fwd_net, ab.bwd_distortion, ab.bwd_net}));
    rep.hat_below_equivariant = rep.hat_gh <= ab.epsilon + kTol;

    if (alpha.space()->uid() == beta.space()->uid()) {
        rep.d_s = d_S(alpha, beta);
        rep.bounded_by_d_s = ab.epsilon <= rep.d_s + kTol;
    }
    rep.relaxed_triangle = ab.epsilon <= 2 * (ag.epsilon + gb.epsilon) + kTol;
    return rep;
}

}  // namespace eqgh
