#include "eqgh/metric_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace eqgh {

namespace {

std::uint64_t next_uid() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

// Full triangle check is O(n^3); above this size we fall back to a seeded
// triple sample, which keeps construction of 1k-point grids cheap.
constexpr std::size_t kExhaustiveCheckLimit = 300;
constexpr std::size_t kSampledTriples = 2'000'000;

}  // namespace

double FiniteMetricSpace::sqrt_(double x) { return std::sqrt(x); }

void FiniteMetricSpace::verify_metric() const {
    const std::size_t n = n_;
    for (Index i = 0; i < n; ++i) {
        require(dist(i, i) <= kMetricTol, "metric space: dist(i,i) != 0");
        for (Index j = i + 1; j < n; ++j) {
            const double dij = dist(i, j);
            require(std::abs(dij - dist(j, i)) <= kMetricTol, "metric space: matrix not symmetric");
            require(dij > 0.0, "metric space: distinct points at distance 0");
        }
    }
    auto check_triple = [&](Index i, Index j, Index k) {
        require(dist(i, j) <= dist(i, k) + dist(k, j) + kMetricTol,
                "metric space: triangle inequality violated");
    };
    if (n <= kExhaustiveCheckLimit) {
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index k = 0; k < n; ++k) check_triple(i, j, k);
    } else {
        std::uint64_t rng = 0x5eedULL ^ (static_cast<std::uint64_t>(n) << 32);
        for (std::size_t t = 0; t < kSampledTriples; ++t) {
            const Index i = static_cast<Index>(splitmix64(rng) % n);
            const Index j = static_cast<Index>(splitmix64(rng) % n);
            const Index k = static_cast<Index>(splitmix64(rng) % n);
            check_triple(i, j, k);
        }
    }
}

SpacePtr FiniteMetricSpace::from_matrix(std::vector<std::string> point_ids, std::vector<double> dist) {
    const std::size_t n = point_ids.size();
    require(n >= 1, "metric space: needs at least one point");
    require(dist.size() == n * n, "metric space: matrix size mismatch");
    for (double d : dist) require(d >= 0.0 && std::isfinite(d), "metric space: distances must be finite and >= 0");

    auto sp = std::shared_ptr<FiniteMetricSpace>(new FiniteMetricSpace());
    sp->n_ = n;
    sp->uid_ = next_uid();
    sp->ids_ = std::move(point_ids);
    sp->dense_ = std::move(dist);
    sp->diameter_ = *std::max_element(sp->dense_.begin(), sp->dense_.end());
    sp->verify_metric();
    return sp;
}

SpacePtr FiniteMetricSpace::product(const std::vector<SpacePtr>& factors) {
    require(!factors.empty(), "product: needs at least one factor");
    // Flatten nested products; the l2 metric is associative.
    std::vector<SpacePtr> leaves;
    for (const auto& f : factors) {
        require(f != nullptr, "product: null factor");
        if (f->is_product())
            leaves.insert(leaves.end(), f->factors_.begin(), f->factors_.end());
        else
            leaves.push_back(f);
    }
    std::size_t n = 1;
    double diam2 = 0.0;
    for (const auto& f : leaves) {
        n *= f->size();
        diam2 += f->diameter() * f->diameter();
        require(n <= kProductGuard, "product: size guard exceeded (20000 points)");
    }

    auto sp = std::shared_ptr<FiniteMetricSpace>(new FiniteMetricSpace());
    sp->n_ = n;
    sp->uid_ = next_uid();
    sp->factors_ = leaves;
    sp->diameter_ = std::sqrt(diam2);
    sp->factor_index_.assign(leaves.size(), std::vector<Index>(n));
    sp->ids_.resize(n);
    for (Index i = 0; i < n; ++i) {
        std::size_t rem = i;
        std::string id;
        for (std::size_t k = leaves.size(); k-- > 0;) {
            const Index part = static_cast<Index>(rem % leaves[k]->size());
            rem /= leaves[k]->size();
            sp->factor_index_[k][i] = part;
        }
        for (std::size_t k = 0; k < leaves.size(); ++k) {
            if (k) id += '|';
            id += leaves[k]->point_id(sp->factor_index_[k][i]);
        }
        sp->ids_[i] = std::move(id);
    }
    // Factors were verified on their own construction, and the l2 product
    // of metrics is a metric; no per-pair re-verification.
    return sp;
}

Index FiniteMetricSpace::compose_index(const std::vector<Index>& parts) const {
    require(is_product() && parts.size() == factors_.size(), "compose_index: arity mismatch");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        require(parts[k] < factors_[k]->size(), "compose_index: factor index out of range");
        idx = idx * factors_[k]->size() + parts[k];
    }
    return static_cast<Index>(idx);
}

PointMap::PointMap(SpacePtr src, SpacePtr dst, std::vector<Index> img)
    : source(std::move(src)), target(std::move(dst)), image(std::move(img)) {
    require(source && target, "map: null space");
    require(image.size() == source->size(), "map: image length != |source|");
    for (Index v : image) require(v < target->size(), "map: image entry out of range");
}

PointMap PointMap::identity(const SpacePtr& s) {
    std::vector<Index> img(s->size());
    for (Index i = 0; i < img.size(); ++i) img[i] = i;
    return PointMap(s, s, std::move(img));
}

PointMap PointMap::constant(const SpacePtr& src, const SpacePtr& dst, Index value) {
    require(value < dst->size(), "map: constant value out of range");
    return PointMap(src, dst, std::vector<Index>(src->size(), value));
}

PointMap PointMap::compose(const PointMap& g, const PointMap& f) {
    require(f.target->uid() == g.source->uid(), "compose: inner spaces differ");
    std::vector<Index> img(f.image.size());
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = g.image[f.image[i]];
    return PointMap(f.source, g.target, std::move(img));
}

bool PointMap::is_bijection() const {
    if (source->size() != target->size()) return false;
    std::vector<bool> hit(target->size(), false);
    for (Index v : image) {
        if (hit[v]) return false;
        hit[v] = true;
    }
    return true;
}

PointMap PointMap::inverse() const {
    require(is_bijection(), "inverse: map is not a bijection");
    std::vector<Index> img(target->size());
    for (Index i = 0; i < image.size(); ++i) img[image[i]] = i;
    return PointMap(target, source, std::move(img));
}

Correspondence::Correspondence(SpacePtr src, SpacePtr dst, std::vector<std::pair<Index, Index>> prs)
    : source(std::move(src)), target(std::move(dst)), pairs(std::move(prs)) {
    require(source && target, "correspondence: null space");
    std::vector<bool> s(source->size(), false), t(target->size(), false);
    for (const auto& [a, b] : pairs) {
        require(a < source->size() && b < target->size(), "correspondence: index out of range");
        s[a] = true;
        t[b] = true;
    }
    for (bool v : s) require(v, "correspondence: not surjective onto source");
    for (bool v : t) require(v, "correspondence: not surjective onto target");
}

double Correspondence::distortion() const {
    double dis = 0.0;
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = a; b < pairs.size(); ++b) {
            const double dx = source->dist(pairs[a].first, pairs[b].first);
            const double dy = target->dist(pairs[a].second, pairs[b].second);
            dis = std::max(dis, std::abs(dx - dy));
        }
    return dis;
}

}  // namespace eqgh
