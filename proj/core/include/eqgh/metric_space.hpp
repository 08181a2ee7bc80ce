#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqgh/common.hpp"

namespace eqgh {

class FiniteMetricSpace;
using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// A finite metric space: n labelled points with a full symmetric distance
/// matrix. Product spaces keep their factors and evaluate the l2 product
/// metric lazily, so a 16k-point product never materializes an n^2 matrix.
///
/// Metric axioms are checked on construction to tolerance 1e-9; spaces above
/// the exhaustive-check threshold are checked on a deterministic triple
/// sample. Instances are immutable and identified by a process-unique id.
class FiniteMetricSpace {
public:
    // Dense space from a row-major n*n matrix.
    static SpacePtr from_matrix(std::vector<std::string> point_ids, std::vector<double> dist);

    // Cartesian product with the l2 product metric. Nested products are
    // flattened; every factor must be a dense space. Guard: <= 20000 points.
    static SpacePtr product(const std::vector<SpacePtr>& factors);

    std::size_t size() const { return n_; }
    std::uint64_t uid() const { return uid_; }
    double diameter() const { return diameter_; }
    const std::string& point_id(Index i) const { return ids_[i]; }
    const std::vector<std::string>& point_ids() const { return ids_; }

    bool is_product() const { return !factors_.empty(); }
    const std::vector<SpacePtr>& factors() const { return factors_; }

    // Index of the product point with the given per-factor indices.
    Index compose_index(const std::vector<Index>& parts) const;
    // Per-factor index of product point i.
    Index factor_index(std::size_t factor, Index i) const { return factor_index_[factor][i]; }

    double dist(Index i, Index j) const {
        if (factors_.empty()) return dense_[static_cast<std::size_t>(i) * n_ + j];
        double s = 0.0;
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            const double d = factors_[k]->dense_[static_cast<std::size_t>(factor_index_[k][i]) * factors_[k]->n_ +
                                                 factor_index_[k][j]];
            s += d * d;
        }
        return sqrt_(s);
    }

    // Max number of points accepted by product().
    static constexpr std::size_t kProductGuard = 20000;

private:
    FiniteMetricSpace() = default;
    void verify_metric() const;
    static double sqrt_(double x);

    std::size_t n_ = 0;
    std::uint64_t uid_ = 0;
    double diameter_ = 0.0;
    std::vector<std::string> ids_;
    std::vector<double> dense_;                      // leaf spaces only
    std::vector<SpacePtr> factors_;                  // product spaces only
    std::vector<std::vector<Index>> factor_index_;   // [factor][point] -> factor point
};

/// A map between two registered spaces, stored as an image array.
struct PointMap {
    SpacePtr source;
    SpacePtr target;
    std::vector<Index> image;

    PointMap() = default;
    PointMap(SpacePtr src, SpacePtr dst, std::vector<Index> img);

    Index operator()(Index i) const { return image[i]; }
    std::size_t domain_size() const { return image.size(); }

    static PointMap identity(const SpacePtr& s);
    static PointMap constant(const SpacePtr& src, const SpacePtr& dst, Index value);
    // g(f(x)); f.target must equal g.source.
    static PointMap compose(const PointMap& g, const PointMap& f);

    bool is_bijection() const;
    PointMap inverse() const;  // precondition: bijection
};

/// A relation between two point sets, surjective onto both sides.
struct Correspondence {
    SpacePtr source;
    SpacePtr target;
    std::vector<std::pair<Index, Index>> pairs;

    Correspondence(SpacePtr src, SpacePtr dst, std::vector<std::pair<Index, Index>> prs);
    double distortion() const;
};

/// Certificate that a map is an eps-GH approximation: both the metric
/// distortion and the covering defect of the image are recorded.
struct GhaCertificate {
    double epsilon = 0.0;
    double distortion = 0.0;
    double net_defect = 0.0;
    PointMap forward;
    std::optional<PointMap> backward;
};

}  // namespace eqgh
