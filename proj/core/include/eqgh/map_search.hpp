#pragma once

#include <vector>

#include "eqgh/metric_space.hpp"

namespace eqgh {

/// One intertwining requirement on a searched map f: source -> target,
/// scored as max_i d_target(dst_loop[f(i)], f(src_loop[i])).
struct EquivariantConstraint {
    std::vector<Index> src_loop;  // self-map of the source
    std::vector<Index> dst_loop;  // self-map of the target
};

struct MapSearchSpec {
    SpacePtr source;
    SpacePtr target;
    std::vector<EquivariantConstraint> constraints;
    // Indices into `constraints` whose src_loops are treated as generators
    // when building orbit-propagated seeds. Empty means all constraints.
    std::vector<std::size_t> chain_generators;
    std::vector<PointMap> extra_seeds;
    bool include_net_defect = true;
    std::size_t budget = 200000;  // candidate evaluations
    std::uint64_t seed = 0;
};

struct MapSearchResult {
    PointMap map;
    double score = 0.0;  // max(distortion, net_defect if scored, equiv_defect)
    double distortion = 0.0;
    double net_defect = 0.0;
    double equiv_defect = 0.0;
    std::size_t evaluations = 0;
};

/// Deterministic search for a low-defect map: greedy anchor seeds, orbit
/// propagation seeds when constraints are present, then local point swaps
/// accepted on a lexicographic (max term, sum of squared terms) score.
MapSearchResult search_map(const MapSearchSpec& spec);

/// Scores an externally supplied map against the same terms.
MapSearchResult score_map(const MapSearchSpec& spec, const PointMap& f);

}  // namespace eqgh
