#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgb/qgeo.hpp"
#include "qgb/space.hpp"

namespace qgb::boundary {

using qgeo::QuasiGeodesic;

// ---------------------------------------------------------------------------
// Inverse system of fan levels with restriction retractions.

struct InverseSystem {
    std::vector<qgeo::FanResult> levels;  // levels[n-1] = S_n
    bool retractions_ok = false;
    bool truncated = false;
};

InverseSystem build_inverse_system(const SpaceHandle& s, double q, double Q,
                                   std::int64_t n_max, std::uint64_t budget);

// ---------------------------------------------------------------------------
// Finite-scale merge criterion.
//
// Two (k,k)-rays are declared merged when, in both directions, the cones of
// one ray contain at least T witnessed points of the other with cone index
// >= max(m*, delta_depth * N). Witness paths are full quasi-geodesic
// extensions at constants (k, 0); since those cones sit inside the (k, k)
// cones, witnesses certify the merge criterion at every scale m <= m*.
// Distinctness is only ever claimed when a complete relaxed search proves
// the scale-m* cone empty of the other ray's points.

enum class MergeStatus {
    Merged,
    NotMergedWithinBudget,
    ProvablyDisjointAtScale,
};

std::string to_string(MergeStatus st);

struct MergeParams {
    double k = 2;
    std::int64_t m_star = 4;
    std::int64_t N = 48;
    std::int64_t T = 2;
    double delta_depth = 0.5;
    std::uint64_t budget = 200000;  // node budget per targeted search
};

struct MergeWitness {
    Point point;
    std::int64_t other_index;  // index of the point on the other ray
    std::int64_t cone_index;
    std::vector<Point> path;
};

struct MergeVerdict {
    MergeStatus status = MergeStatus::NotMergedWithinBudget;
    std::vector<MergeWitness> witnesses_gh;  // points of h in cones of g
    std::vector<MergeWitness> witnesses_hg;
    MergeParams params;
    std::int64_t disjoint_scale_m = -1;
    bool budget_exhausted = false;
    std::string note;

    bool merged() const { return status == MergeStatus::Merged; }
};

MergeVerdict merge_test(const QuasiGeodesic& g, const QuasiGeodesic& h,
                        const MergeParams& params);

// Cor-4.9-style sufficient shortcut: finite Hausdorff distance over the
// window records a merge without any cone search.
MergeVerdict hausdorff_merge(const QuasiGeodesic& g, const QuasiGeodesic& h,
                             double M, std::int64_t window);

// ---------------------------------------------------------------------------
// Partition of sampled rays into approximate boundary points.

struct PartitionParams {
    MergeParams merge;
    double hausdorff_M = 0;        // 0 disables the shortcut
    std::int64_t hausdorff_window = 0;
    int threads = 1;
};

struct BoundaryPartition {
    std::vector<QuasiGeodesic> rays;
    std::vector<std::vector<MergeStatus>> verdicts;  // full symmetric matrix
    std::vector<std::vector<std::size_t>> classes;   // sorted, by smallest id
    PartitionParams params;
    std::string note;
};

BoundaryPartition boundary_partition(const std::vector<QuasiGeodesic>& rays,
                                     const PartitionParams& params);

// ---------------------------------------------------------------------------
// Coarse-end assignment of a ray.

struct RayEndResult {
    std::vector<std::pair<double, Point>> ends;  // per scheduled radius
    bool resolved_all_radii = false;
};

RayEndResult ray_to_end(const SpaceHandle& s, const QuasiGeodesic& g,
                        const std::vector<double>& radii, double outer);

// ---------------------------------------------------------------------------
// Gromov product and the four-point hyperbolicity probe.

double gromov_product(const SpaceHandle& s, const Point& x, const Point& y,
                      const Point& a);

struct DeltaSampleSpec {
    enum class Mode { TriplesFixedBase, RandomQuadruples };
    Mode mode = Mode::TriplesFixedBase;
    double radius = 5;
    std::size_t count = 100000;  // random mode only
    std::uint64_t seed = 12345;
};

struct HyperbolicityEstimate {
    double delta_hat = 0;
    std::size_t samples = 0;
    std::string description;
};

HyperbolicityEstimate estimate_delta(const SpaceHandle& s,
                                     const DeltaSampleSpec& spec);

// ---------------------------------------------------------------------------
// Quasi-isometric pushforward with fitted constants.

struct QiMapSpec {
    enum class Kind { Scale, Swap, Perturb };
    Kind kind = Kind::Scale;
    std::int64_t lambda = 1;     // Scale
    std::int64_t magnitude = 1;  // Perturb bound
};

struct QiResult {
    QuasiGeodesic image;
    double q_fit = 0;
    double Q_fit = 0;
};

QiResult qi_pushforward(const SpaceHandle& s, const QiMapSpec& map_spec,
                        const QuasiGeodesic& g, double q, double Q);

}  // namespace qgb::boundary
