#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgb/space.hpp"

namespace qgb::qgeo {

// Integral quasi-geodesic: points indexed 1..n, constants q >= 1, Q >= 0.
// Generator-backed instances can be materialized to any length.
struct QuasiGeodesic {
    std::shared_ptr<const SpaceHandle> space;
    std::vector<Point> pts;
    double q = 1.0;
    double Q = 0.0;
    std::optional<std::string> generator;
    std::string name;  // stable id used in reports

    std::int64_t length() const {
        return static_cast<std::int64_t>(pts.size());
    }
    const Point& at(std::int64_t i) const { return pts[i - 1]; }
};

QuasiGeodesic make_ray(std::shared_ptr<const SpaceHandle> s,
                       const std::string& generator_tag, double q, double Q,
                       std::int64_t initial_len = 0, std::string name = "");

// Returns a copy materialized to length >= n (throws if not generator-backed
// and too short).
QuasiGeodesic materialized(const QuasiGeodesic& g, std::int64_t n);

struct Violation {
    std::int64_t i = 0;
    std::int64_t j = 0;
    bool lower = false;  // which side failed
    double dist = 0;
    double bound = 0;
};

struct ValidationResult {
    bool ok = true;
    std::optional<Violation> violation;
};

// Two-sided check of |i-j|/q - Q <= d(g(i), g(j)) <= q|i-j| + Q over all
// pairs; reports the first offending pair in lexicographic order.
ValidationResult validate(const SpaceHandle& s, const std::vector<Point>& seq,
                          double q, double Q);
ValidationResult validate(const QuasiGeodesic& g);
ValidationResult validate(const QuasiGeodesic& g, double q, double Q);

// ---------------------------------------------------------------------------
// Fans and the inverse-system levels.

struct FanResult {
    std::vector<std::vector<Point>> members;  // canonically sorted
    bool truncated = false;
    std::uint64_t nodes = 0;
};

// All integral (q,Q)-quasi-geodesics of length n starting at x0, by pruned
// DFS; extension candidates come from ball(last, q+Q).
FanResult enumerate_fan(const SpaceHandle& s, const Point& x0, double q,
                        double Q, std::int64_t n, std::uint64_t budget);

// Members agreeing with g on indices <= m.
std::vector<std::vector<Point>> thread_filter(
    const std::vector<std::vector<Point>>& level, const QuasiGeodesic& g,
    std::int64_t m);

QuasiGeodesic restrict_qg(const QuasiGeodesic& g, std::int64_t n);

// ---------------------------------------------------------------------------
// Relaxed reachability: (point, index) states reachable from the prefix tip
// under the constraints against the prefix points plus consecutive steps.
// A superset of the true cone, so emptiness here refutes cone membership.
// Optionally quotients states by the space's orbit_key to stay finite on
// trees; extra anchor points keep the quotient sound for targeted queries.

struct ReachSpec {
    double q = 1;
    double Q = 0;
    std::vector<Point> prefix;  // g(1..m); prefix[0] must be the basepoint
    std::int64_t horizon = 0;   // N
    std::uint64_t node_budget = 1 << 20;
    std::vector<Point> orbit_extra_anchors;
    bool use_orbit = true;
    // When nonempty, states that can no longer reach any target within the
    // horizon are dropped. This keeps the reach sound for queries about the
    // targets themselves (and for guiding searches toward them) while
    // cutting the state space sharply.
    std::vector<Point> targets;
};

class RelaxedReach {
public:
    struct State {
        Point rep;
        std::int64_t index;
        std::uint32_t parent;  // index into states(), self for the root
    };

    RelaxedReach(const SpaceHandle& s, ReachSpec spec);
    ~RelaxedReach();
    RelaxedReach(RelaxedReach&&) noexcept;
    RelaxedReach& operator=(RelaxedReach&&) noexcept;

    bool complete() const;
    std::uint64_t nodes() const;
    const std::vector<State>& states() const;
    const ReachSpec& spec() const;

    // Indices at which the exact point p appears as a state. Requires p to
    // be among the orbit anchors when orbit reduction is on.
    std::vector<std::int64_t> indices_of(const Point& p) const;
    bool reachable(const Point& p, std::int64_t min_idx,
                   std::int64_t max_idx) const;
    bool state_exists(const Point& p, std::int64_t index) const;

    // Representative relaxed path ending at the state (not fully validated).
    std::vector<Point> rep_path(std::uint32_t state_id) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Cones.

struct ConeMember {
    Point point;
    std::int64_t index;
    std::vector<Point> witness;  // full valid extension path g(1..m)+...
};

struct ConeResult {
    std::vector<ConeMember> members;  // witnessed; canonically sorted
    std::int64_t horizon = 0;
    std::uint64_t budget_spent = 0;
    bool exhausted = false;  // members are exactly the cone up to horizon
    std::size_t relaxed_count = 0;
};

ConeResult cone(const SpaceHandle& s, double q, double Q,
                const QuasiGeodesic& g, std::int64_t m, std::int64_t horizon,
                std::uint64_t budget);

enum class Tri { In, Out, Unknown };

struct MembershipResult {
    Tri verdict = Tri::Unknown;
    std::optional<ConeMember> witness;
    std::uint64_t nodes = 0;
};

// Targeted membership of one candidate point at any index in
// [min_index, horizon]; best-first search toward the target. "found" is
// definitive; "not found" is definitive only with a complete relaxed reach.
MembershipResult cone_membership(const SpaceHandle& s, double q, double Q,
                                 const QuasiGeodesic& g, std::int64_t m,
                                 std::int64_t horizon, const Point& target,
                                 std::int64_t min_index, std::uint64_t budget,
                                 const RelaxedReach* relax = nullptr);

// ---------------------------------------------------------------------------
// Limit extraction, products, nets, Hausdorff closeness, bounded approach.

struct LimitRayResult {
    QuasiGeodesic ray;  // validates as (k, k+2M) when depth is achieved
    std::vector<std::vector<std::size_t>> survivors;  // per level
    std::int64_t achieved_depth = 0;
    bool reached_requested_depth = false;
};

// Greedy nested-cluster selection following the finite covering argument:
// at each level pick the largest diameter-<M cluster of surviving family
// values, canonical tie-break.
LimitRayResult extract_limit_ray(const SpaceHandle& s,
                                 const std::vector<QuasiGeodesic>& family,
                                 double k, double M, std::int64_t depth);

// Traverses f at the first factor's coordinates, then g; the result lives in
// the supplied product space and validates as (2k, 2k) for (k,k) inputs.
QuasiGeodesic product_concat(std::shared_ptr<const SpaceHandle> product_space,
                             const SpaceHandle& factor_a,
                             const SpaceHandle& factor_b,
                             const QuasiGeodesic& f, const QuasiGeodesic& g);

struct NetResult {
    std::vector<Point> net;  // maximal M-separated, contains the basepoint
    QuasiGeodesic pushed;    // validates as (k+2M, k+2M)
};

NetResult net_pushforward(const SpaceHandle& s, const QuasiGeodesic& g,
                          double M);

bool hausdorff_close(const QuasiGeodesic& g, const QuasiGeodesic& h, double M,
                     std::int64_t window);

struct ApproachSchedule {
    std::int64_t m = 0;
    std::int64_t N = 0;  // 1-based index into the family
};

struct ApproachResult {
    bool ok = false;
    bool lengths_diverge = false;
    std::optional<std::tuple<std::int64_t, std::int64_t, std::int64_t>>
        failure;  // (m, n, i)
};

ApproachResult boundedly_approaches(const std::vector<QuasiGeodesic>& g_seq,
                                    const QuasiGeodesic& g, double C,
                                    const std::vector<ApproachSchedule>& sched);

}  // namespace qgb::qgeo
