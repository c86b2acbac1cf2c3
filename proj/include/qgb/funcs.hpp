#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgb/qgeo.hpp"
#include "qgb/space.hpp"

namespace qgb::funcs {

using qgeo::QuasiGeodesic;

// Bounded real-valued test function on a space. Continuity is automatic on
// discrete spaces, so boundedness is the only analytic requirement; the
// bound is recorded and enforced.
struct FuncSpec {
    enum class Kind {
        Vanishing,        // c / (1 + ||x||)
        ClopenIndicator,  // indicator of a named coarsely clopen set
        AngleProbe,       // grid2d only: atan2 normalized to [0,1)
        CustomTable,      // explicit point -> value table with default
        Constant,
        Series,  // weighted finite sum (uniform-limit truncations)
    };

    Kind kind = Kind::Vanishing;
    double c = 1.0;         // Vanishing scale / Constant value
    std::string set_name;   // ClopenIndicator target
    std::vector<std::pair<Point, double>> table;
    double table_default = 0;
    std::vector<std::pair<double, FuncSpec>> terms;  // Series
    std::string name = "f";

    double bound() const;
};

double eval_function(const FuncSpec& f, const SpaceHandle& s, const Point& x);

// Range envelope [lo, hi] valid for every point of norm >= r, when the
// function decays in a known way; nullopt when no tail bound is available.
std::optional<std::pair<double, double>> tail_envelope(const FuncSpec& f,
                                                       double r);

// Anchor points that pin the function under space isometries; needed for
// sound orbit-reduced cone searches (e.g. branch indicators on trees).
std::vector<Point> func_anchor_points(const FuncSpec& f,
                                      const SpaceHandle& s);

// ---------------------------------------------------------------------------
// Slowly-oscillating test: sup |f(x)-f(y)| over pairs with norm(x) >= r and
// d(x,y) <= M, per scheduled radius.

struct SoRow {
    double radius = 0;
    double sup_diff = 0;
    std::size_t pairs = 0;
};

struct SoReport {
    std::vector<SoRow> rows;
    bool pass = false;  // sups fall below eps at the schedule tail
    double eps = 0;
};

SoReport test_slowly_oscillating(const SpaceHandle& s, const FuncSpec& f,
               const std::vector<double>& radii, double M, double eps);

// ---------------------------------------------------------------------------
// Geometrically-slowly-oscillating test: diameters of f over scale-m cones
// along each ray. Pass on a ray means the certified upper diameter drops
// below eps at some scheduled m; fail is definitive only when the witnessed
// lower diameter stays >= eps.

struct GsoRow {
    std::string ray;
    std::int64_t m = 0;
    double diam_lower = 0;   // over witness-validated members
    double diam_upper = 0;   // certified upper bound (may be +inf)
    bool exhausted = false;  // members exactly enumerate the cone
    bool cone_complete = false;  // relaxed search ran to completion
};

struct GsoReport {
    std::vector<GsoRow> rows;
    bool pass = false;
    double eps = 0;
    double k = 0;
};

GsoReport test_geom_slow_osc(const SpaceHandle& s, const FuncSpec& f,
                             const std::vector<QuasiGeodesic>& rays, double k,
                             const std::vector<std::int64_t>& m_schedule,
                             double eps, std::int64_t horizon,
                             std::uint64_t budget);

// ---------------------------------------------------------------------------

struct LimitResult {
    double value = 0;
    bool cauchy = false;  // final tail diameter < eps
    std::vector<std::pair<std::int64_t, double>> tail_diams;
};

LimitResult limit_along_ray(const SpaceHandle& s, const FuncSpec& f,
                            const QuasiGeodesic& g,
                            const std::vector<std::int64_t>& tail_schedule,
                            double eps);

struct ApproachLimitResult {
    bool precondition_ok = false;
    bool pass = false;
    double limit_value = 0;
    std::vector<double> endpoint_values;
};

// Endpoint values f(end of g_n) must approach f(g) within eps on the tail.
ApproachLimitResult test_bounded_approach_limit(
    const SpaceHandle& s, const FuncSpec& f,
    const std::vector<QuasiGeodesic>& g_seq, const QuasiGeodesic& g, double C,
    const std::vector<qgeo::ApproachSchedule>& sched, double eps);

struct UniformLimitResult {
    FuncSpec func;             // truncated weighted series
    double truncation_error;   // sup-norm bound on the dropped tail
};

UniformLimitResult uniform_limit(const std::vector<FuncSpec>& f_seq,
                                 const std::vector<double>& weights,
                                 std::size_t truncate_at);

}  // namespace qgb::funcs
