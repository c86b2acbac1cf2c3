#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qgb {

using json = nlohmann::json;

// Opaque point of a space. The flat integer payload is interpreted by the
// owning SpaceHandle; points from different spaces must never be mixed.
struct Point {
    std::vector<std::int64_t> w;

    bool operator==(const Point& o) const { return w == o.w; }
    bool operator!=(const Point& o) const { return w != o.w; }
};

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t c : p.w) {
            h ^= static_cast<std::uint64_t>(c);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

class SpaceError : public std::runtime_error {
public:
    explicit SpaceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Discrete proper pointed metric space with enumerable balls. Handles are
// immutable after construction; all queries are pure and safe to share
// across threads.
class SpaceHandle {
public:
    virtual ~SpaceHandle() = default;

    virtual std::string kind_name() const = 0;
    virtual Point basepoint() const = 0;
    virtual bool contains(const Point& p) const = 0;
    virtual double distance(const Point& a, const Point& b) const = 0;

    // All points at distance <= step_bound(), excluding p itself.
    virtual std::vector<Point> neighbors(const Point& p) const = 0;

    // Exactly {y : d(p,y) <= r}, canonically sorted, always finite.
    virtual std::vector<Point> ball(const Point& p, double r) const;

    // Largest generating-edge length used for component adjacency.
    virtual double step_bound() const { return 1.0; }

    // Comparison tolerance for distance values. Zero for integer metrics.
    virtual double tolerance() const { return 0.0; }
    virtual bool integer_metric() const { return true; }

    // Canonical total order on points (the serialization order).
    virtual bool less(const Point& a, const Point& b) const {
        return a.w < b.w;
    }

    virtual json encode(const Point& p) const = 0;
    virtual Point decode(const json& j) const = 0;

    // i-th point (1-based) of a named infinite ray, or nullopt for an
    // unknown tag. Tags are space-kind specific.
    virtual std::optional<Point> ray_point(const std::string& tag,
                                           std::int64_t i) const = 0;

    // Collapses points that are interchangeable under isometries fixing all
    // anchors. Used to keep reachability searches finite on trees; spaces
    // without useful symmetry return nullopt (identity reduction). The
    // basepoint must be among the anchors for the reduction to be sound.
    virtual std::optional<std::vector<std::int64_t>> orbit_key(
        const Point& p, std::span<const Point> anchors) const {
        (void)p;
        (void)anchors;
        return std::nullopt;
    }

    double norm(const Point& p) const { return distance(p, basepoint()); }

protected:
    // Unit-step BFS ball; correct whenever the metric is the path metric of
    // the neighbor graph with unit edges.
    std::vector<Point> bfs_ball(const Point& p, double r) const;

    void sort_points(std::vector<Point>& pts) const;
};

struct SpaceSpec {
    json raw;

    static SpaceSpec from_json(const json& j) { return SpaceSpec{j}; }
    static SpaceSpec parse(const std::string& text);
};

// Builds a space from its JSON spec. Throws SpaceError for malformed specs,
// degree < 3 trees, or disconnected explicit graphs.
std::shared_ptr<const SpaceHandle> build_space(const SpaceSpec& spec);

struct CoarseEndsResult {
    struct Level {
        double radius = 0;
        std::size_t unbounded_components = 0;
        // Canonical representative (smallest point) per unbounded component.
        std::vector<Point> component_ids;
    };
    std::vector<Level> levels;
    bool stabilized = false;  // counts constant over the schedule tail
};

// Counts unbounded components of ball(x0, outer) minus the open ball of each
// scheduled radius. A component is treated as unbounded iff it reaches
// norm >= outer - step_bound.
CoarseEndsResult coarse_ends(const SpaceHandle& s,
                             const std::vector<double>& radii, double outer);

// Component id (canonical representative) of the annulus component at the
// given radius containing the point p, if any.
std::optional<Point> annulus_component_of(const SpaceHandle& s, double radius,
                                          double outer, const Point& p);

}  // namespace qgb
