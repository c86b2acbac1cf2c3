#include "qgb/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace qgb {

namespace {

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

std::size_t common_prefix(std::span<const std::int64_t> a,
                          std::span<const std::int64_t> b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

}  // namespace

std::vector<Point> SpaceHandle::bfs_ball(const Point& p, double r) const {
    std::vector<Point> out;
    if (r < 0) return out;
    std::unordered_map<Point, std::int64_t, PointHash> dist;
    std::deque<Point> q;
    dist.emplace(p, 0);
    q.push_back(p);
    auto rr = static_cast<std::int64_t>(std::floor(r + tolerance()));
    while (!q.empty()) {
        Point cur = q.front();
        q.pop_front();
        std::int64_t dc = dist.at(cur);
        if (dc >= rr) continue;
        for (auto& nb : neighbors(cur)) {
            if (dist.emplace(nb, dc + 1).second) q.push_back(nb);
        }
    }
    out.reserve(dist.size());
    for (auto& [pt, d] : dist) out.push_back(pt);
    sort_points(out);
    return out;
}

std::vector<Point> SpaceHandle::ball(const Point& p, double r) const {
    return bfs_ball(p, r);
}

void SpaceHandle::sort_points(std::vector<Point>& pts) const {
    std::sort(pts.begin(), pts.end(),
              [this](const Point& a, const Point& b) { return less(a, b); });
}

// ---------------------------------------------------------------------------
// line: the integer line, points [x].

class LineSpace final : public SpaceHandle {
public:
    std::string kind_name() const override { return "line"; }
    Point basepoint() const override { return Point{{0}}; }
    bool contains(const Point& p) const override { return p.w.size() == 1; }

    double distance(const Point& a, const Point& b) const override {
        return static_cast<double>(iabs(a.w[0] - b.w[0]));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        return {Point{{p.w[0] - 1}}, Point{{p.w[0] + 1}}};
    }

    std::vector<Point> ball(const Point& p, double r) const override {
        std::vector<Point> out;
        auto rr = static_cast<std::int64_t>(std::floor(r));
        if (rr < 0) return out;
        for (std::int64_t x = p.w[0] - rr; x <= p.w[0] + rr; ++x)
            out.push_back(Point{{x}});
        return out;
    }

    json encode(const Point& p) const override { return json{p.w[0]}; }
    Point decode(const json& j) const override {
        if (!j.is_array() || j.size() != 1 || !j[0].is_number_integer())
            throw SpaceError("line point must be [x]");
        return Point{{j[0].get<std::int64_t>()}};
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        if (tag == "axis+x") return Point{{i - 1}};
        if (tag == "axis-x") return Point{{-(i - 1)}};
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// grid2d: Z^2 with the l1 metric, points [x, y].

class GridSpace final : public SpaceHandle {
public:
    std::string kind_name() const override { return "grid2d"; }
    Point basepoint() const override { return Point{{0, 0}}; }
    bool contains(const Point& p) const override { return p.w.size() == 2; }

    double distance(const Point& a, const Point& b) const override {
        return static_cast<double>(iabs(a.w[0] - b.w[0]) +
                                   iabs(a.w[1] - b.w[1]));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::int64_t x = p.w[0], y = p.w[1];
        return {Point{{x - 1, y}}, Point{{x, y - 1}}, Point{{x, y + 1}},
                Point{{x + 1, y}}};
    }

    std::vector<Point> ball(const Point& p, double r) const override {
        std::vector<Point> out;
        auto rr = static_cast<std::int64_t>(std::floor(r));
        if (rr < 0) return out;
        for (std::int64_t dx = -rr; dx <= rr; ++dx)
            for (std::int64_t dy = -(rr - iabs(dx)); dy <= rr - iabs(dx); ++dy)
                out.push_back(Point{{p.w[0] + dx, p.w[1] + dy}});
        sort_points(out);
        return out;
    }

    json encode(const Point& p) const override { return json{p.w[0], p.w[1]}; }
    Point decode(const json& j) const override {
        if (!j.is_array() || j.size() != 2)
            throw SpaceError("grid2d point must be [x,y]");
        return Point{{j[0].get<std::int64_t>(), j[1].get<std::int64_t>()}};
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        std::int64_t t = i - 1;
        if (tag == "axis+x") return Point{{t, 0}};
        if (tag == "axis-x") return Point{{-t, 0}};
        if (tag == "axis+y") return Point{{0, t}};
        if (tag == "axis-y") return Point{{0, -t}};
        // Staircase diagonals; exact geodesics with norm i-1.
        if (tag == "diag:ne") return Point{{(t + 1) / 2, t / 2}};
        if (tag == "diag:se") return Point{{(t + 1) / 2, -(t / 2)}};
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// tree(d): the d-regular infinite tree. Point = path word from the root;
// the first letter ranges over d branches, later letters over d-1 children.

class TreeSpace final : public SpaceHandle {
public:
    explicit TreeSpace(std::int64_t degree) : degree_(degree) {}

    std::string kind_name() const override { return "tree"; }
    Point basepoint() const override { return Point{{}}; }

    bool contains(const Point& p) const override {
        for (std::size_t i = 0; i < p.w.size(); ++i) {
            std::int64_t hi = (i == 0) ? degree_ : degree_ - 1;
            if (p.w[i] < 0 || p.w[i] >= hi) return false;
        }
        return true;
    }

    double distance(const Point& a, const Point& b) const override {
        std::size_t cp = common_prefix(a.w, b.w);
        return static_cast<double>((a.w.size() - cp) + (b.w.size() - cp));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::vector<Point> out;
        if (!p.w.empty()) {
            Point parent = p;
            parent.w.pop_back();
            out.push_back(std::move(parent));
        }
        std::int64_t hi = p.w.empty() ? degree_ : degree_ - 1;
        for (std::int64_t c = 0; c < hi; ++c) {
            Point child = p;
            child.w.push_back(c);
            out.push_back(std::move(child));
        }
        return out;
    }

    json encode(const Point& p) const override { return json(p.w); }
    Point decode(const json& j) const override {
        if (!j.is_array()) throw SpaceError("tree point must be a word array");
        Point p;
        for (auto& c : j) p.w.push_back(c.get<std::int64_t>());
        if (!contains(p)) throw SpaceError("tree word out of range");
        return p;
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        if (tag.rfind("branch:", 0) != 0) return std::nullopt;
        std::int64_t b = std::stoll(tag.substr(7));
        if (b < 0 || b >= degree_) return std::nullopt;
        Point p;
        if (i >= 2) {
            p.w.push_back(b);
            for (std::int64_t k = 2; k < i; ++k) p.w.push_back(0);
        }
        return p;
    }

    std::optional<std::vector<std::int64_t>> orbit_key(
        const Point& p, std::span<const Point> anchors) const override {
        std::vector<std::int64_t> key;
        key.reserve(anchors.size());
        for (const auto& a : anchors)
            key.push_back(static_cast<std::int64_t>(distance(p, a)));
        return key;
    }

private:
    std::int64_t degree_;
};

// ---------------------------------------------------------------------------
// product(A, B) with the l1 metric. Point = [lenA, A..., B...].

class ProductSpace final : public SpaceHandle {
public:
    ProductSpace(std::shared_ptr<const SpaceHandle> a,
                 std::shared_ptr<const SpaceHandle> b)
        : a_(std::move(a)), b_(std::move(b)) {}

    std::string kind_name() const override { return "product"; }

    Point basepoint() const override {
        return join(a_->basepoint(), b_->basepoint());
    }

    bool contains(const Point& p) const override {
        Point pa, pb;
        if (!split(p, pa, pb)) return false;
        return a_->contains(pa) && b_->contains(pb);
    }

    double distance(const Point& x, const Point& y) const override {
        Point xa, xb, ya, yb;
        split(x, xa, xb);
        split(y, ya, yb);
        return a_->distance(xa, ya) + b_->distance(xb, yb);
    }

    std::vector<Point> neighbors(const Point& p) const override {
        Point pa, pb;
        split(p, pa, pb);
        std::vector<Point> out;
        for (auto& na : a_->neighbors(pa)) out.push_back(join(na, pb));
        for (auto& nb : b_->neighbors(pb)) out.push_back(join(pa, nb));
        return out;
    }

    std::vector<Point> ball(const Point& p, double r) const override {
        Point pa, pb;
        split(p, pa, pb);
        std::vector<Point> out;
        for (auto& qa : a_->ball(pa, r)) {
            double da = a_->distance(pa, qa);
            for (auto& qb : b_->ball(pb, r - da)) out.push_back(join(qa, qb));
        }
        sort_points(out);
        return out;
    }

    bool less(const Point& x, const Point& y) const override {
        Point xa, xb, ya, yb;
        split(x, xa, xb);
        split(y, ya, yb);
        if (a_->less(xa, ya)) return true;
        if (a_->less(ya, xa)) return false;
        return b_->less(xb, yb);
    }

    double tolerance() const override {
        return std::max(a_->tolerance(), b_->tolerance());
    }
    bool integer_metric() const override {
        return a_->integer_metric() && b_->integer_metric();
    }

    json encode(const Point& p) const override {
        Point pa, pb;
        split(p, pa, pb);
        return json{a_->encode(pa), b_->encode(pb)};
    }

    Point decode(const json& j) const override {
        if (!j.is_array() || j.size() != 2)
            throw SpaceError("product point must be [pa, pb]");
        return join(a_->decode(j[0]), b_->decode(j[1]));
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        if (tag.rfind("a:", 0) == 0) {
            auto pa = a_->ray_point(tag.substr(2), i);
            if (!pa) return std::nullopt;
            return join(*pa, b_->basepoint());
        }
        if (tag.rfind("b:", 0) == 0) {
            auto pb = b_->ray_point(tag.substr(2), i);
            if (!pb) return std::nullopt;
            return join(a_->basepoint(), *pb);
        }
        return std::nullopt;
    }

    Point join(const Point& pa, const Point& pb) const {
        Point p;
        p.w.reserve(1 + pa.w.size() + pb.w.size());
        p.w.push_back(static_cast<std::int64_t>(pa.w.size()));
        p.w.insert(p.w.end(), pa.w.begin(), pa.w.end());
        p.w.insert(p.w.end(), pb.w.begin(), pb.w.end());
        return p;
    }

    bool split(const Point& p, Point& pa, Point& pb) const {
        if (p.w.empty()) return false;
        auto la = p.w[0];
        if (la < 0 || static_cast<std::size_t>(la) + 1 > p.w.size())
            return false;
        pa.w.assign(p.w.begin() + 1, p.w.begin() + 1 + la);
        pb.w.assign(p.w.begin() + 1 + la, p.w.end());
        return true;
    }

    const SpaceHandle& factor_a() const { return *a_; }
    const SpaceHandle& factor_b() const { return *b_; }

private:
    std::shared_ptr<const SpaceHandle> a_, b_;
};

// ---------------------------------------------------------------------------
// wedge_flats: the integer line with a copy of grid2d glued at every integer
// by its origin. Point = [0, x] on the line, [1, n, a, b] inside flat n.

class WedgeFlatsSpace final : public SpaceHandle {
public:
    std::string kind_name() const override { return "wedge_flats"; }
    Point basepoint() const override { return Point{{0, 0}}; }

    bool contains(const Point& p) const override {
        if (p.w.size() == 2 && p.w[0] == 0) return true;
        if (p.w.size() == 4 && p.w[0] == 1)
            return p.w[2] != 0 || p.w[3] != 0;
        return false;
    }

    double distance(const Point& a, const Point& b) const override {
        bool la = a.w[0] == 0, lb = b.w[0] == 0;
        if (la && lb) return static_cast<double>(iabs(a.w[1] - b.w[1]));
        if (la) return distance(b, a);
        std::int64_t m = a.w[1], ax = a.w[2], ay = a.w[3];
        if (lb)
            return static_cast<double>(iabs(m - b.w[1]) + iabs(ax) + iabs(ay));
        std::int64_t n = b.w[1], bx = b.w[2], by = b.w[3];
        if (m == n)
            return static_cast<double>(iabs(ax - bx) + iabs(ay - by));
        return static_cast<double>(iabs(ax) + iabs(ay) + iabs(m - n) +
                                   iabs(bx) + iabs(by));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::vector<Point> out;
        if (p.w[0] == 0) {
            std::int64_t x = p.w[1];
            out.push_back(Point{{0, x - 1}});
            out.push_back(Point{{0, x + 1}});
            out.push_back(Point{{1, x, -1, 0}});
            out.push_back(Point{{1, x, 0, -1}});
            out.push_back(Point{{1, x, 0, 1}});
            out.push_back(Point{{1, x, 1, 0}});
        } else {
            std::int64_t n = p.w[1], a = p.w[2], b = p.w[3];
            const std::int64_t dx[4] = {-1, 0, 0, 1};
            const std::int64_t dy[4] = {0, -1, 1, 0};
            for (int k = 0; k < 4; ++k) {
                std::int64_t na = a + dx[k], nb = b + dy[k];
                if (na == 0 && nb == 0)
                    out.push_back(Point{{0, n}});
                else
                    out.push_back(Point{{1, n, na, nb}});
            }
        }
        return out;
    }

    json encode(const Point& p) const override {
        if (p.w[0] == 0) return json{"line", p.w[1]};
        return json{"flat", p.w[1], p.w[2], p.w[3]};
    }

    Point decode(const json& j) const override {
        if (!j.is_array() || j.empty())
            throw SpaceError("wedge_flats point must be an array");
        std::string tag = j[0].get<std::string>();
        if (tag == "line" && j.size() == 2)
            return Point{{0, j[1].get<std::int64_t>()}};
        if (tag == "flat" && j.size() == 4) {
            Point p{{1, j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
                     j[3].get<std::int64_t>()}};
            if (!contains(p)) throw SpaceError("flat origin is a line point");
            return p;
        }
        throw SpaceError("bad wedge_flats point");
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        std::int64_t t = i - 1;
        if (tag == "line+") return Point{{0, t}};
        if (tag == "line-") return Point{{0, -t}};
        // "flat:<n>:x" / "flat:<n>:y": along the line to n, then into flat n.
        if (tag.rfind("flat:", 0) == 0) {
            auto rest = tag.substr(5);
            auto colon = rest.find(':');
            if (colon == std::string::npos) return std::nullopt;
            std::int64_t n = std::stoll(rest.substr(0, colon));
            std::string axis = rest.substr(colon + 1);
            std::int64_t stem = iabs(n);
            if (t <= stem) return Point{{0, n < 0 ? -t : t}};
            std::int64_t depth = t - stem;
            if (axis == "x") return Point{{1, n, depth, 0}};
            if (axis == "y") return Point{{1, n, 0, depth}};
        }
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// sqrt_rays: two integer rays joined at the origin, with the cross distance
// generated by a rung of length sqrt(n) between (n,0) and (0,n). With
// bridges, a unit-edge path of length n joins (n^2,0) to (0,n^2); shortest
// paths over the union. Point = [0,t] horizontal, [1,t] vertical (t >= 1),
// [2,n,j] interior bridge node (0 < j < n).

class SqrtRaysSpace final : public SpaceHandle {
public:
    explicit SqrtRaysSpace(bool bridges) : bridges_(bridges) {}

    std::string kind_name() const override { return "sqrt_rays"; }
    Point basepoint() const override { return Point{{0, 0}}; }
    double tolerance() const override { return 1e-9; }
    bool integer_metric() const override { return false; }

    bool contains(const Point& p) const override {
        if (p.w.size() == 2 && p.w[0] == 0) return p.w[1] >= 0;
        if (p.w.size() == 2 && p.w[0] == 1) return p.w[1] >= 1;
        if (p.w.size() == 3 && p.w[0] == 2)
            return bridges_ && p.w[1] >= 2 && p.w[2] > 0 && p.w[2] < p.w[1];
        return false;
    }

    double distance(const Point& a, const Point& b) const override {
        if (a.w[0] == 2 || b.w[0] == 2) {
            if (a.w[0] != 2) return distance(b, a);
            std::int64_t n = a.w[1], j = a.w[2];
            Point h{{0, n * n}}, v{{1, n * n}};
            double via_h = static_cast<double>(j) + distance(h, b);
            double via_v = static_cast<double>(n - j) + distance(v, b);
            if (b.w[0] == 2 && b.w[1] == n)
                return std::min(static_cast<double>(iabs(j - b.w[2])),
                                std::min(via_h, via_v));
            return std::min(via_h, via_v);
        }
        std::int64_t ta = a.w[1], tb = b.w[1];
        if (a.w[0] == b.w[0] || ta == 0 || tb == 0)
            return static_cast<double>(iabs(ta - tb));
        std::int64_t m = std::min(ta, tb);
        return std::sqrt(static_cast<double>(m)) +
               static_cast<double>(iabs(ta - tb));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::vector<Point> out;
        auto add = [&](Point q) {
            if (contains(q) && !(q == p)) out.push_back(std::move(q));
        };
        if (p.w[0] == 2) {
            std::int64_t n = p.w[1], j = p.w[2];
            add(j == 1 ? Point{{0, n * n}} : Point{{2, n, j - 1}});
            add(j == n - 1 ? Point{{1, n * n}} : Point{{2, n, j + 1}});
            return out;
        }
        std::int64_t t = p.w[1];
        if (t == 0) {
            add(Point{{0, 1}});
            add(Point{{1, 1}});
            return out;
        }
        bool horiz = p.w[0] == 0;
        if (t == 1)
            add(Point{{0, 0}});
        else
            add(Point{{p.w[0], t - 1}});
        add(Point{{p.w[0], t + 1}});
        if (t == 1) add(horiz ? Point{{1, 1}} : Point{{0, 1}});
        if (bridges_) {
            std::int64_t n = static_cast<std::int64_t>(
                std::llround(std::sqrt(static_cast<double>(t))));
            if (n * n == t && n >= 2) {
                if (horiz)
                    add(Point{{2, n, 1}});
                else
                    add(Point{{2, n, n - 1}});
            }
        }
        std::sort(out.begin(), out.end(),
                  [&](const Point& x, const Point& y) { return less(x, y); });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<Point> ball(const Point& p, double r) const override {
        std::vector<Point> out;
        if (r < -tolerance()) return out;
        double np = norm(p);
        auto lo = static_cast<std::int64_t>(
            std::max(0.0, std::floor(np - r - 2)));
        auto hi = static_cast<std::int64_t>(std::ceil(np + r + 2));
        auto consider = [&](Point q) {
            if (contains(q) && distance(p, q) <= r + tolerance())
                out.push_back(std::move(q));
        };
        for (std::int64_t t = lo; t <= hi; ++t) {
            consider(Point{{0, t}});
            if (t >= 1) consider(Point{{1, t}});
        }
        if (bridges_) {
            for (std::int64_t n = 2; n * n <= hi; ++n)
                for (std::int64_t j = 1; j < n; ++j)
                    consider(Point{{2, n, j}});
        }
        sort_points(out);
        return out;
    }

    json encode(const Point& p) const override {
        if (p.w[0] == 0) return json{p.w[1], 0};
        if (p.w[0] == 1) return json{0, p.w[1]};
        return json{"bridge", p.w[1], p.w[2]};
    }

    Point decode(const json& j) const override {
        if (!j.is_array()) throw SpaceError("bad sqrt_rays point");
        if (j.size() == 3 && j[0].is_string()) {
            Point p{{2, j[1].get<std::int64_t>(), j[2].get<std::int64_t>()}};
            if (!contains(p)) throw SpaceError("bad bridge point");
            return p;
        }
        if (j.size() != 2) throw SpaceError("sqrt_rays point must be [x,y]");
        std::int64_t x = j[0].get<std::int64_t>(), y = j[1].get<std::int64_t>();
        if (x < 0 || y < 0 || (x != 0 && y != 0))
            throw SpaceError("sqrt_rays points lie on the two axes");
        if (y == 0) return Point{{0, x}};
        return Point{{1, y}};
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        std::int64_t t = i - 1;
        if (tag == "horizontal") return Point{{0, t}};
        if (tag == "vertical") return t == 0 ? Point{{0, 0}} : Point{{1, t}};
        return std::nullopt;
    }

private:
    bool bridges_;
};

// ---------------------------------------------------------------------------
// block_union: B0 = (3-regular tree x line) and B1 = (line x 3-regular tree)
// glued along (l0 x line) = (line x l1) for fixed bi-infinite geodesics
// l0, l1; shortest paths over the union. Wall points are stored in B0 form.
//   [0, i, s, w...]  B0 point: tree node (position i on l0, twig word w),
//                    line coordinate s. Wall iff w is empty.
//   [1, s, j, u...]  B1 point off the wall: line coordinate s, tree node
//                    (position j on l1, twig word u nonempty).

class BlockUnionSpace final : public SpaceHandle {
public:
    std::string kind_name() const override { return "block_union"; }
    Point basepoint() const override { return Point{{0, 0, 0}}; }

    bool contains(const Point& p) const override {
        if (p.w.size() < 3) return false;
        if (p.w[0] == 0) {
            for (std::size_t k = 3; k < p.w.size(); ++k)
                if (p.w[k] != 0 && p.w[k] != 1) return false;
            return true;
        }
        if (p.w[0] == 1) {
            if (p.w.size() < 4) return false;  // wall points use B0 form
            for (std::size_t k = 3; k < p.w.size(); ++k)
                if (p.w[k] != 0 && p.w[k] != 1) return false;
            return true;
        }
        return false;
    }

    double distance(const Point& a, const Point& b) const override {
        bool a0 = a.w[0] == 0, b0 = b.w[0] == 0;
        if (a0 && b0) {
            return static_cast<double>(tree_dist(a.w[1], twig(a), b.w[1],
                                                 twig(b)) +
                                       iabs(a.w[2] - b.w[2]));
        }
        if (!a0 && !b0) {
            return static_cast<double>(iabs(a.w[1] - b.w[1]) +
                                       tree_dist(a.w[2], twig(a), b.w[2],
                                                 twig(b)));
        }
        if (!a0) return distance(b, a);
        // a in B0 (i, w, s), b in B1 (s', j, u): cheapest single wall visit.
        std::int64_t i = a.w[1], s = a.w[2];
        std::int64_t sq = b.w[1], jj = b.w[2];
        return static_cast<double>(
            static_cast<std::int64_t>(twig(a).size()) +
            static_cast<std::int64_t>(twig(b).size()) + iabs(i - sq) +
            iabs(s - jj));
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::vector<Point> out;
        if (p.w[0] == 0) {
            std::int64_t i = p.w[1], s = p.w[2];
            auto w = twig(p);
            if (w.empty()) {
                out.push_back(Point{{0, i - 1, s}});
                out.push_back(Point{{0, i + 1, s}});
                out.push_back(Point{{0, i, s - 1}});
                out.push_back(Point{{0, i, s + 1}});
                out.push_back(Point{{0, i, s, 0}});   // B0 twig
                out.push_back(Point{{1, i, s, 0}});   // B1 twig
            } else {
                Point parent{{0, i, s}};
                parent.w.insert(parent.w.end(), w.begin(), w.end() - 1);
                out.push_back(std::move(parent));
                for (std::int64_t c = 0; c < 2; ++c) {
                    Point child = p;
                    child.w.push_back(c);
                    out.push_back(std::move(child));
                }
                Point up = p, dn = p;
                up.w[2] += 1;
                dn.w[2] -= 1;
                out.push_back(std::move(up));
                out.push_back(std::move(dn));
            }
        } else {
            std::int64_t s = p.w[1], j = p.w[2];
            auto u = twig(p);
            Point parent;
            if (u.size() == 1) {
                parent = Point{{0, s, j}};  // back onto the wall
            } else {
                parent = Point{{1, s, j}};
                parent.w.insert(parent.w.end(), u.begin(), u.end() - 1);
            }
            out.push_back(std::move(parent));
            for (std::int64_t c = 0; c < 2; ++c) {
                Point child = p;
                child.w.push_back(c);
                out.push_back(std::move(child));
            }
            Point up = p, dn = p;
            up.w[1] += 1;
            dn.w[1] -= 1;
            out.push_back(std::move(up));
            out.push_back(std::move(dn));
        }
        return out;
    }

    json encode(const Point& p) const override {
        json w = json::array();
        for (std::size_t k = 3; k < p.w.size(); ++k) w.push_back(p.w[k]);
        if (p.w[0] == 0) return json{"b0", p.w[1], p.w[2], w};
        return json{"b1", p.w[1], p.w[2], w};
    }

    Point decode(const json& j) const override {
        if (!j.is_array() || j.size() != 4)
            throw SpaceError("bad block_union point");
        std::string tag = j[0].get<std::string>();
        Point p{{tag == "b0" ? 0 : 1, j[1].get<std::int64_t>(),
                 j[2].get<std::int64_t>()}};
        for (auto& c : j[3]) p.w.push_back(c.get<std::int64_t>());
        if (tag == "b1" && p.w.size() == 3)
            p = Point{{0, p.w[1], p.w[2]}};  // wall canonical form
        if (!contains(p)) throw SpaceError("bad block_union point");
        return p;
    }

    std::optional<Point> ray_point(const std::string& tag,
                                   std::int64_t i) const override {
        std::int64_t t = i - 1;
        if (tag == "wall:x") return Point{{0, t, 0}};
        if (tag == "wall:y") return Point{{0, 0, t}};
        if (tag.rfind("b0:twig:", 0) == 0) {
            std::int64_t at = std::stoll(tag.substr(8));
            std::int64_t stem = iabs(at);
            if (t <= stem) return Point{{0, at < 0 ? -t : t, 0}};
            Point p{{0, at, 0}};
            for (std::int64_t k = 0; k < t - stem; ++k) p.w.push_back(0);
            return p;
        }
        if (tag.rfind("b1:twig:", 0) == 0) {
            std::int64_t at = std::stoll(tag.substr(8));
            std::int64_t stem = iabs(at);
            if (t <= stem) return Point{{0, 0, at < 0 ? -t : t}};
            Point p{{1, 0, at}};
            for (std::int64_t k = 0; k < t - stem; ++k) p.w.push_back(0);
            return p;
        }
        return std::nullopt;
    }

private:
    static std::span<const std::int64_t> twig(const Point& p) {
        return {p.w.data() + 3, p.w.size() - 3};
    }

    static std::int64_t tree_dist(std::int64_t i,
                                  std::span<const std::int64_t> w,
                                  std::int64_t j,
                                  std::span<const std::int64_t> u) {
        if (i != j)
            return static_cast<std::int64_t>(w.size() + u.size()) + iabs(i - j);
        std::size_t cp = common_prefix(w, u);
        return static_cast<std::int64_t>((w.size() - cp) + (u.size() - cp));
    }
};

// ---------------------------------------------------------------------------
// explicit_graph: finite weighted graph with shortest-path metric.

class ExplicitGraphSpace final : public SpaceHandle {
public:
    ExplicitGraphSpace(std::vector<std::string> names,
                       std::vector<std::vector<double>> dist,
                       std::size_t base, double max_edge, bool integral)
        : names_(std::move(names)),
          dist_(std::move(dist)),
          base_(base),
          max_edge_(max_edge),
          integral_(integral) {}

    std::string kind_name() const override { return "explicit_graph"; }
    Point basepoint() const override {
        return Point{{static_cast<std::int64_t>(base_)}};
    }
    double step_bound() const override { return max_edge_; }
    bool integer_metric() const override { return integral_; }
    double tolerance() const override { return integral_ ? 0.0 : 1e-9; }

    bool contains(const Point& p) const override {
        return p.w.size() == 1 && p.w[0] >= 0 &&
               static_cast<std::size_t>(p.w[0]) < names_.size();
    }

    double distance(const Point& a, const Point& b) const override {
        return dist_[a.w[0]][b.w[0]];
    }

    std::vector<Point> neighbors(const Point& p) const override {
        std::vector<Point> out;
        for (std::size_t v = 0; v < names_.size(); ++v) {
            if (static_cast<std::int64_t>(v) == p.w[0]) continue;
            if (dist_[p.w[0]][v] <= max_edge_ + tolerance())
                out.push_back(Point{{static_cast<std::int64_t>(v)}});
        }
        return out;
    }

    std::vector<Point> ball(const Point& p, double r) const override {
        std::vector<Point> out;
        for (std::size_t v = 0; v < names_.size(); ++v)
            if (dist_[p.w[0]][v] <= r + tolerance())
                out.push_back(Point{{static_cast<std::int64_t>(v)}});
        return out;
    }

    json encode(const Point& p) const override {
        return json(names_[p.w[0]]);
    }

    Point decode(const json& j) const override {
        std::string name = j.get<std::string>();
        for (std::size_t v = 0; v < names_.size(); ++v)
            if (names_[v] == name)
                return Point{{static_cast<std::int64_t>(v)}};
        throw SpaceError("unknown vertex: " + name);
    }

    std::optional<Point> ray_point(const std::string&,
                                   std::int64_t) const override {
        return std::nullopt;  // finite space has no infinite rays
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> dist_;
    std::size_t base_;
    double max_edge_;
    bool integral_;
};

// ---------------------------------------------------------------------------

SpaceSpec SpaceSpec::parse(const std::string& text) {
    return SpaceSpec{json::parse(text)};
}

std::shared_ptr<const SpaceHandle> build_space(const SpaceSpec& spec) {
    const json& j = spec.raw;
    if (!j.is_object() || !j.contains("kind"))
        throw SpaceError("space spec must be an object with a \"kind\"");
    std::string kind = j.at("kind").get<std::string>();

    if (kind == "line") return std::make_shared<LineSpace>();
    if (kind == "grid2d") return std::make_shared<GridSpace>();
    if (kind == "tree") {
        std::int64_t d = j.value("degree", std::int64_t{0});
        if (d < 3) throw SpaceError("tree degree must be >= 3");
        return std::make_shared<TreeSpace>(d);
    }
    if (kind == "product") {
        if (!j.contains("a") || !j.contains("b"))
            throw SpaceError("product spec needs factors \"a\" and \"b\"");
        return std::make_shared<ProductSpace>(
            build_space(SpaceSpec::from_json(j.at("a"))),
            build_space(SpaceSpec::from_json(j.at("b"))));
    }
    if (kind == "wedge_flats") return std::make_shared<WedgeFlatsSpace>();
    if (kind == "sqrt_rays")
        return std::make_shared<SqrtRaysSpace>(j.value("bridges", false));
    if (kind == "block_union") return std::make_shared<BlockUnionSpace>();
    if (kind == "explicit_graph") {
        if (!j.contains("vertices") || !j.contains("edges"))
            throw SpaceError("explicit_graph needs vertices and edges");
        std::vector<std::string> names =
            j.at("vertices").get<std::vector<std::string>>();
        std::size_t n = names.size();
        if (n == 0) throw SpaceError("explicit_graph has no vertices");
        auto index_of = [&](const std::string& s) -> std::size_t {
            for (std::size_t v = 0; v < n; ++v)
                if (names[v] == s) return v;
            throw SpaceError("edge references unknown vertex: " + s);
        };
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> dist(n,
                                              std::vector<double>(n, inf));
        for (std::size_t v = 0; v < n; ++v) dist[v][v] = 0;
        double max_edge = 0;
        bool integral = true;
        for (auto& e : j.at("edges")) {
            std::size_t u = index_of(e[0].get<std::string>());
            std::size_t v = index_of(e[1].get<std::string>());
            double w = e.size() > 2 ? e[2].get<double>() : 1.0;
            if (w <= 0) throw SpaceError("edge weights must be positive");
            if (w != std::floor(w)) integral = false;
            max_edge = std::max(max_edge, w);
            dist[u][v] = std::min(dist[u][v], w);
            dist[v][u] = std::min(dist[v][u], w);
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    dist[a][b] = std::min(dist[a][b], dist[a][k] + dist[k][b]);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (dist[a][b] == inf)
                    throw SpaceError("explicit_graph is disconnected");
        std::size_t base = 0;
        if (j.contains("basepoint"))
            base = index_of(j.at("basepoint").get<std::string>());
        return std::make_shared<ExplicitGraphSpace>(
            std::move(names), std::move(dist), base, max_edge, integral);
    }
    throw SpaceError("unknown space kind: " + kind);
}

// ---------------------------------------------------------------------------
// Coarse ends.

namespace {

struct AnnulusComponents {
    // Label per annulus point (index into pts), canonical min per label.
    std::vector<Point> pts;
    std::unordered_map<Point, std::size_t, PointHash> label;
    std::vector<Point> canonical;
    std::vector<double> max_norm;
};

AnnulusComponents annulus_components(const SpaceHandle& s, double radius,
                                     double outer) {
    AnnulusComponents out;
    Point x0 = s.basepoint();
    std::vector<Point> all = s.ball(x0, outer);
    double tol = s.tolerance();
    for (auto& p : all)
        if (s.norm(p) >= radius - tol) out.pts.push_back(p);

    std::unordered_set<Point, PointHash> in_annulus(out.pts.begin(),
                                                    out.pts.end());
    for (auto& p : out.pts) {
        if (out.label.count(p)) continue;
        std::size_t id = out.canonical.size();
        Point best = p;
        double mx = s.norm(p);
        std::deque<Point> q{p};
        out.label[p] = id;
        while (!q.empty()) {
            Point cur = q.front();
            q.pop_front();
            for (auto& nb : s.neighbors(cur)) {
                if (!in_annulus.count(nb) || out.label.count(nb)) continue;
                out.label[nb] = id;
                if (s.less(nb, best)) best = nb;
                mx = std::max(mx, s.norm(nb));
                q.push_back(nb);
            }
        }
        out.canonical.push_back(best);
        out.max_norm.push_back(mx);
    }
    return out;
}

}  // namespace

CoarseEndsResult coarse_ends(const SpaceHandle& s,
                             const std::vector<double>& radii, double outer) {
    if (radii.empty()) throw SpaceError("coarse_ends: empty radius schedule");
    for (double r : radii)
        if (r >= outer)
            throw SpaceError("coarse_ends: radius must be below outer");
    CoarseEndsResult res;
    double cutoff = outer - s.step_bound();
    for (double r : radii) {
        auto comps = annulus_components(s, r, outer);
        CoarseEndsResult::Level lvl;
        lvl.radius = r;
        for (std::size_t id = 0; id < comps.canonical.size(); ++id) {
            if (comps.max_norm[id] >= cutoff - s.tolerance()) {
                ++lvl.unbounded_components;
                lvl.component_ids.push_back(comps.canonical[id]);
            }
        }
        std::sort(lvl.component_ids.begin(), lvl.component_ids.end(),
                  [&](const Point& a, const Point& b) { return s.less(a, b); });
        res.levels.push_back(std::move(lvl));
    }
    res.stabilized =
        res.levels.size() >= 2 &&
        res.levels[res.levels.size() - 1].unbounded_components ==
            res.levels[res.levels.size() - 2].unbounded_components;
    return res;
}

std::optional<Point> annulus_component_of(const SpaceHandle& s, double radius,
                                          double outer, const Point& p) {
    double tol = s.tolerance();
    if (s.norm(p) < radius - tol || s.norm(p) > outer + tol)
        return std::nullopt;
    // BFS within the annulus from p, tracking the canonical minimum.
    Point best = p;
    std::unordered_set<Point, PointHash> seen{p};
    std::deque<Point> q{p};
    while (!q.empty()) {
        Point cur = q.front();
        q.pop_front();
        for (auto& nb : s.neighbors(cur)) {
            double nn = s.norm(nb);
            if (nn < radius - tol || nn > outer + tol) continue;
            if (!seen.insert(nb).second) continue;
            if (s.less(nb, best)) best = nb;
            q.push_back(nb);
        }
    }
    return best;
}

}  // namespace qgb
