#include "qgb/qgeo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace qgb::qgeo {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t c : v) {
            h ^= static_cast<std::uint64_t>(c);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct PairHash {
    std::size_t operator()(
        const std::pair<std::vector<std::int64_t>, std::int64_t>& s) const {
        return VecHash{}(s.first) ^
               (static_cast<std::size_t>(s.second) * 0x9e3779b97f4a7c15ull);
    }
};

bool pair_ok(double d, std::int64_t gap, double q, double Q, double tol) {
    double lo = static_cast<double>(gap) / q - Q;
    double hi = q * static_cast<double>(gap) + Q;
    return d + tol >= lo && d <= hi + tol;
}

std::int64_t steps_at_least(double dist, double step, double tol) {
    if (dist <= tol) return 0;
    return static_cast<std::int64_t>(std::ceil((dist - tol) / step - 1e-12));
}

}  // namespace

// ---------------------------------------------------------------------------

QuasiGeodesic make_ray(std::shared_ptr<const SpaceHandle> s,
                       const std::string& generator_tag, double q, double Q,
                       std::int64_t initial_len, std::string name) {
    QuasiGeodesic g;
    g.space = std::move(s);
    g.q = q;
    g.Q = Q;
    g.generator = generator_tag;
    g.name = name.empty() ? generator_tag : std::move(name);
    for (std::int64_t i = 1; i <= initial_len; ++i) {
        auto p = g.space->ray_point(generator_tag, i);
        if (!p)
            throw std::invalid_argument("unknown ray generator: " +
                                        generator_tag);
        g.pts.push_back(std::move(*p));
    }
    return g;
}

QuasiGeodesic materialized(const QuasiGeodesic& g, std::int64_t n) {
    if (g.length() >= n) return g;
    if (!g.generator)
        throw std::invalid_argument(
            "quasi-geodesic too short and not generator-backed");
    QuasiGeodesic out = g;
    for (std::int64_t i = out.length() + 1; i <= n; ++i) {
        auto p = out.space->ray_point(*out.generator, i);
        if (!p)
            throw std::invalid_argument("generator cannot materialize index " +
                                        std::to_string(i));
        out.pts.push_back(std::move(*p));
    }
    return out;
}

ValidationResult validate(const SpaceHandle& s, const std::vector<Point>& seq,
                          double q, double Q) {
    if (q < 1 || Q < 0) throw std::invalid_argument("need q >= 1 and Q >= 0");
    if (seq.empty()) throw std::invalid_argument("empty sequence");
    double tol = s.tolerance();
    auto n = static_cast<std::int64_t>(seq.size());
    for (std::int64_t i = 1; i <= n; ++i) {
        for (std::int64_t j = i + 1; j <= n; ++j) {
            double d = s.distance(seq[i - 1], seq[j - 1]);
            std::int64_t gap = j - i;
            double lo = static_cast<double>(gap) / q - Q;
            double hi = q * static_cast<double>(gap) + Q;
            if (d + tol < lo)
                return {false, Violation{i, j, true, d, lo}};
            if (d > hi + tol)
                return {false, Violation{i, j, false, d, hi}};
        }
    }
    return {};
}

ValidationResult validate(const QuasiGeodesic& g) {
    return validate(*g.space, g.pts, g.q, g.Q);
}

ValidationResult validate(const QuasiGeodesic& g, double q, double Q) {
    return validate(*g.space, g.pts, q, Q);
}

// ---------------------------------------------------------------------------

FanResult enumerate_fan(const SpaceHandle& s, const Point& x0, double q,
                        double Q, std::int64_t n, std::uint64_t budget) {
    if (n < 1) throw std::invalid_argument("fan length must be >= 1");
    if (budget == 0) throw std::invalid_argument("budget must be positive");
    FanResult res;
    double tol = s.tolerance();
    std::vector<Point> path{x0};
    std::uint64_t nodes = 0;

    auto extend = [&](auto&& self) -> void {
        if (static_cast<std::int64_t>(path.size()) == n) {
            res.members.push_back(path);
            return;
        }
        if (nodes >= budget) {
            res.truncated = true;
            return;
        }
        std::int64_t i2 = static_cast<std::int64_t>(path.size()) + 1;
        for (auto& y : s.ball(path.back(), q + Q)) {
            bool ok = true;
            for (std::int64_t j = 1; j < i2 && ok; ++j)
                ok = pair_ok(s.distance(path[j - 1], y), i2 - j, q, Q, tol);
            if (!ok) continue;
            if (++nodes > budget) {
                res.truncated = true;
                return;
            }
            path.push_back(y);
            self(self);
            path.pop_back();
        }
    };
    extend(extend);
    res.nodes = nodes;

    std::sort(res.members.begin(), res.members.end(),
              [&](const std::vector<Point>& a, const std::vector<Point>& b) {
                  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                      if (s.less(a[i], b[i])) return true;
                      if (s.less(b[i], a[i])) return false;
                  }
                  return a.size() < b.size();
              });
    res.members.erase(std::unique(res.members.begin(), res.members.end()),
                      res.members.end());
    return res;
}

std::vector<std::vector<Point>> thread_filter(
    const std::vector<std::vector<Point>>& level, const QuasiGeodesic& g,
    std::int64_t m) {
    if (m > g.length())
        throw std::invalid_argument("thread depth exceeds ray length");
    std::vector<std::vector<Point>> out;
    for (auto& h : level) {
        if (static_cast<std::int64_t>(h.size()) < m) continue;
        bool agrees = true;
        for (std::int64_t i = 1; i <= m && agrees; ++i)
            agrees = h[i - 1] == g.at(i);
        if (agrees) out.push_back(h);
    }
    return out;
}

QuasiGeodesic restrict_qg(const QuasiGeodesic& g, std::int64_t n) {
    if (n < 1 || n > g.length())
        throw std::invalid_argument("restriction length out of range");
    QuasiGeodesic out = g;
    out.pts.resize(static_cast<std::size_t>(n));
    return out;
}

// ---------------------------------------------------------------------------
// RelaxedReach.

struct RelaxedReach::Impl {
    const SpaceHandle& s;
    ReachSpec spec;
    std::vector<Point> anchors;
    bool orbit_on = false;
    std::vector<State> states;
    std::unordered_map<std::pair<std::vector<std::int64_t>, std::int64_t>,
                       std::uint32_t, PairHash>
        index;
    bool complete = false;

    explicit Impl(const SpaceHandle& sp, ReachSpec sc)
        : s(sp), spec(std::move(sc)) {
        anchors = spec.prefix;
        anchors.insert(anchors.end(), spec.orbit_extra_anchors.begin(),
                       spec.orbit_extra_anchors.end());
        orbit_on = spec.use_orbit &&
                   s.orbit_key(spec.prefix.front(), anchors).has_value();
        run();
    }

    std::vector<std::int64_t> key_of(const Point& p) const {
        if (orbit_on) {
            auto k = s.orbit_key(p, anchors);
            if (k) return *k;
        }
        return p.w;
    }

    bool target_feasible(const Point& y, std::int64_t i2) const {
        if (spec.targets.empty()) return true;
        double slack = spec.q * static_cast<double>(spec.horizon - i2) +
                       spec.Q + s.tolerance();
        for (auto& x : spec.targets)
            if (s.distance(y, x) <= slack) return true;
        return false;
    }

    void run() {
        double q = spec.q, Q = spec.Q, tol = s.tolerance();
        auto m = static_cast<std::int64_t>(spec.prefix.size());
        double step_lo = 1.0 / q - Q;

        states.push_back(State{spec.prefix.back(), m, 0});
        index.emplace(std::make_pair(key_of(spec.prefix.back()), m), 0u);

        std::deque<std::uint32_t> fifo{0};
        complete = true;
        while (!fifo.empty()) {
            std::uint32_t sid = fifo.front();
            fifo.pop_front();
            Point cur = states[sid].rep;
            std::int64_t i2 = states[sid].index + 1;
            if (i2 > spec.horizon) continue;
            for (auto& y : s.ball(cur, q + Q)) {
                if (step_lo > tol && s.distance(cur, y) + tol < step_lo)
                    continue;
                bool ok = true;
                for (std::int64_t j = 1; j <= m && ok; ++j)
                    ok = pair_ok(s.distance(spec.prefix[j - 1], y), i2 - j, q,
                                 Q, tol);
                if (!ok) continue;
                if (!target_feasible(y, i2)) continue;
                auto key = std::make_pair(key_of(y), i2);
                if (index.count(key)) continue;
                if (states.size() >= spec.node_budget) {
                    complete = false;
                    return;
                }
                auto id = static_cast<std::uint32_t>(states.size());
                states.push_back(State{y, i2, sid});
                index.emplace(std::move(key), id);
                fifo.push_back(id);
            }
        }
    }
};

RelaxedReach::RelaxedReach(const SpaceHandle& s, ReachSpec spec)
    : impl_(std::make_unique<Impl>(s, std::move(spec))) {}
RelaxedReach::~RelaxedReach() = default;
RelaxedReach::RelaxedReach(RelaxedReach&&) noexcept = default;
RelaxedReach& RelaxedReach::operator=(RelaxedReach&&) noexcept = default;

bool RelaxedReach::complete() const { return impl_->complete; }
std::uint64_t RelaxedReach::nodes() const { return impl_->states.size(); }
const std::vector<RelaxedReach::State>& RelaxedReach::states() const {
    return impl_->states;
}
const ReachSpec& RelaxedReach::spec() const { return impl_->spec; }

std::vector<std::int64_t> RelaxedReach::indices_of(const Point& p) const {
    std::vector<std::int64_t> out;
    auto key = impl_->key_of(p);
    auto m = static_cast<std::int64_t>(impl_->spec.prefix.size());
    for (std::int64_t i = m; i <= impl_->spec.horizon; ++i)
        if (impl_->index.count(std::make_pair(key, i))) out.push_back(i);
    return out;
}

bool RelaxedReach::reachable(const Point& p, std::int64_t min_idx,
                             std::int64_t max_idx) const {
    auto key = impl_->key_of(p);
    auto m = static_cast<std::int64_t>(impl_->spec.prefix.size());
    for (std::int64_t i = std::max(min_idx, m);
         i <= std::min(max_idx, impl_->spec.horizon); ++i)
        if (impl_->index.count(std::make_pair(key, i))) return true;
    return false;
}

bool RelaxedReach::state_exists(const Point& p, std::int64_t index) const {
    return impl_->index.count(std::make_pair(impl_->key_of(p), index)) > 0;
}

std::vector<Point> RelaxedReach::rep_path(std::uint32_t state_id) const {
    std::vector<Point> tail;
    std::uint32_t cur = state_id;
    while (true) {
        tail.push_back(impl_->states[cur].rep);
        if (cur == 0) break;
        cur = impl_->states[cur].parent;
    }
    std::vector<Point> out(impl_->spec.prefix.begin(),
                           impl_->spec.prefix.end() - 1);
    out.insert(out.end(), tail.rbegin(), tail.rend());
    return out;
}

// ---------------------------------------------------------------------------
// Best-first witness search for one target under the full pairwise
// constraints (prefix, basepoint, and every point already on the path).

namespace {

struct WitnessQuery {
    double q, Q;
    const std::vector<Point>* prefix;
    Point target;
    std::int64_t min_index, horizon;
    std::uint64_t node_budget;
    const RelaxedReach* filter = nullptr;
};

struct WitnessOutcome {
    bool found = false;
    std::vector<Point> path;
    std::int64_t index = 0;
    std::uint64_t nodes = 0;
    bool budget_exhausted = false;
};

WitnessOutcome witness_search(const SpaceHandle& s, const WitnessQuery& wq) {
    WitnessOutcome out;
    const auto& prefix = *wq.prefix;
    auto m = static_cast<std::int64_t>(prefix.size());
    double tol = s.tolerance();
    double step = wq.q + wq.Q;
    double step_lo = 1.0 / wq.q - wq.Q;
    bool use_filter = wq.filter && wq.filter->complete();

    if (prefix.back() == wq.target && m >= wq.min_index) {
        out.found = true;
        out.path = prefix;
        out.index = m;
        return out;
    }

    struct Node {
        Point p;
        std::int64_t idx;
        std::uint32_t parent;
    };
    std::vector<Node> arena{{prefix.back(), m, 0}};

    struct Entry {
        std::int64_t est;
        double dist;
        std::uint64_t seq;
        std::uint32_t node;
        bool operator>(const Entry& o) const {
            return std::tie(est, dist, seq) > std::tie(o.est, o.dist, o.seq);
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    // Feasibility of an extension depends on the whole path, so states are
    // keyed by (point, index, predecessor point): plain (point, index)
    // dedup lets a dead-end path poison the state for valid alternatives.
    std::unordered_set<std::pair<std::vector<std::int64_t>, std::int64_t>,
                       PairHash>
        visited;
    auto visit_key = [](const Point& y, const Point& from) {
        std::vector<std::int64_t> key = y.w;
        key.push_back(std::numeric_limits<std::int64_t>::min());
        key.insert(key.end(), from.w.begin(), from.w.end());
        return key;
    };
    visited.insert({visit_key(prefix.back(), prefix.back()), m});
    std::uint64_t seq = 0;
    pq.push(Entry{m + steps_at_least(s.distance(prefix.back(), wq.target),
                                     step, tol),
                  s.distance(prefix.back(), wq.target), seq++, 0});

    while (!pq.empty()) {
        Entry e = pq.top();
        pq.pop();
        Node cur = arena[e.node];
        std::int64_t i2 = cur.idx + 1;
        if (i2 > wq.horizon) continue;
        if (out.nodes++ >= wq.node_budget) {
            out.budget_exhausted = true;
            break;
        }
        for (auto& y : s.ball(cur.p, step)) {
            double dstep = s.distance(cur.p, y);
            if (step_lo > tol && dstep + tol < step_lo) continue;
            double dt = s.distance(y, wq.target);
            std::int64_t goal_est =
                std::max(wq.min_index, i2 + steps_at_least(dt, step, tol));
            if (goal_est > wq.horizon) continue;
            bool ok = true;
            for (std::int64_t j = 1; j <= m && ok; ++j)
                ok = pair_ok(s.distance(prefix[j - 1], y), i2 - j, wq.q, wq.Q,
                             tol);
            if (!ok) continue;
            // Pairs against every interior point already on this branch.
            std::uint32_t walk = e.node;
            while (ok && walk != 0) {
                ok = pair_ok(s.distance(arena[walk].p, y), i2 - arena[walk].idx,
                             wq.q, wq.Q, tol);
                walk = arena[walk].parent;
            }
            if (!ok) continue;
            if (!visited.insert({visit_key(y, cur.p), i2}).second) continue;
            if (use_filter && !wq.filter->state_exists(y, i2)) continue;

            auto nid = static_cast<std::uint32_t>(arena.size());
            arena.push_back(Node{y, i2, e.node});
            if (y == wq.target && i2 >= wq.min_index) {
                std::vector<Point> tail;
                std::uint32_t c = nid;
                while (true) {
                    tail.push_back(arena[c].p);
                    if (c == 0) break;
                    c = arena[c].parent;
                }
                out.path.assign(prefix.begin(), prefix.end() - 1);
                out.path.insert(out.path.end(), tail.rbegin(), tail.rend());
                out.found = true;
                out.index = i2;
                return out;
            }
            pq.push(Entry{goal_est, dt, seq++, nid});
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ConeResult cone(const SpaceHandle& s, double q, double Q,
                const QuasiGeodesic& g, std::int64_t m, std::int64_t horizon,
                std::uint64_t budget) {
    if (m < 1 || m > horizon)
        throw std::invalid_argument("need 1 <= m <= horizon");
    QuasiGeodesic gm = materialized(g, m);
    std::vector<Point> prefix(gm.pts.begin(), gm.pts.begin() + m);

    ConeResult res;
    res.horizon = horizon;
    if (!validate(s, prefix, q, Q).ok) {
        res.exhausted = true;  // no valid extension exists at all
        return res;
    }

    ReachSpec spec;
    spec.q = q;
    spec.Q = Q;
    spec.prefix = prefix;
    spec.horizon = horizon;
    spec.node_budget = budget;
    spec.use_orbit = false;
    RelaxedReach relax(s, std::move(spec));
    res.relaxed_count = relax.nodes();
    res.budget_spent = relax.nodes();

    bool all_witnessed = true;
    for (auto& st : relax.states()) {
        WitnessQuery wq;
        wq.q = q;
        wq.Q = Q;
        wq.prefix = &prefix;
        wq.target = st.rep;
        wq.min_index = st.index;
        wq.horizon = st.index;
        wq.node_budget = std::max<std::uint64_t>(2000, budget / 16);
        wq.filter = &relax;
        auto w = witness_search(s, wq);
        res.budget_spent += w.nodes;
        if (w.found)
            res.members.push_back(ConeMember{st.rep, st.index, w.path});
        else
            all_witnessed = false;
        if (res.budget_spent > budget * 4) {
            all_witnessed = false;
            break;
        }
    }
    res.exhausted = relax.complete() && all_witnessed;
    std::sort(res.members.begin(), res.members.end(),
              [&s](const ConeMember& a, const ConeMember& b) {
                  if (s.less(a.point, b.point)) return true;
                  if (s.less(b.point, a.point)) return false;
                  return a.index < b.index;
              });
    return res;
}

MembershipResult cone_membership(const SpaceHandle& s, double q, double Q,
                                 const QuasiGeodesic& g, std::int64_t m,
                                 std::int64_t horizon, const Point& target,
                                 std::int64_t min_index, std::uint64_t budget,
                                 const RelaxedReach* relax) {
    QuasiGeodesic gm = materialized(g, m);
    std::vector<Point> prefix(gm.pts.begin(), gm.pts.begin() + m);
    MembershipResult res;
    if (!validate(s, prefix, q, Q).ok) {
        res.verdict = Tri::Out;
        return res;
    }
    std::int64_t lo = std::max(min_index, m);
    if (relax && !relax->reachable(target, lo, horizon)) {
        res.verdict = relax->complete() ? Tri::Out : Tri::Unknown;
        return res;
    }
    WitnessQuery wq;
    wq.q = q;
    wq.Q = Q;
    wq.prefix = &prefix;
    wq.target = target;
    wq.min_index = lo;
    wq.horizon = horizon;
    wq.node_budget = budget;
    wq.filter = relax;
    auto w = witness_search(s, wq);
    res.nodes = w.nodes;
    if (w.found) {
        res.verdict = Tri::In;
        res.witness = ConeMember{target, w.index, w.path};
    } else {
        res.verdict = Tri::Unknown;
    }
    return res;
}

// ---------------------------------------------------------------------------

LimitRayResult extract_limit_ray(const SpaceHandle& s,
                                 const std::vector<QuasiGeodesic>& family,
                                 double k, double M, std::int64_t depth) {
    if (family.size() < 2)
        throw std::invalid_argument("need a family of at least 2 members");
    for (auto& g : family)
        if (!validate(g, k, k).ok)
            throw std::invalid_argument(
                "family member fails (k,k) validation");

    LimitRayResult res;
    res.ray.space = family.front().space;
    res.ray.q = k;
    res.ray.Q = k + 2 * M;
    res.ray.name = "limit";

    std::vector<std::size_t> alive(family.size());
    for (std::size_t j = 0; j < alive.size(); ++j) alive[j] = j;

    for (std::int64_t n = 1; n <= depth; ++n) {
        std::vector<std::size_t> present;
        for (auto j : alive)
            if (family[j].length() >= n) present.push_back(j);
        if (present.empty()) break;

        // Candidate cluster centers in canonical order; a cluster is the
        // set of members whose level-n value lies within M/2 of the center,
        // so its diameter stays below M.
        std::vector<Point> centers;
        for (auto j : present) centers.push_back(family[j].at(n));
        std::sort(centers.begin(), centers.end(),
                  [&](const Point& a, const Point& b) { return s.less(a, b); });
        centers.erase(std::unique(centers.begin(), centers.end()),
                      centers.end());

        std::vector<std::size_t> best;
        Point best_center;
        for (auto& c : centers) {
            std::vector<std::size_t> cluster;
            for (auto j : present)
                if (s.distance(family[j].at(n), c) < M / 2.0)
                    cluster.push_back(j);
            if (cluster.size() > best.size()) {
                best = std::move(cluster);
                best_center = c;
            }
        }
        if (best.empty()) break;
        res.ray.pts.push_back(best_center);
        res.survivors.push_back(best);
        alive = res.survivors.back();
    }
    res.achieved_depth = res.ray.length();
    res.reached_requested_depth = res.achieved_depth == depth;
    return res;
}

QuasiGeodesic product_concat(std::shared_ptr<const SpaceHandle> product_space,
                             const SpaceHandle& factor_a,
                             const SpaceHandle& factor_b,
                             const QuasiGeodesic& f, const QuasiGeodesic& g) {
    if (f.length() < 1 || g.length() < 1)
        throw std::invalid_argument("legs must be nonempty");
    double k = std::max({f.q, f.Q, g.q, g.Q, 1.0});
    QuasiGeodesic h;
    h.space = product_space;
    h.q = 2 * k;
    h.Q = 2 * k;
    h.name = "concat(" + f.name + "," + g.name + ")";
    auto join = [&](const Point& pa, const Point& pb) {
        return product_space->decode(
            json{factor_a.encode(pa), factor_b.encode(pb)});
    };
    std::int64_t a = f.length(), b = g.length();
    for (std::int64_t t = 1; t <= a; ++t) h.pts.push_back(join(f.at(t), g.at(1)));
    for (std::int64_t t = 2; t <= b; ++t) h.pts.push_back(join(f.at(a), g.at(t)));
    return h;
}

NetResult net_pushforward(const SpaceHandle& s, const QuasiGeodesic& g,
                          double M) {
    if (M <= 0) throw std::invalid_argument("net separation must be positive");
    NetResult res;
    double reach = 0;
    for (auto& p : g.pts) reach = std::max(reach, s.norm(p));
    std::vector<Point> window = s.ball(s.basepoint(), reach + M + 1);

    res.net.push_back(s.basepoint());
    for (auto& p : window) {
        if (p == s.basepoint()) continue;
        bool separated = true;
        for (auto& q : res.net) {
            if (s.distance(p, q) < M - s.tolerance()) {
                separated = false;
                break;
            }
        }
        if (separated) res.net.push_back(p);
    }

    res.pushed.space = g.space;
    double k = std::max({g.q, g.Q, 1.0});
    res.pushed.q = k + 2 * M;
    res.pushed.Q = k + 2 * M;
    res.pushed.name = g.name + "/net" + std::to_string(M);
    for (auto& p : g.pts) {
        const Point* bestp = nullptr;
        double bestd = 0;
        for (auto& q : res.net) {
            double d = s.distance(p, q);
            if (!bestp || d < bestd - s.tolerance() ||
                (std::abs(d - bestd) <= s.tolerance() && s.less(q, *bestp))) {
                bestp = &q;
                bestd = d;
            }
        }
        res.pushed.pts.push_back(*bestp);
    }
    return res;
}

bool hausdorff_close(const QuasiGeodesic& g, const QuasiGeodesic& h, double M,
                     std::int64_t window) {
    if (window > g.length() || window > h.length())
        throw std::invalid_argument("window exceeds a ray length");
    const SpaceHandle& s = *g.space;
    auto one_way = [&](const QuasiGeodesic& a, const QuasiGeodesic& b) {
        for (std::int64_t i = 1; i <= window; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::int64_t j = 1; j <= window; ++j)
                best = std::min(best, s.distance(a.at(i), b.at(j)));
            if (best > M + s.tolerance()) return false;
        }
        return true;
    };
    return one_way(g, h) && one_way(h, g);
}

ApproachResult boundedly_approaches(const std::vector<QuasiGeodesic>& g_seq,
                                    const QuasiGeodesic& g, double C,
                                    const std::vector<ApproachSchedule>& sched) {
    if (sched.empty()) throw std::invalid_argument("empty schedule");
    ApproachResult res;
    res.lengths_diverge = g_seq.size() >= 2;
    for (std::size_t n = 1; n < g_seq.size(); ++n)
        if (g_seq[n].length() < g_seq[n - 1].length())
            res.lengths_diverge = false;
    if (!g_seq.empty() &&
        g_seq.back().length() <= g_seq.front().length())
        res.lengths_diverge = false;

    const SpaceHandle& s = *g.space;
    for (auto& sc : sched) {
        for (std::size_t n = static_cast<std::size_t>(sc.N);
             n <= g_seq.size(); ++n) {
            const auto& gn = g_seq[n - 1];
            std::int64_t top = std::min({sc.m, gn.length(), g.length()});
            for (std::int64_t i = 1; i <= top; ++i) {
                if (!(s.distance(gn.at(i), g.at(i)) < C)) {
                    res.failure = std::make_tuple(sc.m, static_cast<std::int64_t>(n), i);
                    res.ok = false;
                    return res;
                }
            }
        }
    }
    res.ok = res.lengths_diverge;
    return res;
}

}  // namespace qgb::qgeo
