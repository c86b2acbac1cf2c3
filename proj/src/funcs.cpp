#include "qgb/funcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qgb::funcs {

double FuncSpec::bound() const {
    switch (kind) {
        case Kind::Vanishing:
            return std::abs(c);
        case Kind::ClopenIndicator:
        case Kind::AngleProbe:
            return 1.0;
        case Kind::CustomTable: {
            double b = std::abs(table_default);
            for (auto& [p, v] : table) b = std::max(b, std::abs(v));
            return b;
        }
        case Kind::Constant:
            return std::abs(c);
        case Kind::Series: {
            double b = 0;
            for (auto& [w, f] : terms) b += std::abs(w) * f.bound();
            return b;
        }
    }
    return 0;
}

namespace {

double eval_indicator(const FuncSpec& f, const SpaceHandle& s,
                      const Point& x) {
    const std::string& kind = s.kind_name();
    const std::string& set = f.set_name;
    if (kind == "sqrt_rays") {
        if (set == "horizontal_ray") return x.w[0] == 0 ? 1.0 : 0.0;
        if (set == "vertical_ray") return x.w[0] == 1 ? 1.0 : 0.0;
    } else if (kind == "line") {
        if (set == "right_half") return x.w[0] >= 0 ? 1.0 : 0.0;
    } else if (kind == "tree") {
        if (set.rfind("branch:", 0) == 0) {
            std::int64_t b = std::stoll(set.substr(7));
            return !x.w.empty() && x.w[0] == b ? 1.0 : 0.0;
        }
    } else if (kind == "wedge_flats") {
        if (set.rfind("flat:", 0) == 0) {
            std::int64_t n = std::stoll(set.substr(5));
            if (x.w[0] == 1 && x.w[1] == n) return 1.0;
            if (x.w[0] == 0 && x.w[1] == n) return 1.0;
            return 0.0;
        }
    }
    throw std::invalid_argument("indicator \"" + set +
                                "\" undefined for space kind " + kind);
}

}  // namespace

double eval_function(const FuncSpec& f, const SpaceHandle& s, const Point& x) {
    switch (f.kind) {
        case FuncSpec::Kind::Vanishing:
            return f.c / (1.0 + s.norm(x));
        case FuncSpec::Kind::ClopenIndicator:
            return eval_indicator(f, s, x);
        case FuncSpec::Kind::AngleProbe: {
            if (s.kind_name() != "grid2d")
                throw std::invalid_argument("angle_probe needs grid2d");
            if (x.w[0] == 0 && x.w[1] == 0) return 0.0;
            double a = std::atan2(static_cast<double>(x.w[1]),
                                  static_cast<double>(x.w[0]));
            double v = a / (2.0 * std::numbers::pi);
            if (v < 0) v += 1.0;
            if (v >= 1.0) v -= 1.0;
            return v;
        }
        case FuncSpec::Kind::CustomTable:
            for (auto& [p, v] : f.table)
                if (p == x) return v;
            return f.table_default;
        case FuncSpec::Kind::Constant:
            return f.c;
        case FuncSpec::Kind::Series: {
            double v = 0;
            for (auto& [w, g] : f.terms) v += w * eval_function(g, s, x);
            return v;
        }
    }
    return 0;
}

std::optional<std::pair<double, double>> tail_envelope(const FuncSpec& f,
                                                       double r) {
    switch (f.kind) {
        case FuncSpec::Kind::Vanishing: {
            double hi = f.c / (1.0 + std::max(0.0, r));
            return f.c >= 0 ? std::make_pair(0.0, hi)
                            : std::make_pair(hi, 0.0);
        }
        case FuncSpec::Kind::Constant:
            return std::make_pair(f.c, f.c);
        case FuncSpec::Kind::Series: {
            double lo = 0, hi = 0;
            for (auto& [w, g] : f.terms) {
                auto env = tail_envelope(g, r);
                if (!env) return std::nullopt;
                double a = w * env->first, b = w * env->second;
                lo += std::min(a, b);
                hi += std::max(a, b);
            }
            return std::make_pair(lo, hi);
        }
        default:
            return std::nullopt;
    }
}

std::vector<Point> func_anchor_points(const FuncSpec& f,
                                      const SpaceHandle& s) {
    std::vector<Point> out;
    if (f.kind == FuncSpec::Kind::ClopenIndicator &&
        s.kind_name() == "tree" && f.set_name.rfind("branch:", 0) == 0) {
        std::int64_t b = std::stoll(f.set_name.substr(7));
        out.push_back(Point{{b}});
    }
    if (f.kind == FuncSpec::Kind::Series)
        for (auto& [w, g] : f.terms) {
            auto sub = func_anchor_points(g, s);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    return out;
}

// ---------------------------------------------------------------------------

SoReport test_slowly_oscillating(const SpaceHandle& s, const FuncSpec& f,
                                 const std::vector<double>& radii, double M,
                                 double eps) {
    SoReport rep;
    rep.eps = eps;
    for (double r : radii) {
        SoRow row;
        row.radius = r;
        for (auto& x : s.ball(s.basepoint(), r + M + 2)) {
            if (s.norm(x) < r) continue;
            double fx = eval_function(f, s, x);
            for (auto& y : s.ball(x, M)) {
                if (s.norm(y) < r) continue;
                row.sup_diff = std::max(
                    row.sup_diff, std::abs(fx - eval_function(f, s, y)));
                ++row.pairs;
            }
        }
        rep.rows.push_back(row);
    }
    rep.pass = !rep.rows.empty() && rep.rows.back().sup_diff < eps;
    return rep;
}

// ---------------------------------------------------------------------------

GsoReport test_geom_slow_osc(const SpaceHandle& s, const FuncSpec& f,
                             const std::vector<QuasiGeodesic>& rays, double k,
                             const std::vector<std::int64_t>& m_schedule,
                             double eps, std::int64_t horizon,
                             std::uint64_t budget) {
    GsoReport rep;
    rep.eps = eps;
    rep.k = k;
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto anchors = func_anchor_points(f, s);

    bool all_rays_pass = true;
    for (auto& ray : rays) {
        bool ray_pass = false;
        for (auto m : m_schedule) {
            QuasiGeodesic gm = qgeo::materialized(ray, std::max(m, horizon));
            std::vector<Point> prefix(gm.pts.begin(), gm.pts.begin() + m);

            GsoRow row;
            row.ray = ray.name;
            row.m = m;

            qgeo::ReachSpec spec;
            spec.q = k;
            spec.Q = 0;
            spec.prefix = prefix;
            spec.horizon = horizon;
            spec.node_budget = budget;
            spec.orbit_extra_anchors = anchors;
            spec.use_orbit = true;
            qgeo::RelaxedReach relax(s, std::move(spec));
            row.cone_complete = relax.complete();

            double minv = inf, maxv = -inf;
            for (auto& st : relax.states()) {
                double v = eval_function(f, s, st.rep);
                minv = std::min(minv, v);
                maxv = std::max(maxv, v);
            }

            // Certified upper bound on the true cone diameter.
            row.diam_upper = inf;
            if (relax.complete() && maxv >= minv)
                row.diam_upper = maxv - minv;
            if (auto env = tail_envelope(
                    f, (static_cast<double>(m) - 1) / k - s.tolerance()))
                row.diam_upper =
                    std::min(row.diam_upper, env->second - env->first);

            // Witnessed lower bound: validate members from the value
            // extremes inward.
            std::vector<const qgeo::RelaxedReach::State*> by_value;
            for (auto& st : relax.states()) by_value.push_back(&st);
            std::sort(by_value.begin(), by_value.end(),
                      [&](auto* a, auto* b) {
                          return eval_function(f, s, a->rep) <
                                 eval_function(f, s, b->rep);
                      });
            auto witness_value = [&](auto begin, auto end,
                                     int tries) -> std::optional<double> {
                for (auto it = begin; it != end && tries > 0; ++it, --tries) {
                    auto res = qgeo::cone_membership(
                        s, k, 0, gm, m, horizon, (*it)->rep, m,
                        std::min<std::uint64_t>(budget, 20000), &relax);
                    if (res.verdict == qgeo::Tri::In)
                        return eval_function(f, s, (*it)->rep);
                }
                return std::nullopt;
            };
            row.diam_lower = 0;
            if (!by_value.empty()) {
                auto lo = witness_value(by_value.begin(), by_value.end(), 8);
                auto hi = witness_value(by_value.rbegin(), by_value.rend(), 8);
                if (lo && hi) row.diam_lower = std::max(0.0, *hi - *lo);
            }

            // Exhaustive enumeration: every relaxed state witness-validated.
            row.exhausted = false;
            if (relax.complete() && relax.states().size() <= 20000) {
                bool all = true;
                for (auto& st : relax.states()) {
                    auto res = qgeo::cone_membership(
                        s, k, 0, gm, m, horizon, st.rep, st.index,
                        std::min<std::uint64_t>(budget, 20000), &relax);
                    if (res.verdict != qgeo::Tri::In) {
                        all = false;
                        break;
                    }
                }
                row.exhausted = all;
                if (all && maxv >= minv) {
                    row.diam_lower = maxv - minv;
                    row.diam_upper = std::min(row.diam_upper, maxv - minv);
                }
            }

            if (row.diam_upper < eps) ray_pass = true;
            rep.rows.push_back(std::move(row));
        }
        all_rays_pass = all_rays_pass && ray_pass;
    }
    rep.pass = all_rays_pass;
    return rep;
}

// ---------------------------------------------------------------------------

LimitResult limit_along_ray(const SpaceHandle& s, const FuncSpec& f,
                            const QuasiGeodesic& g,
                            const std::vector<std::int64_t>& tail_schedule,
                            double eps) {
    if (tail_schedule.empty())
        throw std::invalid_argument("empty tail schedule");
    std::int64_t L = 2 * *std::max_element(tail_schedule.begin(),
                                           tail_schedule.end());
    QuasiGeodesic gm = qgeo::materialized(g, L);
    LimitResult res;
    for (auto t : tail_schedule) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (std::int64_t i = t; i <= L; ++i) {
            double v = eval_function(f, s, gm.at(i));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        res.tail_diams.emplace_back(t, mx - mn);
    }
    res.value = eval_function(f, s, gm.at(L));
    res.cauchy = res.tail_diams.back().second < eps;
    return res;
}

ApproachLimitResult test_bounded_approach_limit(
    const SpaceHandle& s, const FuncSpec& f,
    const std::vector<QuasiGeodesic>& g_seq, const QuasiGeodesic& g, double C,
    const std::vector<qgeo::ApproachSchedule>& sched, double eps) {
    ApproachLimitResult res;
    auto pre = qgeo::boundedly_approaches(g_seq, g, C, sched);
    res.precondition_ok = pre.ok;
    if (!pre.ok) return res;

    res.limit_value = eval_function(f, s, g.at(g.length()));
    for (auto& gn : g_seq)
        res.endpoint_values.push_back(
            eval_function(f, s, gn.at(gn.length())));

    std::size_t tail_from = g_seq.size() - std::min<std::size_t>(
                                               g_seq.size(),
                                               std::max<std::size_t>(
                                                   1, g_seq.size() / 4));
    res.pass = true;
    for (std::size_t n = tail_from; n < g_seq.size(); ++n)
        if (std::abs(res.endpoint_values[n] - res.limit_value) >= eps)
            res.pass = false;
    return res;
}

UniformLimitResult uniform_limit(const std::vector<FuncSpec>& f_seq,
                                 const std::vector<double>& weights,
                                 std::size_t truncate_at) {
    if (f_seq.size() != weights.size())
        throw std::invalid_argument("weights/functions size mismatch");
    UniformLimitResult res;
    res.func.kind = FuncSpec::Kind::Series;
    res.func.name = "series";
    res.truncation_error = 0;
    for (std::size_t i = 0; i < f_seq.size(); ++i) {
        if (i < truncate_at)
            res.func.terms.emplace_back(weights[i], f_seq[i]);
        else
            res.truncation_error += std::abs(weights[i]) * f_seq[i].bound();
    }
    return res;
}

}  // namespace qgb::funcs
