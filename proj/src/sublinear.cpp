#include "qgb/sublinear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qgb::sublinear {

double kappa_eval(const KappaSpec& kappa, double t) {
    t = std::max(0.0, t);
    double v = 1.0;
    switch (kappa.kind) {
        case KappaSpec::Kind::Sqrt:
            v = std::sqrt(t);
            break;
        case KappaSpec::Kind::Log:
            v = std::log(2.0 + t);
            break;
        case KappaSpec::Kind::Power:
            v = std::pow(t, kappa.p);
            break;
        case KappaSpec::Kind::Linear:
            v = kappa.slope * t;
            break;
        case KappaSpec::Kind::Table: {
            const auto& ss = kappa.samples;
            if (ss.empty()) throw std::invalid_argument("empty kappa table");
            if (t <= ss.front().first) {
                v = ss.front().second;
            } else if (t >= ss.back().first) {
                if (ss.size() >= 2) {
                    auto& a = ss[ss.size() - 2];
                    auto& b = ss.back();
                    double sl = (b.second - a.second) / (b.first - a.first);
                    v = b.second + sl * (t - b.first);
                } else {
                    v = ss.back().second;
                }
            } else {
                for (std::size_t i = 1; i < ss.size(); ++i) {
                    if (t <= ss[i].first) {
                        auto& a = ss[i - 1];
                        auto& b = ss[i];
                        double u = (t - a.first) / (b.first - a.first);
                        v = a.second + u * (b.second - a.second);
                        break;
                    }
                }
            }
            break;
        }
    }
    return std::max(1.0, v);
}

SublinearityReport is_sublinear(const KappaSpec& kappa, double t0,
                                int doublings, double threshold) {
    SublinearityReport rep;
    double t = std::max(1.0, t0);
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (int i = 0; i <= doublings; ++i, t *= 2) {
        double ratio = kappa_eval(kappa, t) / t;
        rep.ratios.emplace_back(t, ratio);
        if (ratio > prev + 1e-12) monotone = false;
        prev = ratio;
    }
    rep.pass = monotone && rep.ratios.back().second < threshold;
    return rep;
}

MajorantResult concave_majorant(
    const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("need at least 2 samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].first <= samples[i - 1].first)
            throw std::invalid_argument("sample times must increase");

    MajorantResult res;
    for (auto& [t, v] : samples) res.ts.push_back(t);

    // Upper convex hull (monotone chain), evaluated back at the samples.
    std::vector<std::pair<double, double>> hull;
    for (auto& pt : samples) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            double cross = (b.first - a.first) * (pt.second - a.second) -
                           (b.second - a.second) * (pt.first - a.first);
            if (cross >= 0) hull.pop_back();  // b below chord a-pt
            else break;
        }
        hull.push_back(pt);
    }
    auto hull_at = [&](double t) {
        if (t <= hull.front().first) return hull.front().second;
        for (std::size_t i = 1; i < hull.size(); ++i) {
            if (t <= hull[i].first) {
                auto& a = hull[i - 1];
                auto& b = hull[i];
                double u = (t - a.first) / (b.first - a.first);
                return a.second + u * (b.second - a.second);
            }
        }
        return hull.back().second;
    };

    // Running maximum keeps the envelope nondecreasing; applied to a
    // concave function this flattens the tail and preserves concavity.
    double run = -std::numeric_limits<double>::infinity();
    for (double t : res.ts) {
        run = std::max(run, hull_at(t));
        res.kbar.push_back(run);
    }

    res.Qm = 1;
    res.sandwich = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double kap = samples[i].second;
        if (res.kbar[i] + 1e-9 < kap) res.sandwich = false;
        if (kap > 0) res.Qm = std::max(res.Qm, res.kbar[i] / kap);
    }
    res.nondecreasing = true;
    for (std::size_t i = 1; i < res.kbar.size(); ++i)
        if (res.kbar[i] + 1e-9 < res.kbar[i - 1]) res.nondecreasing = false;
    res.concave = true;
    for (std::size_t i = 2; i < res.kbar.size(); ++i) {
        double s1 = (res.kbar[i - 1] - res.kbar[i - 2]) /
                    (res.ts[i - 1] - res.ts[i - 2]);
        double s2 = (res.kbar[i] - res.kbar[i - 1]) /
                    (res.ts[i] - res.ts[i - 1]);
        if (s2 > s1 + 1e-9) res.concave = false;
    }
    return res;
}

// ---------------------------------------------------------------------------

TrackVerdict kappa_track(const SpaceHandle& s, const QuasiGeodesic& g,
                         const QuasiGeodesic& h, const KappaSpec& kappa,
                         const std::vector<std::int64_t>& window_tops,
                         double growth_tol) {
    if (window_tops.empty()) throw std::invalid_argument("no windows");
    std::int64_t top = *std::max_element(window_tops.begin(),
                                         window_tops.end());
    QuasiGeodesic gm = qgeo::materialized(g, top);
    QuasiGeodesic hm = qgeo::materialized(h, top);

    TrackVerdict out;
    for (auto T : window_tops) {
        TrackWindow w;
        w.T = T;
        for (std::int64_t t = std::max<std::int64_t>(1, T / 2); t <= T; ++t) {
            double d = s.distance(gm.at(t), hm.at(t));
            w.sup_ratio_t = std::max(
                w.sup_ratio_t, d / kappa_eval(kappa, static_cast<double>(t)));
            w.sup_ratio_norm =
                std::max(w.sup_ratio_norm,
                         d / kappa_eval(kappa, s.norm(gm.at(t))));
        }
        out.windows.push_back(w);
    }

    // Growth classification over the tail half of the window schedule:
    // bounded iff successive sups grow by at most (1 + tol).
    auto classify = [&](auto pick) {
        std::size_t from = out.windows.size() / 2;
        for (std::size_t i = std::max<std::size_t>(1, from);
             i < out.windows.size(); ++i) {
            double a = pick(out.windows[i - 1]);
            double b = pick(out.windows[i]);
            if (b > (1 + growth_tol) * a + 1e-9) return false;
        }
        return true;
    };
    out.bounded_t = classify([](const TrackWindow& w) { return w.sup_ratio_t; });
    out.bounded_norm =
        classify([](const TrackWindow& w) { return w.sup_ratio_norm; });
    out.M = out.windows.back().sup_ratio_t;
    out.C = out.windows.back().sup_ratio_norm;
    return out;
}

EquivalenceReport tracking_equivalence_check(
    const SpaceHandle& s, const QuasiGeodesic& g, const QuasiGeodesic& h,
    const KappaSpec& kappa, const std::vector<std::int64_t>& window_tops,
    double growth_tol) {
    EquivalenceReport rep;

    // Concavity/monotonicity probe on a doubling grid.
    std::vector<std::pair<double, double>> grid;
    double tmax = static_cast<double>(
        *std::max_element(window_tops.begin(), window_tops.end()));
    for (double t = 1; t <= 2 * tmax; t *= 2)
        grid.emplace_back(t, kappa_eval(kappa, t));
    auto maj = concave_majorant(grid);
    bool already_good = maj.Qm <= 1.0 + 1e-9;

    KappaSpec used = kappa;
    if (!already_good) {
        rep.used_majorant = true;
        rep.Qm = maj.Qm;
        used.kind = KappaSpec::Kind::Table;
        used.samples.clear();
        for (std::size_t i = 0; i < grid.size(); ++i)
            used.samples.emplace_back(grid[i].first, maj.kbar[i]);
        used.name = kappa.name + "-majorant";
    }

    rep.verdict = kappa_track(s, g, h, used, window_tops, growth_tol);
    rep.agree = rep.verdict.bounded_t == rep.verdict.bounded_norm;
    return rep;
}

boundary::BoundaryPartition sublinear_quotient(
    const boundary::BoundaryPartition& partition, const KappaSpec& kappa,
    const std::vector<std::int64_t>& window_tops, double growth_tol) {
    boundary::BoundaryPartition out = partition;
    out.note = "sublinear quotient under " + kappa.name;
    auto n = partition.classes.size();
    if (n == 0) return out;
    const SpaceHandle& s = *partition.rays.front().space;

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find =
        [&](std::size_t x) -> std::size_t {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& gi = partition.rays[partition.classes[i][0]];
            const auto& gj = partition.rays[partition.classes[j][0]];
            auto tv = kappa_track(s, gi, gj, kappa, window_tops, growth_tol);
            if (tv.bounded_norm) parent[find(i)] = find(j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        auto& dst = groups[find(i)];
        dst.insert(dst.end(), partition.classes[i].begin(),
                   partition.classes[i].end());
    }
    out.classes.clear();
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        out.classes.push_back(members);
    }
    std::sort(out.classes.begin(), out.classes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return out;
}

// ---------------------------------------------------------------------------

KsoReport test_kappa_slow_osc(const SpaceHandle& s, const funcs::FuncSpec& f,
                              const KappaSpec& kappa,
                              const std::vector<double>& C_list,
                              const std::vector<double>& radii, double eps) {
    KsoReport rep;
    rep.eps = eps;
    rep.pass = true;
    for (double C : C_list) {
        double final_sup = 0;
        for (double r : radii) {
            KsoRow row;
            row.C = C;
            row.radius = r;
            for (auto& x : s.ball(s.basepoint(), r + 2)) {
                double nx = s.norm(x);
                if (nx < r) continue;
                double fx = eval_function(f, s, x);
                double reach = C * kappa_eval(kappa, nx);
                for (auto& y : s.ball(x, reach)) {
                    row.sup_diff = std::max(
                        row.sup_diff,
                        std::abs(fx - eval_function(f, s, y)));
                    ++row.pairs;
                }
            }
            final_sup = row.sup_diff;
            rep.rows.push_back(row);
        }
        if (final_sup >= eps) rep.pass = false;
    }
    return rep;
}

}  // namespace qgb::sublinear
