#include "qgb/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace qgb::boundary {

using qgeo::RelaxedReach;
using qgeo::ReachSpec;

std::string to_string(MergeStatus st) {
    switch (st) {
        case MergeStatus::Merged:
            return "merged";
        case MergeStatus::NotMergedWithinBudget:
            return "not_merged_within_budget";
        case MergeStatus::ProvablyDisjointAtScale:
            return "provably_disjoint_at_scale";
    }
    return "?";
}

// ---------------------------------------------------------------------------

InverseSystem build_inverse_system(const SpaceHandle& s, double q, double Q,
                                   std::int64_t n_max, std::uint64_t budget) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    InverseSystem sys;
    double tol = s.tolerance();
    qgeo::FanResult level1;
    level1.members = {{s.basepoint()}};
    sys.levels.push_back(std::move(level1));
    std::uint64_t nodes = 0;

    for (std::int64_t n = 2; n <= n_max; ++n) {
        qgeo::FanResult next;
        for (auto& member : sys.levels.back().members) {
            for (auto& y : s.ball(member.back(), q + Q)) {
                bool ok = true;
                for (std::size_t j = 0; j < member.size() && ok; ++j) {
                    std::int64_t gap =
                        n - static_cast<std::int64_t>(j + 1);
                    double d = s.distance(member[j], y);
                    ok = d + tol >= static_cast<double>(gap) / q - Q &&
                         d <= q * static_cast<double>(gap) + Q + tol;
                }
                if (!ok) continue;
                if (++nodes > budget) {
                    next.truncated = true;
                    break;
                }
                auto ext = member;
                ext.push_back(y);
                next.members.push_back(std::move(ext));
            }
            if (next.truncated) break;
        }
        next.nodes = nodes;
        std::sort(next.members.begin(), next.members.end(),
                  [&](const std::vector<Point>& a, const std::vector<Point>& b) {
                      for (std::size_t i = 0; i < a.size(); ++i) {
                          if (s.less(a[i], b[i])) return true;
                          if (s.less(b[i], a[i])) return false;
                      }
                      return false;
                  });
        sys.truncated = sys.truncated || next.truncated;
        sys.levels.push_back(std::move(next));
        if (sys.truncated) break;
    }

    // Retraction check: every level-(n+1) member restricts into level n.
    sys.retractions_ok = true;
    for (std::size_t n = 0; n + 1 < sys.levels.size(); ++n) {
        std::unordered_set<std::string> lower;
        for (auto& mem : sys.levels[n].members) {
            std::string key;
            for (auto& p : mem)
                for (auto c : p.w) key += std::to_string(c) + ",";
            lower.insert(std::move(key));
        }
        for (auto& mem : sys.levels[n + 1].members) {
            std::string key;
            for (std::size_t i = 0; i + 1 < mem.size(); ++i)
                for (auto c : mem[i].w) key += std::to_string(c) + ",";
            if (!lower.count(key)) {
                sys.retractions_ok = false;
                break;
            }
        }
    }
    return sys;
}

// ---------------------------------------------------------------------------

namespace {

struct DirectionOutcome {
    bool merged = false;
    bool provably_disjoint = false;
    bool budget_exhausted = false;
    std::vector<MergeWitness> witnesses;
};

// Searches the (k,0)-cones of g at thread depth m* for points of h.
DirectionOutcome merge_direction(const QuasiGeodesic& g,
                                 const QuasiGeodesic& h,
                                 const MergeParams& prm) {
    const SpaceHandle& s = *g.space;
    DirectionOutcome out;

    QuasiGeodesic gm = qgeo::materialized(g, std::max(prm.m_star, prm.N));
    QuasiGeodesic hm = qgeo::materialized(h, prm.N);
    std::vector<Point> prefix(gm.pts.begin(), gm.pts.begin() + prm.m_star);
    if (!qgeo::validate(s, prefix, prm.k, 0).ok) {
        // The conservative (k,0) surrogate has nothing to search.
        return out;
    }

    auto min_cone_idx = std::max(
        prm.m_star,
        static_cast<std::int64_t>(std::ceil(prm.delta_depth *
                                            static_cast<double>(prm.N))));

    // Targets: distinct points of h, keyed by their first h-index, that are
    // not ruled out by the basepoint bounds at the witness window.
    std::vector<std::pair<Point, std::int64_t>> targets;
    {
        std::unordered_set<Point, PointHash> seen;
        for (std::int64_t i = 1; i <= prm.N; ++i) {
            const Point& x = hm.at(i);
            if (!seen.insert(x).second) continue;
            double nx = s.norm(x);
            double lo = (static_cast<double>(min_cone_idx) - 1) / prm.k;
            double hi = prm.k * (static_cast<double>(prm.N) - 1);
            if (nx + s.tolerance() < lo || nx > hi + s.tolerance()) continue;
            targets.emplace_back(x, i);
        }
        std::sort(targets.begin(), targets.end(),
                  [&](const auto& a, const auto& b) {
                      double na = s.norm(a.first), nb = s.norm(b.first);
                      if (na != nb) return na < nb;
                      return s.less(a.first, b.first);
                  });
    }

    // Relaxed reach first: when it completes it refutes outright or guides
    // the witness searches; when the budget cuts it off we fall back to
    // unguided best-first searches.
    ReachSpec spec;
    spec.q = prm.k;
    spec.Q = 0;
    spec.prefix = prefix;
    spec.horizon = prm.N;
    spec.node_budget = prm.budget;
    for (std::int64_t i = 1; i <= prm.N; ++i) {
        spec.orbit_extra_anchors.push_back(hm.at(i));
        spec.targets.push_back(hm.at(i));
    }
    std::optional<RelaxedReach> relax;
    relax.emplace(s, std::move(spec));
    const RelaxedReach* filter = nullptr;
    if (relax->complete()) {
        bool any_reachable = false;
        for (std::int64_t i = 1; i <= prm.N; ++i)
            if (relax->reachable(hm.at(i), prm.m_star, prm.N)) {
                any_reachable = true;
                break;
            }
        if (!any_reachable) {
            out.provably_disjoint = true;
            return out;
        }
        filter = &*relax;
    } else {
        relax.reset();  // incomplete reach cannot prune soundly
    }

    std::uint64_t direction_cap = prm.budget * 8;
    std::uint64_t spent = 0;
    for (auto& [x, h_idx] : targets) {
        if (static_cast<std::int64_t>(out.witnesses.size()) >= prm.T) break;
        if (filter && !filter->reachable(x, min_cone_idx, prm.N)) continue;
        if (spent > direction_cap) {
            out.budget_exhausted = true;
            break;
        }
        auto res = qgeo::cone_membership(s, prm.k, 0, gm, prm.m_star, prm.N, x,
                                         min_cone_idx, prm.budget, filter);
        spent += res.nodes;
        if (res.verdict == qgeo::Tri::In)
            out.witnesses.push_back(MergeWitness{x, h_idx, res.witness->index,
                                                 res.witness->witness});
    }
    out.merged = static_cast<std::int64_t>(out.witnesses.size()) >= prm.T;
    if (!out.merged) out.budget_exhausted = true;
    return out;
}

}  // namespace

MergeVerdict merge_test(const QuasiGeodesic& g, const QuasiGeodesic& h,
                        const MergeParams& prm) {
    if (!g.space || g.space != h.space)
        throw std::invalid_argument("rays must share a space");
    MergeVerdict v;
    v.params = prm;

    QuasiGeodesic gm = qgeo::materialized(g, prm.N);
    QuasiGeodesic hm = qgeo::materialized(h, prm.N);
    if (!qgeo::validate(gm, prm.k, prm.k).ok ||
        !qgeo::validate(hm, prm.k, prm.k).ok)
        throw std::invalid_argument("rays are not (k,k)-valid");

    if (std::equal(gm.pts.begin(), gm.pts.begin() + prm.N, hm.pts.begin())) {
        v.status = MergeStatus::Merged;
        v.note = "identical rays";
        return v;
    }

    auto dir_gh = merge_direction(gm, hm, prm);
    auto dir_hg = merge_direction(hm, gm, prm);
    v.witnesses_gh = std::move(dir_gh.witnesses);
    v.witnesses_hg = std::move(dir_hg.witnesses);
    v.budget_exhausted = dir_gh.budget_exhausted || dir_hg.budget_exhausted;

    if (dir_gh.merged && dir_hg.merged) {
        v.status = MergeStatus::Merged;
    } else if (dir_gh.provably_disjoint || dir_hg.provably_disjoint) {
        v.status = MergeStatus::ProvablyDisjointAtScale;
        v.disjoint_scale_m = prm.m_star;
        v.note = "complete relaxed search found no points of the other ray";
    } else {
        v.status = MergeStatus::NotMergedWithinBudget;
        if (dir_gh.merged != dir_hg.merged)
            v.note = "asymmetric evidence; one direction lacks witnesses";
    }
    return v;
}

MergeVerdict hausdorff_merge(const QuasiGeodesic& g, const QuasiGeodesic& h,
                             double M, std::int64_t window) {
    MergeVerdict v;
    QuasiGeodesic gm = qgeo::materialized(g, window);
    QuasiGeodesic hm = qgeo::materialized(h, window);
    if (qgeo::hausdorff_close(gm, hm, M, window)) {
        v.status = MergeStatus::Merged;
        v.note = "hausdorff distance <= " + std::to_string(M) +
                 " over window " + std::to_string(window);
    } else {
        v.status = MergeStatus::NotMergedWithinBudget;
        v.note = "hausdorff shortcut not applicable";
    }
    return v;
}

// ---------------------------------------------------------------------------

BoundaryPartition boundary_partition(const std::vector<QuasiGeodesic>& rays,
                                     const PartitionParams& params) {
    BoundaryPartition part;
    part.params = params;
    for (auto& r : rays)
        part.rays.push_back(qgeo::materialized(r, params.merge.N));

    std::size_t n = part.rays.size();
    part.verdicts.assign(n, std::vector<MergeStatus>(
                                n, MergeStatus::NotMergedWithinBudget));
    for (std::size_t i = 0; i < n; ++i)
        part.verdicts[i][i] = MergeStatus::Merged;

    struct Job {
        std::size_t i, j;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) jobs.push_back({i, j});

    std::vector<MergeStatus> results(jobs.size());
    auto run_job = [&](std::size_t jx) {
        const auto& [i, j] = jobs[jx];
        if (params.hausdorff_M > 0 && params.hausdorff_window > 0) {
            auto hv = hausdorff_merge(part.rays[i], part.rays[j],
                                      params.hausdorff_M,
                                      params.hausdorff_window);
            if (hv.merged()) {
                results[jx] = MergeStatus::Merged;
                return;
            }
        }
        results[jx] = merge_test(part.rays[i], part.rays[j],
                                 params.merge).status;
    };

    int threads = std::max(1, params.threads);
    if (threads == 1 || jobs.size() <= 1) {
        for (std::size_t jx = 0; jx < jobs.size(); ++jx) run_job(jx);
    } else {
        std::vector<std::future<void>> futs;
        std::size_t chunk =
            (jobs.size() + static_cast<std::size_t>(threads) - 1) /
            static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = static_cast<std::size_t>(t) * chunk;
            std::size_t hi = std::min(jobs.size(), lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t jx = lo; jx < hi; ++jx) run_job(jx);
            }));
        }
        for (auto& f : futs) f.get();
    }

    for (std::size_t jx = 0; jx < jobs.size(); ++jx) {
        part.verdicts[jobs[jx].i][jobs[jx].j] = results[jx];
        part.verdicts[jobs[jx].j][jobs[jx].i] = results[jx];
    }

    // Classes = connected components of the merged graph.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find =
        [&](std::size_t x) -> std::size_t {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (part.verdicts[i][j] == MergeStatus::Merged)
                parent[find(i)] = find(j);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        part.classes.push_back(members);
    }
    std::sort(part.classes.begin(), part.classes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return part;
}

// ---------------------------------------------------------------------------

RayEndResult ray_to_end(const SpaceHandle& s, const QuasiGeodesic& g,
                        const std::vector<double>& radii, double outer) {
    RayEndResult res;
    res.resolved_all_radii = true;
    for (double r : radii) {
        // First ray point at norm >= r; a (q,Q) ray must reach it within
        // q*(r+q+Q)+1 indices or it is too short for this radius.
        auto cap = static_cast<std::int64_t>(
            std::ceil(g.q * (r + g.q + g.Q) + 2));
        QuasiGeodesic gm = qgeo::materialized(g, cap);
        std::optional<Point> probe;
        for (std::int64_t i = 1; i <= gm.length(); ++i) {
            double ni = s.norm(gm.at(i));
            if (ni >= r && ni <= outer) {
                probe = gm.at(i);
                break;
            }
        }
        if (!probe) throw std::invalid_argument("ray too short for radius");
        auto comp = annulus_component_of(s, r, outer, *probe);
        if (!comp) {
            res.resolved_all_radii = false;
            continue;
        }
        res.ends.emplace_back(r, *comp);
    }
    return res;
}

// ---------------------------------------------------------------------------

double gromov_product(const SpaceHandle& s, const Point& x, const Point& y,
                      const Point& a) {
    return 0.5 * (s.distance(x, a) + s.distance(y, a) - s.distance(x, y));
}

HyperbolicityEstimate estimate_delta(const SpaceHandle& s,
                                     const DeltaSampleSpec& spec) {
    HyperbolicityEstimate est;
    std::vector<Point> pts = s.ball(s.basepoint(), spec.radius);
    std::size_t n = pts.size();

    if (spec.mode == DeltaSampleSpec::Mode::TriplesFixedBase) {
        est.description = "triples over ball(x0, " +
                          std::to_string(spec.radius) + "), base = x0";
        std::vector<double> dbase(n);
        for (std::size_t i = 0; i < n; ++i) dbase[i] = s.norm(pts[i]);
        std::vector<std::vector<double>> dm(n, std::vector<double>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dm[i][j] = dm[j][i] = s.distance(pts[i], pts[j]);
        double worst = 0;
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = x; y < n; ++y) {
                double pxy = 0.5 * (dbase[x] + dbase[y] - dm[x][y]);
                for (std::size_t z = 0; z < n; ++z) {
                    double pxz = 0.5 * (dbase[x] + dbase[z] - dm[x][z]);
                    double pzy = 0.5 * (dbase[z] + dbase[y] - dm[z][y]);
                    double gap = std::min(pxz, pzy) - pxy;
                    if (gap > worst) worst = gap;
                }
                est.samples += n;
            }
        }
        est.delta_hat = 4.0 * std::max(0.0, worst);
        return est;
    }

    est.description = "random quadruples over ball(x0, " +
                      std::to_string(spec.radius) + ")";
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double worst = 0;
    for (std::size_t t = 0; t < spec.count; ++t) {
        const Point& x = pts[pick(rng)];
        const Point& y = pts[pick(rng)];
        const Point& z = pts[pick(rng)];
        const Point& a = pts[pick(rng)];
        double gap = std::min(gromov_product(s, x, z, a),
                              gromov_product(s, z, y, a)) -
                     gromov_product(s, x, y, a);
        worst = std::max(worst, gap);
    }
    est.samples = spec.count;
    est.delta_hat = 4.0 * std::max(0.0, worst);
    return est;
}

// ---------------------------------------------------------------------------

QiResult qi_pushforward(const SpaceHandle& s, const QiMapSpec& map_spec,
                        const QuasiGeodesic& g, double q, double Q) {
    std::string kind = s.kind_name();
    bool is_grid = kind == "grid2d";
    bool is_line = kind == "line";
    if (!is_grid && !is_line)
        throw std::invalid_argument("map defined for grid2d/line only");
    if (map_spec.kind != QiMapSpec::Kind::Scale && !is_grid)
        throw std::invalid_argument("map requires grid2d");

    QiResult res;
    res.image = g;
    res.image.name = g.name + "/pushforward";
    res.image.generator.reset();
    for (auto& p : res.image.pts) {
        switch (map_spec.kind) {
            case QiMapSpec::Kind::Scale:
                for (auto& c : p.w) c *= map_spec.lambda;
                break;
            case QiMapSpec::Kind::Swap:
                std::swap(p.w[0], p.w[1]);
                break;
            case QiMapSpec::Kind::Perturb: {
                std::int64_t parity = ((p.w[0] % 2) + 2) % 2;
                p.w[1] += parity * map_spec.magnitude;
                break;
            }
        }
    }

    double lam = map_spec.kind == QiMapSpec::Kind::Scale
                     ? static_cast<double>(map_spec.lambda)
                     : 1.0;
    double cap = lam * Q + 2 * lam * (static_cast<double>(map_spec.magnitude) + 2) + 8;
    for (double c = 0; c <= cap; c += 1) {
        if (qgeo::validate(s, res.image.pts, lam * q, lam * Q + c).ok) {
            res.q_fit = lam * q;
            res.Q_fit = lam * Q + c;
            res.image.q = res.q_fit;
            res.image.Q = res.Q_fit;
            return res;
        }
    }
    throw std::logic_error("could not fit constants within the family cap");
}

}  // namespace qgb::boundary
