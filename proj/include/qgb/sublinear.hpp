#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qgb/boundary.hpp"
#include "qgb/funcs.hpp"
#include "qgb/qgeo.hpp"
#include "qgb/space.hpp"

namespace qgb::sublinear {

using qgeo::QuasiGeodesic;

// Sublinear gauge kappa: [0,inf) -> [1,inf), values floored at 1.
struct KappaSpec {
    enum class Kind { Sqrt, Log, Power, Table, Linear };
    Kind kind = Kind::Sqrt;
    double p = 0.5;      // Power exponent
    double slope = 1.0;  // Linear (negative-test) slope
    std::vector<std::pair<double, double>> samples;  // Table nodes (t, v)
    std::string name = "sqrt";
};

double kappa_eval(const KappaSpec& kappa, double t);

struct SublinearityReport {
    std::vector<std::pair<double, double>> ratios;  // (t, kappa(t)/t)
    bool pass = false;
};

// kappa(t)/t along a doubling schedule must be nonincreasing and end below
// the threshold.
SublinearityReport is_sublinear(const KappaSpec& kappa, double t0,
                                int doublings, double threshold = 0.1);

struct MajorantResult {
    std::vector<double> ts;
    std::vector<double> kbar;  // concave nondecreasing majorant at ts
    double Qm = 1;             // max kbar/kappa over samples
    bool concave = false;
    bool nondecreasing = false;
    bool sandwich = false;  // kappa <= kbar <= Qm * kappa on samples
};

MajorantResult concave_majorant(
    const std::vector<std::pair<double, double>>& samples);

// ---------------------------------------------------------------------------
// kappa-tracking between two rays.

struct TrackWindow {
    std::int64_t T = 0;  // window is [T/2, T]
    double sup_ratio_t = 0;
    double sup_ratio_norm = 0;
};

struct TrackVerdict {
    std::vector<TrackWindow> windows;
    bool bounded_t = false;
    bool bounded_norm = false;
    double C = 0;  // fitted: final window sup of d/kappa(||g(t)||)
    double M = 0;  // fitted: final window sup of d/kappa(t)
};

TrackVerdict kappa_track(const SpaceHandle& s, const QuasiGeodesic& g,
                         const QuasiGeodesic& h, const KappaSpec& kappa,
                         const std::vector<std::int64_t>& window_tops,
                         double growth_tol = 0.25);

struct EquivalenceReport {
    TrackVerdict verdict;
    bool used_majorant = false;
    double Qm = 1;
    bool agree = false;  // the two ratio families classify identically
};

// For concave increasing kappa the two ratio families must agree; general
// gauges are replaced by their concave majorant first.
EquivalenceReport tracking_equivalence_check(
    const SpaceHandle& s, const QuasiGeodesic& g, const QuasiGeodesic& h,
    const KappaSpec& kappa, const std::vector<std::int64_t>& window_tops,
    double growth_tol = 0.25);

// Coarsens a boundary partition by merging classes whose representative
// rays kappa-track each other (bounded verdict).
boundary::BoundaryPartition sublinear_quotient(
    const boundary::BoundaryPartition& partition, const KappaSpec& kappa,
    const std::vector<std::int64_t>& window_tops, double growth_tol = 0.25);

// ---------------------------------------------------------------------------
// kappa-slowly-oscillating test.

struct KsoRow {
    double C = 0;
    double radius = 0;
    double sup_diff = 0;
    std::size_t pairs = 0;
};

struct KsoReport {
    std::vector<KsoRow> rows;
    bool pass = false;
    double eps = 0;
};

KsoReport test_kappa_slow_osc(const SpaceHandle& s, const funcs::FuncSpec& f,
                              const KappaSpec& kappa,
                              const std::vector<double>& C_list,
                              const std::vector<double>& radii, double eps);

}  // namespace qgb::sublinear
