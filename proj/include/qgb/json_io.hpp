#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qgb/boundary.hpp"
#include "qgb/funcs.hpp"
#include "qgb/qgeo.hpp"
#include "qgb/space.hpp"
#include "qgb/sublinear.hpp"

namespace qgb::io {

// Accepts either a path to a JSON file or inline JSON (first non-space
// character '{' or '[').
json load_json_arg(const std::string& path_or_inline);

// {"generator":"axis+x"} or {"points":[[0,0],[1,0],...]}; optional q, Q,
// name fields.
qgeo::QuasiGeodesic parse_ray(std::shared_ptr<const SpaceHandle> s,
                              const json& j, double default_q = 1,
                              double default_Q = 0);

funcs::FuncSpec parse_func(const SpaceHandle& s, const json& j);

// "sqrt" | "log" | {"kind":"power","p":0.7} | {"kind":"linear","slope":s} |
// {"kind":"table","samples":[[t,v],...]}
sublinear::KappaSpec parse_kappa(const json& j);

struct RunConfig {
    double tolerance = 1e-9;
    std::uint64_t node_budget = 200000;
    double k = 2;
    std::int64_t m_star = 4;
    std::int64_t N = 48;
    std::int64_t T = 2;
    double delta_depth = 0.5;
    std::string out_dir = ".";
    int threads = 1;
    std::uint64_t seed = 12345;
};

RunConfig parse_config(const json& j);
int env_threads_cap(int requested);  // honors QGB_THREADS

// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

json partition_report(const boundary::BoundaryPartition& part,
                      const json& space_spec, const std::string& property);
std::string partition_dot(const boundary::BoundaryPartition& part);

struct ParsedPartition {
    std::shared_ptr<const SpaceHandle> space;
    boundary::BoundaryPartition partition;
};

// Reads back a partition report (space + rays + classes).
ParsedPartition parse_partition(const json& j);

}  // namespace qgb::io
