#include "qgb/json_io.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qgb::io {

json load_json_arg(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '['))
        return json::parse(arg);
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open file: " + arg);
    json j;
    in >> j;
    return j;
}

qgeo::QuasiGeodesic parse_ray(std::shared_ptr<const SpaceHandle> s,
                              const json& j, double default_q,
                              double default_Q) {
    double q = j.value("q", default_q);
    double Q = j.value("Q", default_Q);
    std::string name = j.value("name", std::string{});
    if (j.contains("generator")) {
        auto tag = j.at("generator").get<std::string>();
        return qgeo::make_ray(std::move(s), tag, q, Q, 0, name);
    }
    if (j.contains("points")) {
        qgeo::QuasiGeodesic g;
        g.space = std::move(s);
        g.q = q;
        g.Q = Q;
        g.name = name.empty() ? "points" : name;
        for (auto& pj : j.at("points")) g.pts.push_back(g.space->decode(pj));
        if (g.pts.empty()) throw std::runtime_error("empty point list");
        return g;
    }
    throw std::runtime_error("ray spec needs \"generator\" or \"points\"");
}

funcs::FuncSpec parse_func(const SpaceHandle& s, const json& j) {
    funcs::FuncSpec f;
    std::string kind = j.at("kind").get<std::string>();
    f.name = j.value("name", kind);
    if (kind == "vanishing") {
        f.kind = funcs::FuncSpec::Kind::Vanishing;
        f.c = j.value("c", 1.0);
    } else if (kind == "clopen_indicator") {
        f.kind = funcs::FuncSpec::Kind::ClopenIndicator;
        f.set_name = j.at("set").get<std::string>();
    } else if (kind == "angle_probe") {
        f.kind = funcs::FuncSpec::Kind::AngleProbe;
    } else if (kind == "custom_table") {
        f.kind = funcs::FuncSpec::Kind::CustomTable;
        f.table_default = j.value("default", 0.0);
        if (j.contains("entries"))
            for (auto& e : j.at("entries"))
                f.table.emplace_back(s.decode(e[0]), e[1].get<double>());
    } else if (kind == "constant") {
        f.kind = funcs::FuncSpec::Kind::Constant;
        f.c = j.value("c", 0.0);
    } else if (kind == "series") {
        f.kind = funcs::FuncSpec::Kind::Series;
        for (auto& t : j.at("terms"))
            f.terms.emplace_back(t[0].get<double>(), parse_func(s, t[1]));
    } else {
        throw std::runtime_error("unknown function kind: " + kind);
    }
    return f;
}

sublinear::KappaSpec parse_kappa(const json& j) {
    sublinear::KappaSpec k;
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        k.name = name;
        if (name == "sqrt") k.kind = sublinear::KappaSpec::Kind::Sqrt;
        else if (name == "log") k.kind = sublinear::KappaSpec::Kind::Log;
        else throw std::runtime_error("unknown kappa: " + name);
        return k;
    }
    std::string kind = j.at("kind").get<std::string>();
    k.name = j.value("name", kind);
    if (kind == "sqrt") k.kind = sublinear::KappaSpec::Kind::Sqrt;
    else if (kind == "log") k.kind = sublinear::KappaSpec::Kind::Log;
    else if (kind == "power") {
        k.kind = sublinear::KappaSpec::Kind::Power;
        k.p = j.at("p").get<double>();
    } else if (kind == "linear") {
        k.kind = sublinear::KappaSpec::Kind::Linear;
        k.slope = j.at("slope").get<double>();
    } else if (kind == "table") {
        k.kind = sublinear::KappaSpec::Kind::Table;
        for (auto& sm : j.at("samples"))
            k.samples.emplace_back(sm[0].get<double>(), sm[1].get<double>());
    } else {
        throw std::runtime_error("unknown kappa kind: " + kind);
    }
    return k;
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    c.tolerance = j.value("tolerance", c.tolerance);
    c.node_budget = j.value("node_budget", c.node_budget);
    c.k = j.value("k", c.k);
    c.m_star = j.value("m_star", c.m_star);
    c.N = j.value("N", c.N);
    c.T = j.value("T", c.T);
    c.delta_depth = j.value("delta_depth", c.delta_depth);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    if (c.node_budget == 0 || c.T <= 0 || c.N <= 0 || c.m_star <= 0)
        throw std::runtime_error("budgets and scales must be positive");
    return c;
}

int env_threads_cap(int requested) {
    if (const char* env = std::getenv("QGB_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) return std::min(requested, cap);
    }
    return requested;
}

std::string csv_escape(const std::string& field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ",";
        os << csv_escape(fields[i]);
    }
    os << "\r\n";
}

json partition_report(const boundary::BoundaryPartition& part,
                      const json& space_spec, const std::string& property) {
    json rays = json::array();
    for (auto& r : part.rays) {
        json rj;
        rj["name"] = r.name;
        if (r.generator) rj["generator"] = *r.generator;
        rj["q"] = r.q;
        rj["Q"] = r.Q;
        rays.push_back(rj);
    }
    json verdicts = json::array();
    for (auto& row : part.verdicts) {
        json vr = json::array();
        for (auto st : row) vr.push_back(boundary::to_string(st));
        verdicts.push_back(vr);
    }
    json classes = json::array();
    json labels = json::array();
    for (auto& cls : part.classes) {
        classes.push_back(cls);
        labels.push_back("r" + std::to_string(cls[0]));
    }
    json params;
    params["k"] = part.params.merge.k;
    params["m_star"] = part.params.merge.m_star;
    params["N"] = part.params.merge.N;
    params["T"] = part.params.merge.T;
    params["delta_depth"] = part.params.merge.delta_depth;
    params["budget"] = part.params.merge.budget;
    params["hausdorff_M"] = part.params.hausdorff_M;
    params["hausdorff_window"] = part.params.hausdorff_window;
    params["threads"] = part.params.threads;

    json rep;
    rep["property"] = property;
    rep["space"] = space_spec;
    rep["params"] = params;
    rep["rays"] = rays;
    rep["verdicts"] = verdicts;
    rep["classes"] = classes;
    rep["class_labels"] = labels;
    if (!part.note.empty()) rep["note"] = part.note;
    return rep;
}

std::string partition_dot(const boundary::BoundaryPartition& part) {
    std::ostringstream os;
    os << "graph merges {\n";
    for (std::size_t i = 0; i < part.rays.size(); ++i)
        os << "  r" << i << " [label=\"" << part.rays[i].name << "\"];\n";
    for (std::size_t i = 0; i < part.rays.size(); ++i) {
        for (std::size_t j = i + 1; j < part.rays.size(); ++j) {
            if (part.verdicts[i][j] == boundary::MergeStatus::Merged)
                os << "  r" << i << " -- r" << j << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

ParsedPartition parse_partition(const json& j) {
    ParsedPartition out;
    out.space = build_space(SpaceSpec::from_json(j.at("space")));
    auto& part = out.partition;
    std::int64_t N = j.at("params").value("N", std::int64_t{48});
    part.params.merge.N = N;
    part.params.merge.k = j.at("params").value("k", 2.0);
    for (auto& rj : j.at("rays")) {
        auto g = parse_ray(out.space, rj);
        part.rays.push_back(qgeo::materialized(g, N));
    }
    for (auto& cj : j.at("classes"))
        part.classes.push_back(cj.get<std::vector<std::size_t>>());
    if (j.contains("verdicts")) {
        for (auto& row : j.at("verdicts")) {
            std::vector<boundary::MergeStatus> vr;
            for (auto& st : row) {
                std::string sv = st.get<std::string>();
                if (sv == "merged")
                    vr.push_back(boundary::MergeStatus::Merged);
                else if (sv == "provably_disjoint_at_scale")
                    vr.push_back(
                        boundary::MergeStatus::ProvablyDisjointAtScale);
                else
                    vr.push_back(
                        boundary::MergeStatus::NotMergedWithinBudget);
            }
            part.verdicts.push_back(std::move(vr));
        }
    }
    return out;
}

}  // namespace qgb::io
