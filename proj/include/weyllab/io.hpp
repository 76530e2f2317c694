#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "hyperbolic.hpp"
#include "models.hpp"

namespace weyllab {

using json = nlohmann::json;

// Shortest form that round-trips: 17 significant digits.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

namespace detail {

template <class T>
T get_required(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
}

} // namespace detail

// {"type":"torus","basis":[[...],...]} with one lattice vector per inner array,
// or {"type":"sphere","dim":n}.
inline ManifoldModel parse_model(const json& j)
{
    if (!j.is_object()) throw ConfigError("model must be a JSON object");
    const auto type = detail::get_required<std::string>(j, "type", "model");
    if (type == "torus") {
        const auto rows = detail::get_required<std::vector<std::vector<double>>>(j, "basis", "torus model");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd B(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(c)].size()) != n) throw ConfigError("torus basis must be square");
            for (Eigen::Index r = 0; r < n; ++r) B(r, c) = rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
        }
        return ManifoldModel(LatticeTorus::from_basis(B));
    }
    if (type == "sphere") return ManifoldModel(SphereModel::of_dimension(detail::get_required<int>(j, "dim", "sphere model")));
    throw ConfigError("unknown model type '" + type + "'");
}

inline ManifoldModel load_model(const std::string& path) { return parse_model(read_json_file(path)); }

inline json model_to_json(const ManifoldModel& m)
{
    if (m.is_sphere()) return {{"type", "sphere"}, {"dim", m.dimension()}};
    const auto& B = m.torus().basis;
    json rows = json::array();
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index r = 0; r < B.rows(); ++r) col.push_back(B(r, c));
        rows.push_back(col);
    }
    return {{"type", "torus"}, {"basis", rows}};
}

// {"name", "kind": "surface"|"free", "generators": [[[a,b],[c,d]], ...],
//  "relation": [signed 1-based indices], "min_translation", "center": [x, y], "diameter"}
inline GroupPresentation parse_group(const json& j)
{
    if (!j.is_object()) throw ConfigError("group preset must be a JSON object");
    GroupPresentation G;
    G.name = j.value("name", std::string("group"));
    const auto kind = j.value("kind", std::string("free"));
    if (kind == "surface")
        G.kind = GroupKind::surface;
    else if (kind == "free")
        G.kind = GroupKind::free;
    else
        throw ConfigError("unknown group kind '" + kind + "'");
    const auto gens = detail::get_required<std::vector<std::vector<std::vector<double>>>>(j, "generators", "group preset");
    for (const auto& m : gens) {
        if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) throw ConfigError("generators must be 2x2 matrices");
        G.generators.push_back(Isometry::make(m[0][0], m[0][1], m[1][0], m[1][1]));
    }
    if (j.contains("relation")) {
        G.relation = detail::get_required<Word>(j, "relation", "group preset");
        try {
            check_word(*G.relation, G.rank());
        } catch (const DomainError& e) {
            throw ConfigError(std::string("relation: ") + e.what());
        }
    }
    G.min_translation = detail::get_required<double>(j, "min_translation", "group preset");
    if (j.contains("center")) {
        const auto c = detail::get_required<std::vector<double>>(j, "center", "group preset");
        if (c.size() != 2 || !(c[1] > 0.0)) throw ConfigError("center must be [x, y] with y > 0");
        G.center = Complex(c[0], c[1]);
    }
    if (j.contains("diameter")) G.diameter = detail::get_required<double>(j, "diameter", "group preset");
    G.validate();
    return G;
}

inline GroupPresentation load_group(const std::string& path) { return parse_group(read_json_file(path)); }

inline json group_to_json(const GroupPresentation& G)
{
    json gens = json::array();
    for (const auto& g : G.generators) gens.push_back({{g.a, g.b}, {g.c, g.d}});
    json j{{"name", G.name}, {"kind", G.kind == GroupKind::surface ? "surface" : "free"}, {"generators", gens},
           {"min_translation", G.min_translation}};
    if (G.relation) j["relation"] = *G.relation;
    if (G.center) j["center"] = {G.center->real(), G.center->imag()};
    if (G.diameter) j["diameter"] = *G.diameter;
    return j;
}

// Tunables read from a config file; flags override them.
struct Settings {
    std::optional<double> psi_s_max;
    std::optional<double> quad_tol;
    std::map<int, double> Q; // leading-term constants by dimension

    static Settings from_json(const json& j)
    {
        Settings s;
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (j.contains("psi") && j["psi"].contains("s_max")) s.psi_s_max = j["psi"]["s_max"].get<double>();
        if (j.contains("quad") && j["quad"].contains("tol")) s.quad_tol = j["quad"]["tol"].get<double>();
        if (j.contains("Q"))
            for (auto& [k, v] : j["Q"].items()) {
                if (k.size() < 2 || k[0] != 'n') throw ConfigError("Q keys look like \"n2\"");
                if (!v.is_number()) continue;
                s.Q[std::stoi(k.substr(1))] = v.get<double>();
            }
        if (s.psi_s_max && !(*s.psi_s_max >= 0.0)) throw ConfigError("psi.s_max must be >= 0 (0 = automatic)");
        if (s.quad_tol && !(*s.quad_tol > 0.0)) throw ConfigError("quad.tol must be positive");
        return s;
    }

    static Settings load(const std::string& path) { return from_json(read_json_file(path)); }
};

// Comma- or space-separated numbers.
inline std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::string tok;
    std::stringstream ss(s);
    while (std::getline(ss, tok, ',')) {
        std::stringstream ts(tok);
        std::string part;
        while (ts >> part) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(part, &used));
                if (used != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ConfigError("not a number: '" + part + "'");
            }
        }
    }
    return out;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), cols_(header.size())
    {
        write_strings(header);
    }

    void row(const std::vector<double>& v)
    {
        std::vector<std::string> s;
        for (double x : v) s.push_back(fmt17(x));
        write_strings(s);
    }

    void row_strings(const std::vector<std::string>& v) { write_strings(v); }

private:
    void write_strings(const std::vector<std::string>& v)
    {
        if (v.size() != cols_) throw DomainError("CSV row has the wrong number of columns");
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
        out_ << '\n';
    }

    std::ostream& out_;
    std::size_t cols_;
};

} // namespace weyllab
