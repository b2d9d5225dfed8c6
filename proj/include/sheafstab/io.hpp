#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chambers.hpp"
#include "hn.hpp"
#include "walls.hpp"

namespace sheafstab::io {

using json = nlohmann::ordered_json;

namespace detail {

inline Rational read_rational(const json& j, const std::string& where) {
    if (j.is_number_integer())
        return Rational(static_cast<long long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const Error& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    throw ValidationError(where + ": expected a rational string");
}

inline std::vector<Rational> read_rational_array(const json& j, const std::string& where) {
    if (!j.is_array())
        throw ValidationError(where + ": expected an array");
    std::vector<Rational> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(read_rational(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(where + ": missing field \"" + key + "\"");
    return *it;
}

inline int read_int(const json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw ValidationError(where + ": expected an integer");
    return j.get<int>();
}

/// Graded components from an object keyed by codimension; absent keys are
/// zero components.
inline std::vector<std::vector<Rational>> read_components(const json& j, const ModelPtr& model,
                                                          const std::string& where) {
    if (!j.is_object())
        throw ValidationError(where + ": expected an object keyed by codimension");
    auto comps = model->zero_components();
    for (const auto& [key, value] : j.items()) {
        int codim = -1;
        try {
            std::size_t used = 0;
            codim = std::stoi(key, &used);
            if (used != key.size())
                codim = -1;
        } catch (const std::exception&) {
            codim = -1;
        }
        if (codim < 0 || codim > model->dimension())
            throw ValidationError(where + ": bad codimension key \"" + key + "\"");
        auto coeffs = read_rational_array(value, where + "[\"" + key + "\"]");
        if (coeffs.size() != model->rank(codim))
            throw ValidationError(where + ": codim " + key + " expects " +
                                  std::to_string(model->rank(codim)) + " coefficients");
        comps[static_cast<std::size_t>(codim)] = std::move(coeffs);
    }
    return comps;
}

inline SheafClass read_sheaf_class(const json& j, const ModelPtr& model, const std::string& where) {
    GradedClass ch(model, read_components(field(j, "ch", where), model, where + ".ch"));
    const int dim = read_int(field(j, "dim", where), where + ".dim");
    try {
        return SheafClass(std::move(ch), dim);
    } catch (const Error& e) {
        throw ValidationError(where + ": " + e.what());
    }
}

inline json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("parse failure in '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw ValidationError("file '" + path + "' does not hold a JSON object");
    return j;
}

inline json rational_array(const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& x : v)
        out.push_back(x.str());
    return out;
}

inline json components_object(const GradedClass& c) {
    json out = json::object();
    for (int p = 0; p <= c.model()->dimension(); ++p) {
        bool nonzero = false;
        for (const auto& x : c.component(p))
            nonzero = nonzero || !x.is_zero();
        if (nonzero)
            out[std::to_string(p)] = rational_array(c.component(p));
    }
    return out;
}

} // namespace detail

/// Builds a validated model from a variety file.
inline ModelPtr load_variety(const std::string& path) {
    const json j = detail::parse_file(path);
    const std::string where = "variety '" + path + "'";
    VarietyModel::Data d;
    d.name = detail::field(j, "name", where).get<std::string>();
    d.dimension = detail::read_int(detail::field(j, "dimension", where), where + ".dimension");
    if (d.dimension < 0)
        throw ValidationError(where + ": negative dimension");
    for (const auto& r : detail::field(j, "ranks", where))
        d.ranks.push_back(r.get<std::size_t>());
    for (const auto& level : detail::field(j, "basis", where)) {
        std::vector<std::string> labels;
        for (const auto& s : level)
            labels.push_back(s.get<std::string>());
        d.basis.push_back(std::move(labels));
    }
    const auto& products = detail::field(j, "products", where);
    for (std::size_t k = 0; k < products.size(); ++k) {
        const std::string pw = where + ".products[" + std::to_string(k) + "]";
        const auto& e = products[k];
        VarietyModel::ProductEntry entry;
        entry.p = detail::read_int(detail::field(e, "p", pw), pw + ".p");
        entry.q = detail::read_int(detail::field(e, "q", pw), pw + ".q");
        entry.i = detail::field(e, "i", pw).get<std::size_t>();
        entry.j = detail::field(e, "j", pw).get<std::size_t>();
        entry.coeffs = detail::read_rational_array(detail::field(e, "coeffs", pw), pw + ".coeffs");
        d.products.push_back(std::move(entry));
    }
    d.integration = detail::read_rational_array(detail::field(j, "integration", where),
                                                where + ".integration");
    const auto& todd = detail::field(j, "todd", where);
    d.todd.assign(static_cast<std::size_t>(d.dimension) + 1, {});
    for (std::size_t p = 0; p < d.todd.size(); ++p) {
        const std::string key = std::to_string(p);
        const auto it = todd.find(key);
        if (it == todd.end())
            throw ValidationError(where + ".todd: missing codim " + key);
        d.todd[p] = detail::read_rational_array(*it, where + ".todd[" + key + "]");
    }
    d.euler_char = detail::read_rational(detail::field(j, "euler_char", where), where + ".euler_char");
    for (const auto& level : detail::field(j, "nef_facets", where)) {
        std::vector<std::vector<Rational>> facets;
        for (const auto& f : level)
            facets.push_back(detail::read_rational_array(f, where + ".nef_facets"));
        d.nef_facets.push_back(std::move(facets));
    }
    if (j.contains("polarization"))
        d.polarization = detail::read_rational_array(j["polarization"], where + ".polarization");
    return VarietyModel::create(std::move(d));
}

/// Serializes a model so that load_variety(dump) reproduces it exactly.
inline json dump_variety(const ModelPtr& model) {
    const auto& d = model->data();
    json j;
    j["name"] = d.name;
    j["dimension"] = d.dimension;
    j["ranks"] = d.ranks;
    j["basis"] = d.basis;
    j["products"] = json::array();
    for (const auto& e : d.products) {
        json entry;
        entry["p"] = e.p;
        entry["q"] = e.q;
        entry["i"] = e.i;
        entry["j"] = e.j;
        entry["coeffs"] = detail::rational_array(e.coeffs);
        j["products"].push_back(std::move(entry));
    }
    j["integration"] = detail::rational_array(d.integration);
    j["todd"] = json::object();
    for (std::size_t p = 0; p < d.todd.size(); ++p)
        j["todd"][std::to_string(p)] = detail::rational_array(d.todd[p]);
    j["euler_char"] = d.euler_char.str();
    j["nef_facets"] = json::array();
    for (const auto& level : d.nef_facets) {
        json facets = json::array();
        for (const auto& f : level)
            facets.push_back(detail::rational_array(f));
        j["nef_facets"].push_back(std::move(facets));
    }
    if (d.polarization)
        j["polarization"] = detail::rational_array(*d.polarization);
    return j;
}

struct Problem {
    SheafClass gamma;
    int d = 0;
    int r = 0;
    std::vector<GradedClass> alphas; // ascending codim r..d
    std::vector<SheafClass> candidates;

    DegreeSystem system() const { return DegreeSystem(d, r, alphas); }
};

/// Reads gamma, the degree system, and the candidate list.
inline Problem load_problem(const std::string& path, const ModelPtr& model) {
    const json j = detail::parse_file(path);
    const std::string where = "problem '" + path + "'";
    SheafClass gamma = detail::read_sheaf_class(detail::field(j, "gamma", where), model,
                                                where + ".gamma");
    const auto& ds = detail::field(j, "degree_system", where);
    const int d = detail::read_int(detail::field(ds, "d", where), where + ".d");
    const int r = detail::read_int(detail::field(ds, "r", where), where + ".r");
    const auto& alphas = detail::field(ds, "alphas", where);
    std::vector<GradedClass> system;
    for (int i = r; i <= d; ++i) {
        const std::string key = std::to_string(i);
        const auto it = alphas.find(key);
        if (it == alphas.end())
            throw ValidationError(where + ".degree_system.alphas: missing codim " + key);
        auto comps = model->zero_components();
        auto coeffs = detail::read_rational_array(*it, where + ".alphas[" + key + "]");
        if (coeffs.size() != model->rank(i))
            throw ValidationError(where + ".alphas: codim " + key + " expects " +
                                  std::to_string(model->rank(i)) + " coefficients");
        comps[static_cast<std::size_t>(i)] = std::move(coeffs);
        system.emplace_back(model, std::move(comps));
    }
    std::vector<SheafClass> candidates;
    if (j.contains("candidates")) {
        const auto& cs = j["candidates"];
        for (std::size_t k = 0; k < cs.size(); ++k)
            candidates.push_back(detail::read_sheaf_class(
                cs[k], model, where + ".candidates[" + std::to_string(k) + "]"));
    }
    return Problem{std::move(gamma), d, r, std::move(system), std::move(candidates)};
}

inline SamplePoint read_point(const json& j, const std::string& where) {
    if (!j.is_object())
        throw ValidationError(where + ": expected an object keyed by codimension");
    SamplePoint pt;
    for (const auto& [key, value] : j.items()) {
        int codim = -1;
        try {
            std::size_t used = 0;
            codim = std::stoi(key, &used);
            if (used != key.size())
                codim = -1;
        } catch (const std::exception&) {
            codim = -1;
        }
        if (codim < 0)
            throw ValidationError(where + ": bad codimension key \"" + key + "\"");
        pt[codim] = detail::read_rational_array(value, where + "[\"" + key + "\"]");
    }
    return pt;
}

struct Region {
    CompactRegion region;
    std::optional<CandidateBox> box;
    std::optional<std::pair<SamplePoint, SamplePoint>> segment;
};

/// Reads sections, the compact product polytope K, the optional candidate
/// search box, and the optional crossing segment.
inline Region load_region(const std::string& path, const ModelPtr& model, int d, int r) {
    const json j = detail::parse_file(path);
    const std::string where = "region '" + path + "'";
    std::vector<SectionFrame> frames;
    for (const auto& s : detail::field(j, "sections", where)) {
        SectionFrame f;
        f.codim = detail::read_int(detail::field(s, "codim", where), where + ".sections.codim");
        f.ell = detail::read_rational_array(detail::field(s, "ell", where), where + ".sections.ell");
        frames.push_back(std::move(f));
    }
    std::map<int, std::vector<std::vector<Rational>>> vertices;
    for (const auto& k : detail::field(j, "K", where)) {
        const int codim = detail::read_int(detail::field(k, "codim", where), where + ".K.codim");
        std::vector<std::vector<Rational>> vs;
        for (const auto& v : detail::field(k, "vertices", where))
            vs.push_back(detail::read_rational_array(v, where + ".K.vertices"));
        if (!vertices.emplace(codim, std::move(vs)).second)
            throw ValidationError(where + ".K: duplicate codim " + std::to_string(codim));
    }
    Region out{CompactRegion(model, d, r, std::move(frames), std::move(vertices)), {}, {}};
    if (j.contains("box")) {
        CandidateBox box;
        for (const auto& c : detail::field(j["box"], "coords", where + ".box")) {
            BoxCoord bc;
            bc.codim = detail::read_int(detail::field(c, "codim", where), where + ".box.codim");
            bc.index = detail::field(c, "index", where + ".box").get<std::size_t>();
            bc.min = detail::read_rational(detail::field(c, "min", where), where + ".box.min");
            bc.max = detail::read_rational(detail::field(c, "max", where), where + ".box.max");
            bc.step = detail::read_rational(detail::field(c, "step", where), where + ".box.step");
            box.coords.push_back(std::move(bc));
        }
        out.box = std::move(box);
    }
    if (j.contains("segment")) {
        const auto& seg = j["segment"];
        auto a = read_point(detail::field(seg, "from", where + ".segment"), where + ".segment.from");
        auto b = read_point(detail::field(seg, "to", where + ".segment"), where + ".segment.to");
        out.segment = std::make_pair(std::move(a), std::move(b));
    }
    return out;
}

/// Reads a finite subobject lattice; edges are [sub, super] id pairs.
inline SubobjectLattice load_lattice(const std::string& path, const ModelPtr& model) {
    const json j = detail::parse_file(path);
    const std::string where = "lattice '" + path + "'";
    std::vector<SubobjectLattice::Node> nodes;
    const auto& ns = detail::field(j, "nodes", where);
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const std::string nw = where + ".nodes[" + std::to_string(k) + "]";
        nodes.push_back({detail::field(ns[k], "id", nw).get<std::string>(),
                         detail::read_sheaf_class(ns[k], model, nw)});
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : detail::field(j, "edges", where)) {
        if (!e.is_array() || e.size() != 2)
            throw ValidationError(where + ".edges: expected [sub, super] pairs");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    try {
        return SubobjectLattice(std::move(nodes), std::move(edges),
                                detail::field(j, "zero", where).get<std::string>(),
                                detail::field(j, "root", where).get<std::string>());
    } catch (const Error& e) {
        throw ValidationError(where + ": " + e.what());
    }
}

// ---- report serialization ----------------------------------------------

inline const char* comparison_string(Comparison c) {
    switch (c) {
    case Comparison::Less: return "less";
    case Comparison::Equal: return "equal";
    default: return "greater";
    }
}

inline json degrees_json(const SheafClass& gamma, const DegreeSystem& sys) {
    json rows = json::array();
    for (int i = sys.r(); i <= sys.d(); ++i) {
        json row;
        row["codim"] = i;
        row["value"] = degree(gamma, sys.alpha(i)).str();
        rows.push_back(std::move(row));
    }
    json out;
    out["dim"] = gamma.dim;
    out["degrees"] = std::move(rows);
    return out;
}

inline json poly_json(const HilbertPoly& p) {
    json out;
    out["low"] = p.low;
    out["high"] = p.high;
    json coeffs = json::array();
    for (int k = p.low; k <= p.high; ++k)
        coeffs.push_back(p.at_degree(k).str());
    out["coeffs"] = std::move(coeffs);
    return out;
}

inline json verdict_json(const Verdict& v) {
    json out;
    out["status"] = status_string(v.status);
    json ds = json::array();
    for (const auto& [idx, cmp] : v.destabilizers) {
        json row;
        row["candidate"] = idx;
        row["comparison"] = comparison_string(cmp);
        ds.push_back(std::move(row));
    }
    out["destabilizers"] = std::move(ds);
    out["skipped"] = v.skipped;
    return out;
}

inline json sheaf_class_json(const SheafClass& c) {
    json out;
    out["ch"] = detail::components_object(c.ch);
    out["dim"] = c.dim;
    return out;
}

inline json chain_json(const HNChain& chain, const HnReport& report) {
    json out;
    out["chain"] = chain.node_ids;
    json factors = json::array();
    for (const auto& f : chain.factors)
        factors.push_back(sheaf_class_json(f));
    out["factors"] = std::move(factors);
    out["verified"] = report.ok;
    out["failures"] = report.failures;
    return out;
}

inline json wall_system_json(const WallSystem& sys) {
    json out;
    out["d"] = sys.d;
    out["r"] = sys.r;
    json walls = json::array();
    for (const auto& w : sys.walls) {
        json row;
        row["level"] = w.level;
        json matrix = json::array();
        for (const auto& mr : w.matrix)
            matrix.push_back(detail::rational_array(mr));
        row["matrix"] = std::move(matrix);
        row["candidates"] = w.candidates;
        walls.push_back(std::move(row));
    }
    out["walls"] = std::move(walls);
    json nulls = json::array();
    for (const auto& [cand, level] : sys.null_walls) {
        json row;
        row["candidate"] = cand;
        row["level"] = level;
        nulls.push_back(std::move(row));
    }
    out["null_walls"] = std::move(nulls);
    out["bilinear"] = sys.bilinear;
    return out;
}

inline json point_json(const SamplePoint& pt) {
    json out = json::object();
    for (const auto& [codim, coords] : pt)
        out[std::to_string(codim)] = detail::rational_array(coords);
    return out;
}

inline json level_verdicts_json(const std::vector<LevelVerdict>& vs) {
    json out = json::array();
    for (const auto& lv : vs) {
        json row;
        row["level"] = lv.level;
        row["verdict"] = verdict_json(lv.verdict);
        out.push_back(std::move(row));
    }
    return out;
}

inline json constancy_json(const ConstancyReport& r) {
    json out;
    out["samples_used"] = r.samples_used;
    out["on_wall_discarded"] = r.on_wall_discarded;
    out["chambers_seen"] = r.chambers_seen;
    out["violations"] = r.violations;
    out["pass"] = r.pass();
    return out;
}

inline json chambers_json(const ChamberTable& table, const ConstancyReport& constancy) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r;
        r["sign_vector"] = row.sign;
        r["representative"] = point_json(row.representative);
        rows.push_back(std::move(r));
    }
    json out;
    out["chambers"] = std::move(rows);
    out["samples_used"] = table.samples_used;
    out["on_wall_discarded"] = table.on_wall_discarded;
    out["constancy"] = constancy_json(constancy);
    return out;
}

inline json crossing_parameter_json(const CrossingParameter& t) {
    if (t.is_rational())
        return json(t.rational_part().str());
    json out;
    out["a"] = t.rational_part().str();
    out["b"] = t.surd_coeff().str();
    out["disc"] = t.discriminant().str();
    return out;
}

inline json crossings_json(const std::vector<CrossingEvent>& events) {
    json rows = json::array();
    for (const auto& e : events) {
        json row;
        row["wall"] = e.wall_id;
        row["t"] = crossing_parameter_json(e.t);
        row["before"] = level_verdicts_json(e.before);
        row["after"] = level_verdicts_json(e.after);
        rows.push_back(std::move(row));
    }
    json out;
    out["events"] = std::move(rows);
    return out;
}

// ---- CSV ----------------------------------------------------------------

inline std::string point_csv(const SamplePoint& pt) {
    std::ostringstream os;
    bool first_factor = true;
    for (const auto& [codim, coords] : pt) {
        if (!first_factor)
            os << '|';
        first_factor = false;
        os << codim << ":[";
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (i)
                os << ';';
            os << coords[i].str();
        }
        os << ']';
    }
    return os.str();
}

inline std::string verdict_summary_csv(const std::vector<LevelVerdict>& vs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i)
            os << '|';
        os << "s=" << vs[i].level << ':' << status_string(vs[i].verdict.status);
    }
    return os.str();
}

inline std::string chambers_csv(const ChamberTable& table, const ConstancyReport& constancy,
                                const std::vector<std::vector<LevelVerdict>>& verdict_rows) {
    std::ostringstream os;
    os << "sign_vector,representative,verdicts\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        os << table.rows[i].sign << ',' << point_csv(table.rows[i].representative) << ','
           << verdict_summary_csv(verdict_rows[i]) << '\n';
    os << "# chambers: " << table.rows.size() << "\n";
    os << "# constancy: " << (constancy.pass() ? "pass" : "FAIL") << "\n";
    for (const auto& v : constancy.violations)
        os << "# violation: " << v << "\n";
    return os.str();
}

inline std::string degrees_csv(const SheafClass& gamma, const DegreeSystem& sys) {
    std::ostringstream os;
    os << "codim,value\n";
    for (int i = sys.r(); i <= sys.d(); ++i)
        os << i << ',' << degree(gamma, sys.alpha(i)).str() << '\n';
    return os.str();
}

/// Canonical textual form: two-space indent, trailing newline, LF endings.
inline std::string to_text(const json& j) { return j.dump(2) + "\n"; }

} // namespace sheafstab::io
