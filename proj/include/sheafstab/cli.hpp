#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "models.hpp"
#include "svg.hpp"

namespace sheafstab::cli {

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

namespace detail {

struct Options {
    std::string variety, builtin_name, problem, region, lattice, svg_path;
    std::uint64_t seed = 0;
    int samples = 256;
    int grid = 4;
    std::string format;             // empty: json, or csv for chambers
    std::string pruning = "all";
    std::string cand_source = "problem";
};

inline void register_common(CLI::App* sub, Options& o) {
    sub->add_option("--variety", o.variety, "variety file path");
    sub->add_option("--builtin", o.builtin_name, "builtin model: p2|p1xp1|example-threefold|pN:k");
    sub->add_option("--problem", o.problem, "problem file path");
    sub->add_option("--region", o.region, "region file path");
    sub->add_option("--lattice", o.lattice, "subobject lattice file path");
    sub->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
    sub->add_option("--samples", o.samples, "number of samples")->capture_default_str();
    sub->add_option("--grid", o.grid, "stratified grid density")->capture_default_str();
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--svg", o.svg_path, "write an SVG rendering to this path");
    sub->add_option("--pruning", o.pruning, "wall pruning mode")
        ->check(CLI::IsMember({"all", "stratified"}))
        ->capture_default_str();
    sub->add_option("--candidates-source", o.cand_source, "candidate origin")
        ->check(CLI::IsMember({"problem", "box", "both"}))
        ->capture_default_str();
}

inline ModelPtr resolve_model(const Options& o) {
    if (o.variety.empty() == o.builtin_name.empty())
        throw ValidationError("exactly one of --variety and --builtin is required");
    if (!o.variety.empty())
        return io::load_variety(o.variety);
    return builtin_model(o.builtin_name);
}

inline io::Problem require_problem(const Options& o, const ModelPtr& model) {
    if (o.problem.empty())
        throw ValidationError("this subcommand requires --problem");
    return io::load_problem(o.problem, model);
}

inline io::Region require_region(const Options& o, const ModelPtr& model, const io::Problem& p) {
    if (o.region.empty())
        throw ValidationError("this subcommand requires --region");
    return io::load_region(o.region, model, p.d, p.r);
}

inline std::vector<SheafClass> resolve_candidates(const Options& o, const io::Problem& problem,
                                                  const io::Region& region) {
    std::vector<SheafClass> out;
    if (o.cand_source == "problem" || o.cand_source == "both")
        out = problem.candidates;
    if (o.cand_source == "box" || o.cand_source == "both") {
        if (!region.box)
            throw ValidationError("candidate source 'box' needs a box in the region file");
        auto more = enumerate_candidates(problem.gamma, region.region, *region.box,
                                         MPolicy::auto_policy());
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

inline Pruning resolve_pruning(const Options& o) {
    return o.pruning == "stratified" ? Pruning::Stratified : Pruning::AllLevels;
}

inline std::string resolve_format(const Options& o, const std::string& sub) {
    if (!o.format.empty())
        return o.format;
    return sub == "chambers" ? "csv" : "json";
}

inline void write_svg_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write SVG file '" + path + "'");
    out << content;
}

} // namespace detail

/// Parses arguments (excluding the program name), runs one subcommand, and
/// captures its textual output.  Exit code 0 on success, 2 on validation
/// failures, 3 on an ambiguous maximal destabilizer.
inline CliResult run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Exact semistability toolkit: degree systems, Hilbert polynomials,\n"
                 "Harder-Narasimhan filtrations, and wall-and-chamber decompositions\n"
                 "over rational numerical Chow rings."};
    app.require_subcommand(1);
    detail::Options o;

    auto* degrees = app.add_subcommand("degrees", "table of deg_{alpha_i}(gamma)");
    auto* hilbert = app.add_subcommand("hilbert", "alpha-Hilbert polynomial and reduced form");
    auto* ss = app.add_subcommand("ss", "semistability verdict against the candidate set");
    auto* hn = app.add_subcommand("hn", "Harder-Narasimhan filtration over a lattice");
    auto* walls = app.add_subcommand("walls", "wall system over the parameter region");
    auto* chambers = app.add_subcommand("chambers", "chamber table and constancy report");
    auto* cross = app.add_subcommand("cross", "wall crossings along the region segment");
    for (auto* sub : {degrees, hilbert, ss, hn, walls, chambers, cross})
        detail::register_common(sub, o);

    CliResult result;
    std::ostringstream out, err;

    std::vector<const char*> argv;
    argv.push_back("sheafstab");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        // CLI11 uses its own exit code table; keep the contract 0 / 2.
        result.exit_code = app.exit(e, out, err) == 0 ? 0 : 2;
        result.out = out.str();
        result.err = err.str();
        return result;
    }

    try {
        const ModelPtr model = detail::resolve_model(o);

        if (degrees->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto sys = problem.system();
            if (detail::resolve_format(o, "degrees") == "csv")
                out << io::degrees_csv(problem.gamma, sys);
            else
                out << io::to_text(io::degrees_json(problem.gamma, sys));
        } else if (hilbert->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto sys = problem.system();
            if (detail::resolve_format(o, "hilbert") == "csv")
                throw ValidationError("csv output is not available for 'hilbert'");
            io::json j;
            j["P"] = io::poly_json(hilbert_polynomial(problem.gamma, sys));
            try {
                j["reduced"] = io::poly_json(reduced_hilbert(problem.gamma, sys));
            } catch (const ValidationError& e) {
                j["reduced"] = nullptr;
                j["reduced_error"] = e.what();
            }
            out << io::to_text(j);
        } else if (ss->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto sys = problem.system();
            if (detail::resolve_format(o, "ss") == "csv")
                throw ValidationError("csv output is not available for 'ss'");
            const Verdict v = is_semistable(problem.gamma, sys, problem.candidates,
                                            CandidateMode::Sub, sys.r());
            io::json j = io::verdict_json(v);
            j["level"] = sys.r();
            out << io::to_text(j);
        } else if (hn->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto sys = problem.system();
            if (o.lattice.empty())
                throw ValidationError("'hn' requires --lattice");
            if (detail::resolve_format(o, "hn") == "csv")
                throw ValidationError("csv output is not available for 'hn'");
            const auto lattice = io::load_lattice(o.lattice, model);
            const HNChain chain = hn_filtration(lattice, sys);
            const HnReport report = verify_hn(lattice, sys, chain);
            out << io::to_text(io::chain_json(chain, report));
        } else if (walls->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto region = detail::require_region(o, model, problem);
            const auto candidates = detail::resolve_candidates(o, problem, region);
            const auto system = wall_system(problem.gamma, region.region, candidates,
                                            detail::resolve_pruning(o), o.grid);
            if (detail::resolve_format(o, "walls") == "csv")
                throw ValidationError("csv output is not available for 'walls'");
            out << io::to_text(io::wall_system_json(system));
            if (!o.svg_path.empty())
                detail::write_svg_file(o.svg_path,
                                       svg::render_svg(system, region.region, ChamberTable{}));
        } else if (chambers->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto region = detail::require_region(o, model, problem);
            const auto candidates = detail::resolve_candidates(o, problem, region);
            const auto system = wall_system(problem.gamma, region.region, candidates,
                                            detail::resolve_pruning(o), o.grid);
            const ChamberTable table = sample_chambers(system, region.region, o.samples, o.seed);
            const ConstancyReport constancy =
                verdict_constancy_check(problem.gamma, system, region.region, candidates,
                                        CandidateMode::Sub, o.samples, o.seed);
            if (detail::resolve_format(o, "chambers") == "csv") {
                std::vector<std::vector<LevelVerdict>> rows;
                for (const auto& row : table.rows)
                    rows.push_back(verdicts_at(problem.gamma, region.region, candidates,
                                               CandidateMode::Sub, row.representative));
                out << io::chambers_csv(table, constancy, rows);
            } else {
                out << io::to_text(io::chambers_json(table, constancy));
            }
            if (!o.svg_path.empty())
                detail::write_svg_file(o.svg_path, svg::render_svg(system, region.region, table));
        } else if (cross->parsed()) {
            const auto problem = detail::require_problem(o, model);
            const auto region = detail::require_region(o, model, problem);
            if (!region.segment)
                throw ValidationError("'cross' requires a \"segment\" entry in the region file");
            const auto candidates = detail::resolve_candidates(o, problem, region);
            const auto system = wall_system(problem.gamma, region.region, candidates,
                                            detail::resolve_pruning(o), o.grid);
            if (detail::resolve_format(o, "cross") == "csv")
                throw ValidationError("csv output is not available for 'cross'");
            const auto events =
                wall_crossing_report(problem.gamma, region.region, system, candidates,
                                     CandidateMode::Sub, region.segment->first,
                                     region.segment->second);
            out << io::to_text(io::crossings_json(events));
        }
        result.exit_code = 0;
    } catch (const AmbiguousMdsError& e) {
        err << "error: " << e.what() << "\n";
        result.exit_code = 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        result.exit_code = 2;
    }
    result.out = out.str();
    result.err = err.str();
    return result;
}

} // namespace sheafstab::cli
