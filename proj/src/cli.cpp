#include "ptinv/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ptinv/classify.hpp"
#include "ptinv/errors.hpp"
#include "ptinv/inverse.hpp"
#include "ptinv/io.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/spectrum.hpp"

namespace ptinv {
namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

Potential require_potential(const RunConfig& rc) {
    if (rc.potential.empty()) throw ConfigError(fmt::format("'{}' needs --potential", rc.command));
    return parse_potential(rc.potential);
}

int cmd_classify(const RunConfig& rc, std::ostream& out) {
    const Potential q = require_potential(rc);
    std::optional<Potential> g;
    if (rc.g) g = parse_potential(*rc.g);
    const HypothesisClass hc = classify(q, rc.solver, g);
    out << "variant = " << to_string(hc.variant) << '\n';
    if (hc.variant != Hypothesis::Unsupported) {
        out << "floor_q0 = " << fmt_double(hc.floor_q0) << '\n';
        out << "tail_floor = " << fmt_double(hc.tail_floor) << '\n';
    }
    out << "tag = " << hc.tag << '\n';
    out << "heuristic = true\n";
    return 0;
}

int cmd_eigen(const RunConfig& rc, std::ostream& out) {
    const Potential q = require_potential(rc);
    const EigenResult res = first_eigenvalue(q, rc.solver);
    out << fmt::format("lambda_1 = {:.6f}\n", res.lambda_1);
    out << "lambda_1_full = " << fmt_double(res.lambda_1) << '\n';
    out << "b_used = " << fmt_double(res.b_used) << '\n';
    out << "iterations = " << res.iterations << '\n';
    out << "truncation_change = " << fmt_double(res.delta) << '\n';
    out << "hypothesis = " << to_string(res.hypothesis.variant) << '\n';
    std::ostringstream csv;
    write_trace_csv(csv, res.eigenfunction, rc.solver.h);
    const std::string path = join_path(rc.out, "eigenfunction.csv");
    write_text_file(path, csv.str());
    out << "eigenfunction = " << path << '\n';
    return 0;
}

int cmd_sample(const RunConfig& rc, std::ostream& out) {
    const Potential q = require_potential(rc);
    const SampleTable table = sample(q, rc.solver, rc.workers);
    const std::string csv = join_path(rc.out, "samples.csv"), json = join_path(rc.out, "samples.json");
    write_sample_files(table, csv, json);
    out << "lambda_1 = " << fmt_double(*table.lambda_1) << '\n';
    out << "entries = " << table.entries.size() << '\n';
    out << "samples = " << csv << '\n';
    return 0;
}

void write_reconstruction_files(const RunConfig& rc, const ReconstructionResult& res, const std::vector<double>* qtrue,
                                const nlohmann::json& report) {
    std::ostringstream csv;
    write_reconstruction_csv(csv, res, qtrue);
    write_text_file(join_path(rc.out, "reconstruction.csv"), csv.str());
    write_text_file(join_path(rc.out, "reconstruction.json"), report.dump(2) + "\n");
}

int cmd_invert(const RunConfig& rc, std::ostream& out) {
    const std::string path = rc.table.empty() ? join_path(rc.out, "samples.csv") : rc.table;
    const SampleTable table = read_sample_table(path);
    const ReconstructionResult res = reconstruct(table, rc.solver);
    nlohmann::json report = reconstruction_report(res);
    report["table"] = std::filesystem::path(path).filename().string();
    write_reconstruction_files(rc, res, nullptr, report);
    out << "lambda_1 = " << fmt_double(res.lambda_1) << '\n';
    out << "window = [" << fmt_double(res.window.first) << ", " << fmt_double(res.window.second) << "]\n";
    out << "points = " << res.xs.size() << '\n';
    out << "clamped_slopes = " << res.clamp_count << '\n';
    return 0;
}

int cmd_roundtrip(const RunConfig& rc, std::ostream& out) {
    const Potential q = require_potential(rc);
    const RoundtripReport rep = roundtrip(q, rc.solver, rc.workers);
    write_sample_files(rep.table, join_path(rc.out, "samples.csv"), join_path(rc.out, "samples.json"));
    nlohmann::json report = roundtrip_report(rep);
    report["potential"] = q.description();
    write_reconstruction_files(rc, rep.result, &rep.qtrue, report);
    out << "lambda_1 = " << fmt_double(rep.result.lambda_1) << '\n';
    out << "window = [" << fmt_double(rep.result.window.first) << ", " << fmt_double(rep.result.window.second) << "]\n";
    out << "max_error = " << fmt_double(rep.max_error) << '\n';
    out << "mean_error = " << fmt_double(rep.mean_error) << '\n';
    for (const auto& [a, b] : rep.excluded)
        out << "excluded = [" << fmt_double(a) << ", " << fmt_double(b) << "] (jump of q)\n";
    if (rep.jump_overshoot) out << "warning: overshoot near a jump of q exceeds the error elsewhere\n";
    return 0;
}

int cmd_plotdata(const RunConfig& rc, std::ostream& out) {
    if (rc.result.empty()) throw ConfigError("plotdata needs --result");
    emit_plotdata(rc.result, out);
    return 0;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("'{}' is not a comma-separated list of numbers", text));
        }
    }
    return values;
}

}  // namespace

int run_command(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    try {
        if (rc.command == "classify") return cmd_classify(rc, out);
        if (rc.command == "eigen") return cmd_eigen(rc, out);
        if (rc.command == "sample") return cmd_sample(rc, out);
        if (rc.command == "invert") return cmd_invert(rc, out);
        if (rc.command == "roundtrip") return cmd_roundtrip(rc, out);
        if (rc.command == "plotdata") return cmd_plotdata(rc, out);
        throw ConfigError(fmt::format("unknown command '{}'", rc.command));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Point-interaction inverse Sturm-Liouville solver"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig rc;
    std::string config_path, r_ladder;
    double b = 0, h = 0, eig_tol = 0, t_min = 0, t_max = 0, t_step = 0, r_cap = 0, b_max = 0, phi_floor = 0,
           lambda_floor = 0, smooth_penalty = 0;
    bool smooth = false;

    app.add_option("--config", config_path, "JSON file with solver settings")->envname("PTINV_CONFIG");
    app.add_option("--potential", rc.potential, "expression in x, or table:<path>[:linear|:cubic|:spline]")
        ->envname("PTINV_POTENTIAL");
    app.add_option("--g", rc.g, "positive function g for the weighted form (classify)")->envname("PTINV_G");
    auto* o_b = app.add_option("--b", b, "initial truncation radius")->envname("PTINV_B");
    auto* o_h = app.add_option("--h", h, "integration step")->envname("PTINV_H");
    auto* o_tmin = app.add_option("--t-min", t_min, "first interaction position")->envname("PTINV_T_MIN");
    auto* o_tmax = app.add_option("--t-max", t_max, "last interaction position")->envname("PTINV_T_MAX");
    auto* o_tstep = app.add_option("--t-step", t_step, "spacing of interaction positions")->envname("PTINV_T_STEP");
    auto* o_rl = app.add_option("--r-ladder", r_ladder, "decreasing coupling constants, comma separated")
                     ->envname("PTINV_R_LADDER");
    auto* o_tol = app.add_option("--eig-tol", eig_tol, "eigenvalue tolerance")->envname("PTINV_EIG_TOL");
    auto* o_cap = app.add_option("--r-cap", r_cap, "largest admissible coupling (default: automatic)")
                      ->envname("PTINV_R_CAP");
    auto* o_bmax = app.add_option("--b-max", b_max, "cap on the escalated truncation radius")->envname("PTINV_B_MAX");
    auto* o_pf = app.add_option("--phi-floor", phi_floor, "window floor relative to max phi0")
                     ->envname("PTINV_PHI_FLOOR");
    auto* o_lf = app.add_option("--lambda-floor", lambda_floor, "lower bracket for eigenvalue searches")
                     ->envname("PTINV_LAMBDA_FLOOR");
    auto* o_sm = app.add_flag("--smooth", smooth, "penalized smoothing of phi0 before differencing")
                     ->envname("PTINV_SMOOTH");
    auto* o_sp = app.add_option("--smooth-penalty", smooth_penalty, "roughness weight of the smoother")
                     ->envname("PTINV_SMOOTH_PENALTY");
    app.add_option("--workers", rc.workers, "worker threads for sampling")->envname("PTINV_WORKERS");
    app.add_option("--out", rc.out, "output directory")->envname("PTINV_OUT");
    app.add_option("--table", rc.table, "sample table CSV for invert")->envname("PTINV_TABLE");
    app.add_option("--result", rc.result, "result CSV for plotdata")->envname("PTINV_RESULT");

    for (const char* name : {"classify", "eigen", "sample", "invert", "roundtrip", "plotdata"})
        app.add_subcommand(name)->fallthrough();
    app.get_subcommand("classify")->description("report the hypothesis class of a potential");
    app.get_subcommand("eigen")->description("first eigenvalue and eigenfunction");
    app.get_subcommand("sample")->description("tabulate lambda(t, r) on the configured grid");
    app.get_subcommand("invert")->description("reconstruct q from a sample table");
    app.get_subcommand("roundtrip")->description("sample, reconstruct and compare with the known q");
    app.get_subcommand("plotdata")->description("long-format series,x,y rows for a result file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }
    rc.command = app.get_subcommands().front()->get_name();

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError(fmt::format("cannot open config '{}'", config_path));
            const auto j = nlohmann::json::parse(in);
            from_json(j, rc.solver);
            if (j.contains("potential") && rc.potential.empty()) rc.potential = j["potential"].get<std::string>();
            if (j.contains("workers") && !app.get_option("--workers")->count()) rc.workers = j["workers"].get<unsigned>();
        }
        SolverConfig& s = rc.solver;
        if (o_b->count()) s.b = b;
        if (o_h->count()) s.h = h;
        if (o_tol->count()) s.eig_tol = eig_tol;
        if (o_cap->count()) s.r_cap = r_cap;
        if (o_bmax->count()) s.b_max = b_max;
        if (o_pf->count()) s.phi_floor_rel = phi_floor;
        if (o_lf->count()) s.lambda_floor = lambda_floor;
        if (o_sm->count()) s.smooth = smooth;
        if (o_sp->count()) s.smooth_penalty = smooth_penalty;
        if (o_rl->count()) s.r_ladder = parse_list(r_ladder);
        if (o_tmin->count() || o_tmax->count() || o_tstep->count()) {
            const double lo = o_tmin->count() ? t_min : (s.t_grid.empty() ? 0.1 : s.t_grid.front());
            const double hi = o_tmax->count() ? t_max : (s.t_grid.empty() ? 3.5 : s.t_grid.back());
            const double st = o_tstep->count() ? t_step
                              : s.t_grid.size() >= 2 ? (s.t_grid.back() - s.t_grid.front()) / (s.t_grid.size() - 1)
                                                     : 0.05;
            s.t_grid = SolverConfig::uniform_grid(lo, hi, st);
        }
        s.validate();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        err << "error: config: " << e.what() << '\n';
        return 2;
    }
    return run_command(rc, out, err);
}

}  // namespace ptinv
