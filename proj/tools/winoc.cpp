// winoc: channel-gain calculator for multi-layer wireless network-on-chip
// stacks.  Subcommands compute the boundary-less / boundary-constrained /
// approximated channel models, parameter sweeps, loop-count complexity
// reports, and an exhaustive-oracle self-check.  All outputs are
// deterministic CSV/TSV; exit codes: 0 success, 1 invalid configuration,
// 2 computation failure, 3 oracle mismatch.

#include "winoc/complexity.hpp"
#include "winoc/config.hpp"
#include "winoc/counting.hpp"
#include "winoc/csv.hpp"
#include "winoc/errors.hpp"
#include "winoc/gain.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"
#include "winoc/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace winoc;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string format;
    int r = 0;
    int q = -1;
    double theta_bound = 0.0;
    int threads = 1;
    bool r_set = false, q_set = false, theta_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (sectioned key = value)")
        ->required();
    cmd->add_option("--out", args.out_path, "output file (default: [output] path, else stdout)");
    cmd->add_option("--format", args.format, "output format: csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
    cmd->add_option("--r", args.r, "override geometry.r (angle sample count)");
    cmd->add_option("--q", args.q, "override solver.q (extra bounce pairs in the angle bound)");
    cmd->add_option("--theta-bound", args.theta_bound,
                    "override the launch-angle bound [rad] instead of solving for it");
    cmd->add_option("--threads", args.threads, "worker threads for angle evaluation (default 1)");
}

RunConfig load_with_overrides(const CLI::App* cmd, CommonArgs& args) {
    RunConfig cfg = load_config(args.config_path);
    if (cmd->count("--r")) {
        cfg.geometry.r = args.r;
        validate(cfg.geometry);
    }
    if (cmd->count("--q"))
        cfg.solve.q = args.q;
    if (cmd->count("--theta-bound"))
        cfg.solve.theta_bound = args.theta_bound;
    if (cfg.solve.q < 0)
        throw invalid_config("solver.q: must be an integer >= 0");
    if (cfg.solve.theta_bound && !(*cfg.solve.theta_bound > 0 && *cfg.solve.theta_bound < M_PI / 2))
        throw invalid_config("solver.theta_bound: must lie in (0, pi/2)");
    if (!args.out_path.empty())
        cfg.output.path = args.out_path;
    if (!args.format.empty())
        cfg.output.format = args.format == "tsv" ? OutputFormat::tsv : OutputFormat::csv;
    if (args.threads < 1)
        throw invalid_config("threads: must be >= 1");
    return cfg;
}

void write_table(const Table& table, const OutputSpec& out) {
    if (out.path.empty()) {
        table.write(std::cout, out.format);
        return;
    }
    std::ofstream file(out.path, std::ios::binary);
    if (!file)
        throw computation_error(out.path + ": cannot open output file");
    table.write(file, out.format);
    file.flush();
    if (!file)
        throw computation_error(out.path + ": write failed");
}

std::string opt_int_cell(const std::optional<int>& v) {
    return v ? csv_int(*v) : std::string();
}

EvalOptions eval_options(const RunConfig& cfg, const CommonArgs& args) {
    EvalOptions opt;
    opt.solve = cfg.solve;
    opt.threads = args.threads;
    return opt;
}

// --- gain -------------------------------------------------------------------

int cmd_gain(const RunConfig& cfg, const CommonArgs& args) {
    const bool bounded = cfg.geometry.J_bound.has_value();
    const ChannelResult res = total_gain(cfg.geometry, cfg.stack, bounded, eval_options(cfg, args));
    Table table({"model", "J", "J_bound", "r", "q", "theta_bound", "h_linear", "h_db",
                 "loops_executed"});
    table.add_row({bounded ? "boundary-constrained" : "boundary-less", csv_int(cfg.geometry.J),
                   opt_int_cell(cfg.geometry.J_bound), csv_int(cfg.geometry.r),
                   csv_int(cfg.solve.q), csv_double(res.theta_bound), csv_double(res.h_linear),
                   csv_double(res.h_db), csv_bigint(res.loops_executed)});
    write_table(table, cfg.output);
    return 0;
}

// --- compare-models ---------------------------------------------------------

int cmd_compare(const RunConfig& cfg, const CommonArgs& args) {
    if (!cfg.geometry.J_bound)
        throw invalid_config("geometry.J_bound: required for compare-models");
    const EvalOptions opt = eval_options(cfg, args);
    const ChannelResult bl = total_gain(cfg.geometry, cfg.stack, false, opt);
    const ChannelResult bc = total_gain(cfg.geometry, cfg.stack, true, opt);
    const double diff = bl.h_linear - bc.h_linear;
    Table table({"J", "J_bound", "r", "theta_bound", "h_bl_linear", "h_bc_linear", "h_bl_db",
                 "h_bc_db", "difference_linear", "relative_difference", "loops_bl", "loops_bc"});
    table.add_row({csv_int(cfg.geometry.J), opt_int_cell(cfg.geometry.J_bound),
                   csv_int(cfg.geometry.r), csv_double(bl.theta_bound),
                   csv_double(bl.h_linear), csv_double(bc.h_linear), csv_double(bl.h_db),
                   csv_double(bc.h_db), csv_double(diff), csv_double(diff / bl.h_linear),
                   csv_bigint(bl.loops_executed), csv_bigint(bc.loops_executed)});
    write_table(table, cfg.output);
    return 0;
}

// --- approx-error -----------------------------------------------------------

int cmd_approx_error(const RunConfig& cfg, const CommonArgs& args) {
    const EvalOptions opt = eval_options(cfg, args);
    const ChannelResult full = total_gain(cfg.geometry, cfg.stack, false, opt);
    const ChannelResult approx = approx_total_gain(cfg.geometry, cfg.stack, cfg.approx, opt);
    double theta_t = 0.0;
    if (cfg.approx.use_coherence_cutoff)
        theta_t = theta_threshold(cfg.geometry, cfg.stack, cfg.approx, std::nullopt, cfg.solve)
                      .theta_t;
    const double gap_db = full.h_db - approx.h_db;
    Table table({"J", "r", "theta_bound", "theta_t", "h_full_linear", "h_approx_linear",
                 "h_full_db", "h_approx_db", "gap_db", "relative_error", "loops_full",
                 "loops_approx"});
    table.add_row({csv_int(cfg.geometry.J), csv_int(cfg.geometry.r), csv_double(full.theta_bound),
                   csv_double(theta_t), csv_double(full.h_linear), csv_double(approx.h_linear),
                   csv_double(full.h_db), csv_double(approx.h_db), csv_double(gap_db),
                   csv_double((full.h_linear - approx.h_linear) / full.h_linear),
                   csv_bigint(full.loops_executed), csv_bigint(approx.loops_executed)});
    write_table(table, cfg.output);
    return 0;
}

// --- sweep ------------------------------------------------------------------

RunConfig apply_sweep_value(const RunConfig& base, SweepVariable axis, double value) {
    RunConfig cfg = base;
    switch (axis) {
    case SweepVariable::J: cfg.geometry.J = static_cast<int>(value); break;
    case SweepVariable::d: cfg.geometry.d = value; break;
    case SweepVariable::J_bound: cfg.geometry.J_bound = static_cast<int>(value); break;
    case SweepVariable::r: cfg.geometry.r = static_cast<int>(value); break;
    }
    validate(cfg.geometry);
    return cfg;
}

int cmd_sweep(const RunConfig& cfg, const CommonArgs& args) {
    if (!cfg.sweep)
        throw invalid_config("sweep: section required for the sweep command");
    Table table({"variable", "value", "J", "J_bound", "r", "theta_bound", "h_bl_linear",
                 "h_bc_linear", "h_approx_linear", "h_bl_db", "h_bc_db", "h_approx_db",
                 "loops_bl", "loops_bc", "loops_approx"});
    for (double value : cfg.sweep->values) {
        const RunConfig point = apply_sweep_value(cfg, cfg.sweep->variable, value);
        if (!point.geometry.J_bound)
            throw invalid_config("geometry.J_bound: required for the sweep command");
        const EvalOptions opt = eval_options(point, args);
        const ChannelResult bl = total_gain(point.geometry, point.stack, false, opt);
        const ChannelResult bc = total_gain(point.geometry, point.stack, true, opt);
        const ChannelResult ap = approx_total_gain(point.geometry, point.stack, point.approx, opt);
        table.add_row({sweep_variable_name(cfg.sweep->variable), csv_double(value),
                       csv_int(point.geometry.J), opt_int_cell(point.geometry.J_bound),
                       csv_int(point.geometry.r), csv_double(bl.theta_bound),
                       csv_double(bl.h_linear), csv_double(bc.h_linear), csv_double(ap.h_linear),
                       csv_double(bl.h_db), csv_double(bc.h_db), csv_double(ap.h_db),
                       csv_bigint(bl.loops_executed), csv_bigint(bc.loops_executed),
                       csv_bigint(ap.loops_executed)});
    }
    write_table(table, cfg.output);
    return 0;
}

// --- complexity -------------------------------------------------------------

int cmd_complexity(const RunConfig& cfg, const CommonArgs&) {
    if (!cfg.geometry.J_bound)
        throw invalid_config("geometry.J_bound: required for the complexity command");
    const ComplexityReport rep = complexity_report(cfg.geometry, cfg.stack, cfg.solve);
    Table table({"theta", "alpha", "beta", "term", "loop_bl", "loop_bc",
                 "empirical_difference", "predicted_difference", "negative_bc_terms"});
    for (const auto& a : rep.per_angle)
        table.add_row({csv_double(a.theta), csv_int(a.alpha), csv_int(a.beta),
                       csv_double(a.term), csv_bigint(rep.loop_bl), csv_bigint(rep.loop_bc),
                       csv_bigint(rep.empirical_difference),
                       csv_double(rep.predicted_difference),
                       rep.negative_bc_terms ? "true" : "false"});
    write_table(table, cfg.output);
    return 0;
}

// --- oracle-check -----------------------------------------------------------

struct OracleCheckArgs {
    int n_max = 9;
    long m_max = 6;
    int angles = 5;
    int j_max = 3;
    int j_bound_max = 3;
};

int cmd_oracle_check(const RunConfig& cfg, const CommonArgs&, const OracleCheckArgs& oc) {
    OracleCaps caps{oc.n_max, oc.m_max};
    validate(caps);
    if (oc.angles < 1 || oc.j_max < 1 || oc.j_bound_max < 0)
        throw invalid_config("oracle-check: angles and j-max must be >= 1, j-bound-max >= 0");

    Table table({"J", "model", "J_bound", "theta", "classes_checked", "mismatches"});
    long long total_mismatches = 0;
    bool first_reported = false;

    for (int J = 1; J <= oc.j_max; ++J) {
        Geometry geom = cfg.geometry;
        geom.J = J;
        const double theta_bound = resolve_theta_bound(geom, cfg.stack, cfg.solve);
        for (int ai = 1; ai <= oc.angles; ++ai) {
            const double theta = theta_bound * ai / oc.angles;
            const AngleSample sample = angle_sample(cfg.stack, theta);
            // modes: boundary-less, then J_bound = 0..j_bound_max
            for (int mode = -1; mode <= oc.j_bound_max; ++mode) {
                const bool bounded = mode >= 0;
                Geometry gm = geom;
                if (bounded)
                    gm.J_bound = mode;
                const OracleReport oracle = enumerate_paths(theta, gm, cfg.stack, caps, bounded);
                long long checked = 0, mismatches = 0;
                for (int n = 0; n <= caps.n_max; ++n)
                    for (long m = 0; m <= caps.m_max; ++m) {
                        bigint expected = 0;
                        if (n >= J && (n - J) % 2 == 0) {
                            const double x = displacement(sample, n, static_cast<double>(m));
                            if (x >= gm.d && x <= gm.d + gm.L)
                                expected = effective_count({n, m}, sample, gm, bounded).effective;
                        }
                        const bigint& got = oracle.count_at(n, m);
                        ++checked;
                        if (got != expected) {
                            ++mismatches;
                            ++total_mismatches;
                            if (!first_reported) {
                                first_reported = true;
                                std::cerr << "oracle-check: mismatch at theta=" << csv_double(theta)
                                          << " n=" << n << " m=" << m << " J=" << J << " J_bound="
                                          << (bounded ? std::to_string(mode) : "none")
                                          << " oracle=" << got.str()
                                          << " counting=" << expected.str() << "\n";
                            }
                        }
                    }
                table.add_row({csv_int(J), bounded ? "boundary-constrained" : "boundary-less",
                               bounded ? csv_int(mode) : std::string(), csv_double(theta),
                               csv_int(checked), csv_int(mismatches)});
            }
        }
    }
    write_table(table, cfg.output);
    if (total_mismatches > 0) {
        std::cerr << "oracle-check: " << total_mismatches << " mismatching classes\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"winoc: wireless network-on-chip channel-gain calculator"};
    app.require_subcommand(1);

    CommonArgs args;
    OracleCheckArgs oracle_args;

    CLI::App* pgain = app.add_subcommand(
        "gain", "Total channel gain of the configured model (boundary-constrained when\n"
                "geometry.J_bound is set, boundary-less otherwise).\n"
                "CSV columns: model, J, J_bound, r, q, theta_bound, h_linear, h_db, "
                "loops_executed");
    CLI::App* pcompare = app.add_subcommand(
        "compare-models", "Boundary-less vs boundary-constrained gain on one config.\n"
                          "CSV columns: J, J_bound, r, theta_bound, h_bl_linear, h_bc_linear, "
                          "h_bl_db, h_bc_db,\ndifference_linear, relative_difference, loops_bl, "
                          "loops_bc");
    CLI::App* papprox = app.add_subcommand(
        "approx-error", "Full (boundary-less) vs approximated gain.\n"
                        "CSV columns: J, r, theta_bound, theta_t, h_full_linear, h_approx_linear, "
                        "h_full_db,\nh_approx_db, gap_db, relative_error, loops_full, "
                        "loops_approx");
    CLI::App* psweep = app.add_subcommand(
        "sweep", "Evaluate all three models along the [sweep] axis of the config.\n"
                 "CSV columns: variable, value, J, J_bound, r, theta_bound, h_bl_linear, "
                 "h_bc_linear,\nh_approx_linear, h_bl_db, h_bc_db, h_approx_db, loops_bl, "
                 "loops_bc, loops_approx");
    CLI::App* pcomplexity = app.add_subcommand(
        "complexity", "Loop-count accounting for both full models (one row per angle; totals\n"
                      "repeat on every row).\n"
                      "CSV columns: theta, alpha, beta, term, loop_bl, loop_bc, "
                      "empirical_difference,\npredicted_difference, negative_bc_terms");
    CLI::App* poracle = app.add_subcommand(
        "oracle-check", "Exhaustive-enumeration cross-check of the counting module; exits 3 on\n"
                        "any mismatch.\n"
                        "CSV columns: J, model, J_bound, theta, classes_checked, mismatches");

    for (CLI::App* sub : {pgain, pcompare, papprox, psweep, pcomplexity, poracle})
        add_common(sub, args);
    poracle->add_option("--n-max", oracle_args.n_max, "oracle cap on refraction steps (default 9)");
    poracle->add_option("--m-max", oracle_args.m_max, "oracle cap on reflection steps (default 6)");
    poracle->add_option("--angles", oracle_args.angles, "angle samples per J (default 5)");
    poracle->add_option("--j-max", oracle_args.j_max, "check J = 1..j-max (default 3)");
    poracle->add_option("--j-bound-max", oracle_args.j_bound_max,
                        "check J_bound = 0..j-bound-max plus boundary-less (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e); // 0 for --help, nonzero otherwise
    }

    try {
        if (pgain->parsed())
            return cmd_gain(load_with_overrides(pgain, args), args);
        if (pcompare->parsed())
            return cmd_compare(load_with_overrides(pcompare, args), args);
        if (papprox->parsed())
            return cmd_approx_error(load_with_overrides(papprox, args), args);
        if (psweep->parsed())
            return cmd_sweep(load_with_overrides(psweep, args), args);
        if (pcomplexity->parsed())
            return cmd_complexity(load_with_overrides(pcomplexity, args), args);
        if (poracle->parsed())
            return cmd_oracle_check(load_with_overrides(poracle, args), args, oracle_args);
        std::cerr << "winoc: no subcommand selected\n";
        return 1;
    } catch (const invalid_config& e) {
        std::cerr << "winoc: " << e.what() << "\n";
        return 1;
    } catch (const computation_error& e) {
        std::cerr << "winoc: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "winoc: " << e.what() << "\n";
        return 2;
    }
}
