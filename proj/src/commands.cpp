#include "ptcav/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <thread>

#include "ptcav/dynamics.hpp"
#include "ptcav/io.hpp"
#include "ptcav/linear_transfer.hpp"
#include "ptcav/parallel.hpp"
#include "ptcav/steady_state.hpp"

namespace ptcav {

using nlohmann::json;

namespace {

void echo_config(CsvWriter& csv, const RunConfig& cfg) {
    std::istringstream lines(format_config(cfg));
    for (std::string line; std::getline(lines, line);)
        csv.comment(line);
}

std::string one_line(std::string text) {
    for (char& c : text)
        if (c == '\n' || c == '\r')
            c = ' ';
    return text;
}

void warn(CsvWriter& csv, std::ostream& log, const std::string& detail) {
    csv.comment("warning: " + detail);
    log << "warning " << one_line(detail) << '\n';
}

double relative_delta(double a, double b, double floor = 0) {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

json state_block(const AnalyticSteadyState<double>& s, const Params& p) {
    const double detuning = s.detunings.empty() ? 0.0 : s.detunings.front();
    json b;
    b["source"] = std::string(to_string(s.source));
    b["status"] = "ok";
    b["n1"] = s.n1;
    b["n2"] = s.n2;
    b["g_sat"] = s.g_sat;
    b["f_sat"] = s.f_sat;
    b["net_gain"] = s.net_gain;
    b["net_loss"] = s.net_loss;
    b["detuning"] = std::abs(detuning);
    b["phase"] = s.phase;
    b["rho"] = s.rho;
    b["eta"] = s.eta;
    b["regime"] = std::string(to_string(s.regime));
    b["stationarity_residual"] = stationarity_residual(s.amplitudes(), detuning, p);
    return b;
}

json report_json(const SteadyStateReport& r) {
    json j;
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    j["g_sat"] = r.g_sat;
    j["f_sat"] = r.f_sat;
    j["detuning"] = r.detuning;
    j["regime"] = r.regime ? std::string(to_string(*r.regime)) : std::string("undefined");
    j["eta"] = r.eta;
    j["residual"] = r.residual;
    j["branch_sign"] = r.branch_sign;
    j["drift"] = r.drift;
    j["tolerance"] = r.tolerance;
    return j;
}

// Rates below the rotation resolution of the rate scale count as zero.
json compare(const json& a, const json& b, const Params& p) {
    static const char* fields[] = {"n1", "n2", "g_sat", "f_sat", "detuning", "eta"};
    const double rate_floor = kRotationFloor * rate_scale(p);
    json c;
    c["a"] = a["source"];
    c["b"] = b["source"];
    double max_abs = 0, max_rel = 0;
    for (const char* f : fields) {
        const double x = a[f].get<double>();
        const double y = b[f].get<double>();
        const double abs_delta = std::abs(x - y);
        const bool is_rate = std::string_view(f) != "n1" && std::string_view(f) != "n2" &&
                             std::string_view(f) != "eta";
        const double rel_delta = relative_delta(x, y, is_rate ? rate_floor : 0.0);
        c["fields"][f] = {{"abs", abs_delta}, {"rel", rel_delta}};
        max_abs = std::max(max_abs, abs_delta);
        max_rel = std::max(max_rel, rel_delta);
    }
    c["max_abs_delta"] = max_abs;
    c["max_rel_delta"] = max_rel;
    return c;
}

} // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return exit_code::parse;
    case ErrorKind::Parameter:
    case ErrorKind::Domain:
    case ErrorKind::Unsupported:
    case ErrorKind::Singularity: return exit_code::parameter;
    case ErrorKind::NotConverged:
    case ErrorKind::Numeric:
    case ErrorKind::InsufficientData: return exit_code::not_converged;
    case ErrorKind::Divergence: return exit_code::divergence;
    }
    return exit_code::failure;
}

std::string error_record(ErrorKind kind, const std::string& detail) {
    return "error kind=" + std::string(to_string(kind)) + " detail=" + one_line(detail);
}

unsigned sweep_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PTCAV_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            return std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

double conventional_reference_coupling(const Params& p) {
    return p.g0 > p.f0 ? critical_coupling(p) : 2 * p.gamma0;
}

CouplingGrid coupling_grid(const RunConfig& cfg, double kappa_c) {
    CouplingGrid g;
    g.kappa_c = kappa_c;
    g.kappa = grid_values(cfg.grid);
    if (cfg.grid.scale == GridScale::KappaCRelative)
        for (double& k : g.kappa)
            k *= kappa_c;
    return g;
}

void write_conventional_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const CouplingGrid grid = coupling_grid(cfg, conventional_reference_coupling(cfg.params));
    std::vector<TransferPoint<double>> rows(grid.kappa.size());
    detail::require_increasing(std::span<const double>(grid.kappa));
    parallel_for(rows.size(), sweep_threads(), [&](std::size_t k) {
        Params q = cfg.params;
        q.kappa = grid.kappa[k];
        rows[k] = evaluate_transfer(cfg.omega_drive, q);
    });

    CsvWriter csv(out);
    echo_config(csv, cfg);
    csv.header({"kappa_over_kappac", "omega", "efficiency", "re_T", "im_T", "re_R", "im_R"});
    for (const auto& r : rows) {
        if (r.singular) {
            warn(csv, log, "skipped singular point kappa=" + format_number(r.kappa) + ": " + *r.singular);
            continue;
        }
        csv.row({format_number(r.kappa / grid.kappa_c), format_number(r.omega),
                 format_number(r.efficiency), format_number(r.t.real()), format_number(r.t.imag()),
                 format_number(r.r.real()), format_number(r.r.imag())});
    }
}

void write_pt_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    require_lasing(cfg.params);
    const CouplingGrid grid = coupling_grid(cfg, critical_coupling(cfg.params));
    detail::require_increasing(std::span<const double>(grid.kappa));

    struct Row {
        Regime regime;
        double eta = 0;
        double self_consistent_eta = 0;
    };
    std::vector<Row> rows(grid.kappa.size());
    parallel_for(rows.size(), sweep_threads(), [&](std::size_t k) {
        Params q = cfg.params;
        q.kappa = grid.kappa[k];
        Row& row = rows[k];
        row.regime = classify_regime(q, cfg.ep_tol);
        if (row.regime == Regime::ExceptionalPoint)
            return;
        const bool pt = row.regime == Regime::PTSymmetric;
        row.eta = pt ? efficiency_pt(q) : pt_broken_branch(q).eta;
        const auto solved = self_consistent_solve(q, pt ? SolveMode::Rotating : SolveMode::Stationary,
                                                  cfg.solver_tol);
        row.self_consistent_eta =
            solved.solved() ? solved.state.eta : std::numeric_limits<double>::quiet_NaN();
    });

    CsvWriter csv(out);
    echo_config(csv, cfg);
    csv.header({"kappa_over_kappac", "kappa", "regime", "eta", "self_consistent_eta"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Row& r = rows[k];
        if (r.regime == Regime::ExceptionalPoint) {
            warn(csv, log, "skipped exceptional point kappa=" + format_number(grid.kappa[k]));
            continue;
        }
        csv.row({format_number(grid.kappa[k] / grid.kappa_c), format_number(grid.kappa[k]),
                 std::string(to_string(r.regime)), format_number(r.eta),
                 format_number(r.self_consistent_eta)});
    }
}

void write_bifurcation(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_lasing(cfg.params);
    const CouplingGrid grid = coupling_grid(cfg, critical_coupling(cfg.params));
    detail::require_increasing(std::span<const double>(grid.kappa));
    std::vector<BifurcationRow<double>> rows(grid.kappa.size());
    parallel_for(rows.size(), sweep_threads(), [&](std::size_t k) {
        rows[k] = bifurcation_sweep(cfg.params, std::span<const double>(&grid.kappa[k], 1), cfg.ep_tol)
                      .front();
    });

    CsvWriter csv(out);
    echo_config(csv, cfg);
    csv.comment("g_sat and f_sat are net rates: g_sat - gamma0 and gamma0 + f_sat");
    csv.header({"kappa_over_kappac", "detuning_plus", "detuning_minus", "g_sat", "f_sat", "regime", "eta"});
    for (const auto& r : rows)
        csv.row({format_number(r.kappa_over_kappac), format_number(r.detuning_plus),
                 format_number(r.detuning_minus), format_number(r.net_gain),
                 format_number(r.net_loss), std::string(to_string(r.regime)), format_number(r.eta)});
}

void write_dynamics(const RunConfig& cfg, std::ostream& out, std::ostream& report) {
    const auto traj = integrate(cfg.initial, cfg.params, cfg.integrator);
    CsvWriter csv(out);
    echo_config(csv, cfg);
    csv.header({"t", "n1", "n2", "re_a1", "im_a1", "re_a2", "im_a2"});
    for (const auto& s : traj.samples)
        csv.row({format_number(s.t), format_number(s.n1()), format_number(s.n2()),
                 format_number(s.alpha1().real()), format_number(s.alpha1().imag()),
                 format_number(s.alpha2().real()), format_number(s.alpha2().imag())});
    try {
        const auto r = detect_steady_state(traj, cfg.params, cfg.steady_tol, cfg.window(), cfg.ep_tol);
        json j = report_json(r);
        j["status"] = "converged";
        report << j.dump(2) << '\n';
    } catch (const NotConvergedError& e) {
        json j;
        j["status"] = "not_converged";
        j["drift"] = e.drift();
        j["tolerance"] = cfg.steady_tol;
        report << j.dump(2) << '\n';
        throw;
    }
}

json verify_report(const RunConfig& cfg) {
    const Params& p = cfg.params;
    json report;
    report["config"] = format_config(cfg);
    std::optional<Regime> regime;
    if (p.g0 > p.f0) {
        regime = classify_regime(p, cfg.ep_tol);
        report["kappa_c"] = critical_coupling(p);
        report["regime"] = std::string(to_string(*regime));
        report["continuity_gap"] = continuity_gap(p);
    } else {
        report["regime"] = "undefined";
    }

    json blocks = json::array();
    std::optional<json> closed, solved_block, ode;

    if (regime == Regime::PTSymmetric || regime == Regime::PTBroken) {
        try {
            closed = state_block(regime == Regime::PTSymmetric ? pt_symmetric_branch(p) : pt_broken_branch(p), p);
        } catch (const Error& e) {
            closed = json{{"source", regime == Regime::PTSymmetric ? "closed_form_pt" : "closed_form_broken"},
                          {"status", "unavailable"},
                          {"detail", e.what()}};
        }
        blocks.push_back(*closed);
    }

    if (p.g0 > p.f0) {
        const SolveMode mode = regime == Regime::PTSymmetric ? SolveMode::Rotating : SolveMode::Stationary;
        try {
            const auto s = self_consistent_solve(p, mode, cfg.solver_tol);
            if (s.solved()) {
                solved_block = state_block(s.state, p);
                (*solved_block)["solver_residual"] = s.residual;
                (*solved_block)["iterations"] = s.iterations;
            } else {
                solved_block = json{{"source", "self_consistent"}, {"status", "no_solution"}, {"detail", s.detail}};
            }
        } catch (const Error& e) {
            solved_block = json{{"source", "self_consistent"}, {"status", "error"}, {"detail", e.what()}};
        }
        (*solved_block)["mode"] = std::string(to_string(mode));
        blocks.push_back(*solved_block);
    }

    try {
        const auto traj = integrate(cfg.initial, p, cfg.integrator);
        const auto r = detect_steady_state(traj, p, cfg.steady_tol, cfg.window(), cfg.ep_tol);
        ode = report_json(r);
        (*ode)["source"] = "ode";
        (*ode)["status"] = "converged";
    } catch (const NotConvergedError& e) {
        ode = json{{"source", "ode"}, {"status", "not_converged"}, {"drift", e.drift()}, {"detail", e.what()}};
    } catch (const Error& e) {
        ode = json{{"source", "ode"}, {"status", std::string(to_string(e.kind()))}, {"detail", e.what()}};
    }
    blocks.push_back(*ode);
    report["blocks"] = blocks;

    const auto usable = [](const std::optional<json>& b) {
        return b && b->contains("n1");
    };
    json comparisons = json::array();
    if (usable(solved_block) && usable(closed))
        comparisons.push_back(compare(*solved_block, *closed, p));
    if (usable(ode) && usable(solved_block))
        comparisons.push_back(compare(*ode, *solved_block, p));
    if (usable(ode) && usable(closed))
        comparisons.push_back(compare(*ode, *closed, p));
    report["comparisons"] = comparisons;
    return report;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* target = &out;
    if (cfg.output_path != "-") {
        file.open(cfg.output_path, std::ios::binary);
        if (!file) {
            err << "error kind=io detail=cannot open " << cfg.output_path << '\n';
            return exit_code::failure;
        }
        target = &file;
    }
    try {
        switch (cfg.command) {
        case Command::ConventionalSweep:
            write_conventional_sweep(cfg, *target, err);
            break;
        case Command::PtSweep:
            write_pt_sweep(cfg, *target, err);
            break;
        case Command::Bifurcation:
            write_bifurcation(cfg, *target, err);
            break;
        case Command::Dynamics: {
            std::ofstream report_file;
            std::ostringstream inline_report;
            std::ostream* report = &inline_report;
            if (cfg.output_path != "-") {
                report_file.open(cfg.output_path + ".report.json", std::ios::binary);
                report = &report_file;
            }
            try {
                write_dynamics(cfg, *target, *report);
            } catch (...) {
                if (cfg.output_path == "-")
                    *target << "# report " << json::parse(inline_report.str()).dump() << '\n';
                throw;
            }
            if (cfg.output_path == "-")
                *target << "# report " << json::parse(inline_report.str()).dump() << '\n';
            break;
        }
        case Command::Verify:
            *target << verify_report(cfg).dump(2) << '\n';
            break;
        }
    } catch (const Error& e) {
        err << error_record(e.kind(), e.what()) << '\n';
        return exit_code_for(e.kind());
    }
    return exit_code::ok;
}

} // namespace ptcav
