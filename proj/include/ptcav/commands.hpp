#pragma once

// Dispatch of the analysis commands and their dataset writers.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptcav/config.hpp"
#include "ptcav/errors.hpp"

namespace ptcav {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int parse = 2;
inline constexpr int parameter = 3;
inline constexpr int not_converged = 4;
inline constexpr int divergence = 5;
} // namespace exit_code

int exit_code_for(ErrorKind kind);

/// Single-line record `error kind=<code> detail=<text>`.
std::string error_record(ErrorKind kind, const std::string& detail);

/// Worker cap from PTCAV_THREADS (default: hardware concurrency).
unsigned sweep_threads();

/// Coupling values of the configured grid together with the kappa_c used to
/// scale them.
struct CouplingGrid {
    std::vector<double> kappa;
    double kappa_c = 0;
};

CouplingGrid coupling_grid(const RunConfig& cfg, double kappa_c);

/// kappa_c for axis scaling of the driven scheme: critical_coupling when
/// g0 > f0, else 2 gamma0.
double conventional_reference_coupling(const Params& p);

void write_conventional_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void write_pt_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void write_bifurcation(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Writes the trajectory CSV to `out` and the steady-state report JSON to
/// `report`. Throws NotConvergedError after writing both when the window has
/// not settled.
void write_dynamics(const RunConfig& cfg, std::ostream& out, std::ostream& report);

nlohmann::json verify_report(const RunConfig& cfg);

/// Runs the configured command, writing to cfg.output_path ("-" = `out`).
/// Errors are printed to `err` as error records; returns the exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace ptcav
