#pragma once

// Run configuration: a line-oriented `key = value` document ('#' comments).

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptcav/dynamics.hpp"
#include "ptcav/model.hpp"

namespace ptcav {

enum class Command { ConventionalSweep, PtSweep, Bifurcation, Dynamics, Verify };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view name);

enum class GridScale { Absolute, KappaCRelative };

struct GridSpec {
    double start = 0.05;
    double stop = 4.0;
    int count = 400;
    GridScale scale = GridScale::KappaCRelative;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Evenly spaced values from start to stop inclusive (a single value when count == 1).
std::vector<double> grid_values(const GridSpec& g);

struct RunConfig {
    Params params;
    Command command = Command::Dynamics;
    GridSpec grid;
    double omega_drive = 1.0;
    ModeState<double> initial = default_initial_state<double>();
    IntegratorSettings integrator;
    double window_fraction = kDefaultWindowFraction;
    double steady_tol = kDefaultSteadyTolerance;
    double solver_tol = 1e-12;
    double ep_tol = kDefaultEpTolerance;
    std::string output_path = "-";

    double window() const { return window_fraction * integrator.t_end; }
};

bool equivalent(const RunConfig& a, const RunConfig& b);

using KeyOverride = std::pair<std::string, std::string>;

/// Parses and resolves a configuration. `overrides` replace (or add) keys of
/// the document before resolution. Unknown keys, duplicates, malformed numbers
/// and missing required keys (command, gamma0) throw ErrorKind::Parse with the
/// offending line or key.
RunConfig parse_config(std::string_view text, const std::vector<KeyOverride>& overrides = {});

/// Splits "key=value" as accepted by `--set`.
KeyOverride parse_override(std::string_view assignment);

/// Fully resolved configuration in absolute units; parse_config of the result
/// yields an equivalent RunConfig.
std::string format_config(const RunConfig& cfg);

} // namespace ptcav
