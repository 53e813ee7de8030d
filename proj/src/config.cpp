#include "ptcav/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "ptcav/io.hpp"

namespace ptcav {

namespace {

struct Entry {
    std::string value;
    int line; // 0 for --set overrides
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "command",  "units",      "omega0",     "gamma0",    "g0",         "f0",
    "kappa",    "kappa_over_kappac",        "gamma1",    "gamma2",     "grid_start",
    "grid_stop", "grid_count", "grid_scale", "omega_drive", "alpha1",   "alpha2",
    "t_end",    "dt",         "stride",     "window",    "steady_tol", "solver_tol",
    "ep_tol",   "output"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string where(const std::string& key, const Entry& e) {
    if (e.line == 0)
        return "--set " + key;
    return "line " + std::to_string(e.line) + " key '" + key + "'";
}

class Document {
public:
    explicit Document(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.contains(key); }

    const Entry& entry(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw Error(ErrorKind::Parse, "missing required key '" + key + "'");
        return it->second;
    }

    std::string text(const std::string& key) const { return entry(key).value; }

    double number(const std::string& key) const {
        const Entry& e = entry(key);
        return parse_double(e.value, key, e);
    }

    std::optional<double> number_or(const std::string& key) const {
        if (!has(key))
            return std::nullopt;
        return number(key);
    }

    int integer(const std::string& key) const {
        const Entry& e = entry(key);
        int v = 0;
        const char* begin = e.value.data();
        const char* end = begin + e.value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end)
            throw Error(ErrorKind::Parse, "malformed integer at " + where(key, e) + ": '" + e.value + "'");
        return v;
    }

    std::complex<double> complex(const std::string& key) const {
        const Entry& e = entry(key);
        const auto comma = e.value.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::Parse,
                        "malformed complex at " + where(key, e) + ": expected 're,im'");
        const std::string re(trim(std::string_view(e.value).substr(0, comma)));
        const std::string im(trim(std::string_view(e.value).substr(comma + 1)));
        return {parse_double(re, key, e), parse_double(im, key, e)};
    }

    static double parse_double(const std::string& s, const std::string& key, const Entry& e) {
        double v = 0;
        const char* begin = s.data();
        const char* end = begin + s.size();
        if (begin != end && *begin == '+')
            ++begin;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end || s.empty())
            throw Error(ErrorKind::Parse, "malformed number at " + where(key, e) + ": '" + s + "'");
        return v;
    }

private:
    std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize(std::string_view text) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!kKnownKeys.contains(key))
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (entries.contains(key))
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        entries[key] = {value, line_no};
    }
    return entries;
}

std::string format_complex(std::complex<double> z) {
    return format_number(z.real()) + "," + format_number(z.imag());
}

} // namespace

std::string_view to_string(Command c) {
    switch (c) {
    case Command::ConventionalSweep: return "conventional-sweep";
    case Command::PtSweep: return "pt-sweep";
    case Command::Bifurcation: return "bifurcation";
    case Command::Dynamics: return "dynamics";
    case Command::Verify: return "verify";
    }
    return "unknown";
}

std::optional<Command> command_from_string(std::string_view name) {
    for (Command c : {Command::ConventionalSweep, Command::PtSweep, Command::Bifurcation,
                      Command::Dynamics, Command::Verify})
        if (to_string(c) == name)
            return c;
    return std::nullopt;
}

std::vector<double> grid_values(const GridSpec& g) {
    std::vector<double> v(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        v[0] = g.start;
        return v;
    }
    const double step = (g.stop - g.start) / (g.count - 1);
    for (int k = 0; k < g.count; ++k)
        v[static_cast<std::size_t>(k)] = g.start + k * step;
    v.back() = g.stop;
    return v;
}

KeyOverride parse_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorKind::Parse, "--set expects key=value, got '" + std::string(assignment) + "'");
    return {std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1)))};
}

RunConfig parse_config(std::string_view text, const std::vector<KeyOverride>& overrides) {
    auto entries = tokenize(text);
    for (const auto& [key, value] : overrides) {
        if (!kKnownKeys.contains(key))
            throw Error(ErrorKind::Parse, "--set: unknown key '" + key + "'");
        entries[key] = {value, 0};
    }
    const Document doc(std::move(entries));

    RunConfig cfg;
    const std::string command = doc.text("command");
    const auto parsed_command = command_from_string(command);
    if (!parsed_command)
        throw Error(ErrorKind::Parse, "unknown command '" + command + "'");
    cfg.command = *parsed_command;

    bool relative = false;
    if (doc.has("units")) {
        const std::string units = doc.text("units");
        if (units == "relative")
            relative = true;
        else if (units != "absolute")
            throw Error(ErrorKind::Parse, "units must be 'absolute' or 'relative', got '" + units + "'");
    }

    Params& p = cfg.params;
    p.omega0 = doc.number_or("omega0").value_or(1.0);
    const double unit = relative ? p.omega0 : 1.0;
    p.gamma0 = doc.number("gamma0") * unit;
    p.g0 = doc.number_or("g0").value_or(0.0) * unit;
    p.f0 = doc.number_or("f0").value_or(0.0) * unit;
    p.gamma1 = doc.number_or("gamma1").value_or(p.gamma0 / unit) * unit;
    p.gamma2 = doc.number_or("gamma2").value_or(p.gamma0 / unit) * unit;
    if (doc.has("kappa") && doc.has("kappa_over_kappac"))
        throw Error(ErrorKind::Parse, "give either 'kappa' or 'kappa_over_kappac', not both");
    if (doc.has("kappa_over_kappac"))
        p.kappa = doc.number("kappa_over_kappac") * critical_coupling(p);
    else
        p.kappa = doc.number_or("kappa").value_or(0.0) * unit;
    validate(p);

    GridSpec& g = cfg.grid;
    if (doc.has("grid_scale")) {
        const std::string scale = doc.text("grid_scale");
        if (scale == "absolute")
            g.scale = GridScale::Absolute;
        else if (scale == "kappa_c")
            g.scale = GridScale::KappaCRelative;
        else
            throw Error(ErrorKind::Parse, "grid_scale must be 'absolute' or 'kappa_c', got '" + scale + "'");
    }
    const double grid_unit = g.scale == GridScale::Absolute ? unit : 1.0;
    g.start = doc.number_or("grid_start").value_or(g.start / grid_unit) * grid_unit;
    g.stop = doc.number_or("grid_stop").value_or(g.stop / grid_unit) * grid_unit;
    if (doc.has("grid_count"))
        g.count = doc.integer("grid_count");
    if (g.count < 1 || !(g.stop >= g.start) || (g.count > 1 && !(g.stop > g.start)))
        throw Error(ErrorKind::Parse, "grid needs grid_count >= 1 and grid_stop > grid_start");

    cfg.omega_drive = doc.number_or("omega_drive").value_or(p.omega0 / unit) * unit;

    if (doc.has("alpha1"))
        cfg.initial.alpha(0) = doc.complex("alpha1");
    if (doc.has("alpha2"))
        cfg.initial.alpha(1) = doc.complex("alpha2");

    cfg.integrator = default_integrator(p);
    if (doc.has("t_end"))
        cfg.integrator.t_end = doc.number("t_end") / unit;
    if (doc.has("dt"))
        cfg.integrator.dt = doc.number("dt") / unit;
    if (doc.has("t_end") || doc.has("dt")) {
        const double steps = std::ceil(cfg.integrator.t_end / cfg.integrator.dt);
        cfg.integrator.stride = std::max(1, static_cast<int>(steps / 5000));
    }
    if (doc.has("stride"))
        cfg.integrator.stride = doc.integer("stride");

    cfg.window_fraction = doc.number_or("window").value_or(cfg.window_fraction);
    if (!(cfg.window_fraction > 0 && cfg.window_fraction <= 1))
        throw Error(ErrorKind::Parse, "window must be a fraction in (0, 1]");
    cfg.steady_tol = doc.number_or("steady_tol").value_or(cfg.steady_tol);
    cfg.solver_tol = doc.number_or("solver_tol").value_or(cfg.solver_tol);
    cfg.ep_tol = doc.number_or("ep_tol").value_or(cfg.ep_tol);
    if (doc.has("output"))
        cfg.output_path = doc.text("output");
    return cfg;
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream os;
    const auto line = [&os](std::string_view key, const std::string& value) {
        os << key << " = " << value << '\n';
    };
    line("command", std::string(to_string(cfg.command)));
    line("units", "absolute");
    os << format_params(cfg.params);
    line("grid_start", format_number(cfg.grid.start));
    line("grid_stop", format_number(cfg.grid.stop));
    line("grid_count", std::to_string(cfg.grid.count));
    line("grid_scale", cfg.grid.scale == GridScale::Absolute ? "absolute" : "kappa_c");
    line("omega_drive", format_number(cfg.omega_drive));
    line("alpha1", format_complex(cfg.initial.alpha(0)));
    line("alpha2", format_complex(cfg.initial.alpha(1)));
    line("t_end", format_number(cfg.integrator.t_end));
    line("dt", format_number(cfg.integrator.dt));
    line("stride", std::to_string(cfg.integrator.stride));
    line("window", format_number(cfg.window_fraction));
    line("steady_tol", format_number(cfg.steady_tol));
    line("solver_tol", format_number(cfg.solver_tol));
    line("ep_tol", format_number(cfg.ep_tol));
    line("output", cfg.output_path);
    return os.str();
}

bool equivalent(const RunConfig& a, const RunConfig& b) {
    return a.params == b.params && a.command == b.command && a.grid == b.grid &&
           a.omega_drive == b.omega_drive && a.initial.alpha == b.initial.alpha &&
           a.initial.t == b.initial.t && a.integrator.t_end == b.integrator.t_end &&
           a.integrator.dt == b.integrator.dt && a.integrator.stride == b.integrator.stride &&
           a.window_fraction == b.window_fraction && a.steady_tol == b.steady_tol &&
           a.solver_tol == b.solver_tol && a.ep_tol == b.ep_tol && a.output_path == b.output_path;
}

} // namespace ptcav
