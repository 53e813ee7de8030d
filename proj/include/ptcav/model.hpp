#pragma once

// Physical parameters of the two-cavity system and the saturable gain/loss laws.

#include <cmath>
#include <map>
#include <string>
#include <string_view>

#include "ptcav/errors.hpp"

namespace ptcav {

/// Rates and frequencies of one configuration. Everything is an angular
/// frequency in the same (absolute) unit as omega0.
template <typename Scalar = double>
struct SystemParams {
    Scalar omega0 = Scalar(1);
    Scalar gamma0 = Scalar(0); ///< intrinsic loss of each cavity
    Scalar g0 = Scalar(0);     ///< unsaturated gain
    Scalar f0 = Scalar(0);     ///< unsaturated loss
    Scalar kappa = Scalar(0);  ///< inter-cavity coupling
    Scalar gamma1 = Scalar(0); ///< input-port coupling
    Scalar gamma2 = Scalar(0); ///< output-port coupling

    template <typename Other>
    SystemParams<Other> cast() const {
        return {Other(omega0), Other(gamma0), Other(g0), Other(f0),
                Other(kappa),  Other(gamma1), Other(gamma2)};
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

using Params = SystemParams<double>;

enum class Regime { PTSymmetric, PTBroken, ExceptionalPoint };

constexpr std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::PTSymmetric: return "pt_symmetric";
    case Regime::PTBroken: return "pt_broken";
    case Regime::ExceptionalPoint: return "exceptional_point";
    }
    return "unknown";
}

inline constexpr double kDefaultEpTolerance = 1e-9;

/// Checks omega0 > 0 and that every rate is finite and non-negative.
template <typename Scalar>
void validate(const SystemParams<Scalar>& p) {
    using std::isfinite;
    if (!(p.omega0 > Scalar(0)) || !isfinite(p.omega0))
        throw Error(ErrorKind::Parameter, "omega0 must be positive and finite");
    const std::pair<const char*, Scalar> rates[] = {
        {"gamma0", p.gamma0}, {"g0", p.g0},         {"f0", p.f0},
        {"kappa", p.kappa},   {"gamma1", p.gamma1}, {"gamma2", p.gamma2}};
    for (const auto& [name, value] : rates) {
        if (!isfinite(value) || value < Scalar(0))
            throw Error(ErrorKind::Parameter,
                        std::string(name) + " must be finite and non-negative");
    }
}

namespace detail {
template <typename Scalar>
void check_photon_number(Scalar n, const char* what) {
    using std::isfinite;
    if (!isfinite(n) || n < Scalar(0))
        throw Error(ErrorKind::Domain,
                    std::string(what) + " must be a finite non-negative photon number");
}
} // namespace detail

/// Net gain of the input cavity, -gamma0 + g0/(1+n1).
template <typename Scalar>
Scalar gain_rate(Scalar n1, const SystemParams<Scalar>& p) {
    detail::check_photon_number(n1, "n1");
    return -p.gamma0 + p.g0 / (Scalar(1) + n1);
}

/// Total loss of the output cavity, gamma0 + f0/(1+n2).
template <typename Scalar>
Scalar loss_rate(Scalar n2, const SystemParams<Scalar>& p) {
    detail::check_photon_number(n2, "n2");
    return p.gamma0 + p.f0 / (Scalar(1) + n2);
}

/// Coupling at which the eigenfrequency pair coalesces,
/// gamma0 (g0 + f0) / (g0 - f0).
template <typename Scalar>
Scalar critical_coupling(const SystemParams<Scalar>& p) {
    if (!(p.g0 > p.f0))
        throw Error(ErrorKind::Parameter, "PT analysis undefined: requires g0 > f0");
    return p.gamma0 * (p.g0 + p.f0) / (p.g0 - p.f0);
}

template <typename Scalar>
Regime classify_regime(const SystemParams<Scalar>& p, Scalar tol = Scalar(kDefaultEpTolerance)) {
    if (!(tol > Scalar(0)))
        throw Error(ErrorKind::Parameter, "regime tolerance must be positive");
    const Scalar kc = critical_coupling(p);
    using std::abs;
    if (abs(p.kappa - kc) <= tol * kc)
        return Regime::ExceptionalPoint;
    return p.kappa > kc ? Regime::PTSymmetric : Regime::PTBroken;
}

/// Preconditions shared by the PT-branch closed forms: g0 > f0 and
/// g0 - f0 > 2 gamma0 (positive photon number).
template <typename Scalar>
void require_lasing(const SystemParams<Scalar>& p) {
    if (!(p.g0 > p.f0))
        throw Error(ErrorKind::Parameter, "violated g0 > f0");
    if (!(p.g0 - p.f0 > Scalar(2) * p.gamma0))
        throw Error(ErrorKind::Parameter, "violated g0 - f0 > 2*gamma0");
}

// Canonical key-value form: omega0, gamma0, g0, f0, kappa, gamma1, gamma2.
std::map<std::string, double> to_key_values(const Params& p);
Params params_from_key_values(const std::map<std::string, double>& kv);
std::string format_params(const Params& p);

} // namespace ptcav
