#pragma once

// Driven two-cavity transfer through input/output ports (no gain).
// Detuning convention throughout: detuning = omega0 - omega.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptcav/model.hpp"

namespace ptcav {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Complex transmission amplitude of the output cavity at drive frequency omega.
template <typename Scalar>
Complex<Scalar> transmission(Scalar omega, const SystemParams<Scalar>& p) {
    using std::sqrt;
    const Complex<Scalar> i(0, 1);
    const Scalar detuning = p.omega0 - omega;
    const Complex<Scalar> d1 = i * detuning + p.gamma0 + p.gamma1;
    const Complex<Scalar> d2 = i * detuning + p.gamma0 + p.gamma2;
    const Complex<Scalar> denom = p.kappa * p.kappa + d1 * d2;
    if (denom == Complex<Scalar>(0))
        throw Error(ErrorKind::Singularity,
                    "transmission pole at omega=" + std::to_string(double(omega)) +
                        " (lossless ports with kappa = |omega0 - omega|)");
    return -i * p.kappa * sqrt(Scalar(2) * p.gamma2) * sqrt(Scalar(2) * p.gamma1) / denom;
}

/// Complex reflection amplitude at the input port.
template <typename Scalar>
Complex<Scalar> reflection(Scalar omega, const SystemParams<Scalar>& p) {
    const Complex<Scalar> i(0, 1);
    const Scalar detuning = p.omega0 - omega;
    const Complex<Scalar> d1 = i * detuning + p.gamma0 + p.gamma1;
    const Complex<Scalar> d2 = i * detuning + p.gamma0 + p.gamma2;
    if (d2 == Complex<Scalar>(0))
        throw Error(ErrorKind::Singularity,
                    "reflection pole: output cavity lossless and on resonance at omega=" +
                        std::to_string(double(omega)));
    const Complex<Scalar> outer = d1 + p.kappa * p.kappa / d2;
    if (outer == Complex<Scalar>(0))
        throw Error(ErrorKind::Singularity,
                    "reflection pole at omega=" + std::to_string(double(omega)));
    return Scalar(2) * p.gamma1 / outer - Scalar(1);
}

template <typename Scalar>
Scalar efficiency_conventional(Scalar omega, const SystemParams<Scalar>& p) {
    return std::norm(transmission(omega, p));
}

/// Drive frequencies maximising the symmetric-case efficiency:
/// omega0 +/- sqrt(kappa^2 - 4 gamma0^2) above kappa = 2 gamma0, omega0 otherwise.
/// Only defined for gamma1 == gamma2 == gamma0.
template <typename Scalar>
std::vector<Scalar> optimal_frequencies(const SystemParams<Scalar>& p) {
    if (p.gamma1 != p.gamma0 || p.gamma2 != p.gamma0)
        throw Error(ErrorKind::Unsupported,
                    "optimal frequency rule requires gamma1 == gamma2 == gamma0");
    const Scalar threshold = Scalar(2) * p.gamma0;
    if (p.kappa <= threshold)
        return {p.omega0};
    using std::sqrt;
    const Scalar shift = sqrt(p.kappa * p.kappa - threshold * threshold);
    return {p.omega0 - shift, p.omega0 + shift};
}

template <typename Scalar = double>
struct TransferPoint {
    Scalar kappa{};
    Scalar omega{};
    Complex<Scalar> t{};
    Complex<Scalar> r{};
    Scalar efficiency{};
    std::optional<std::string> singular; ///< set when the point sits on a pole
};

/// Frequency-domain response over a grid of drive frequencies.
template <typename Scalar = double>
struct TransferSpectrum {
    std::vector<Scalar> omegas;
    std::vector<Complex<Scalar>> transmission;
    std::vector<Complex<Scalar>> reflection;
    std::vector<Scalar> efficiency;
};

template <typename Scalar>
TransferPoint<Scalar> evaluate_transfer(Scalar omega, const SystemParams<Scalar>& p) {
    TransferPoint<Scalar> pt;
    pt.kappa = p.kappa;
    pt.omega = omega;
    try {
        pt.t = transmission(omega, p);
        pt.r = reflection(omega, p);
        pt.efficiency = std::norm(pt.t);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Singularity)
            throw;
        const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
        pt.t = pt.r = Complex<Scalar>(nan, nan);
        pt.efficiency = nan;
        pt.singular = e.what();
    }
    return pt;
}

template <typename Scalar>
TransferSpectrum<Scalar> transfer_spectrum(const SystemParams<Scalar>& p,
                                           std::span<const Scalar> omegas) {
    TransferSpectrum<Scalar> s;
    s.omegas.assign(omegas.begin(), omegas.end());
    s.transmission.reserve(omegas.size());
    s.reflection.reserve(omegas.size());
    s.efficiency.reserve(omegas.size());
    for (Scalar w : omegas) {
        const auto t = transmission(w, p);
        s.transmission.push_back(t);
        s.reflection.push_back(reflection(w, p));
        s.efficiency.push_back(std::norm(t));
    }
    return s;
}

namespace detail {
template <typename Scalar>
void require_increasing(std::span<const Scalar> grid) {
    if (grid.empty())
        throw Error(ErrorKind::Parameter, "grid must not be empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw Error(ErrorKind::Parameter, "grid must be strictly increasing");
}
} // namespace detail

/// Efficiency at a fixed drive frequency along a coupling grid. Singular
/// points are returned flagged rather than thrown.
template <typename Scalar>
std::vector<TransferPoint<Scalar>> conventional_sweep(const SystemParams<Scalar>& p,
                                                      std::span<const Scalar> kappa_grid,
                                                      Scalar omega) {
    detail::require_increasing(kappa_grid);
    std::vector<TransferPoint<Scalar>> rows;
    rows.reserve(kappa_grid.size());
    for (Scalar k : kappa_grid) {
        SystemParams<Scalar> q = p;
        q.kappa = k;
        rows.push_back(evaluate_transfer(omega, q));
    }
    return rows;
}

} // namespace ptcav
