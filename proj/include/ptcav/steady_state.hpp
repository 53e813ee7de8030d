#pragma once

// Steady states of the saturable gain/loss pair: closed forms for both sides
// of the exceptional point, an independent numeric solver, and the coupling
// sweep of the emergent frequencies and saturated rates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ptcav/dynamics.hpp"
#include "ptcav/linear_transfer.hpp"
#include "ptcav/model.hpp"

namespace ptcav {

enum class SolutionSource { ClosedFormPT, ClosedFormBroken, SelfConsistent };

constexpr std::string_view to_string(SolutionSource s) {
    switch (s) {
    case SolutionSource::ClosedFormPT: return "closed_form_pt";
    case SolutionSource::ClosedFormBroken: return "closed_form_broken";
    case SolutionSource::SelfConsistent: return "self_consistent";
    }
    return "unknown";
}

/// alpha2 = rho e^{i phase} alpha1, alpha1 taken real and positive.
template <typename Scalar = double>
struct AnalyticSteadyState {
    Scalar n1{};
    Scalar n2{};
    Scalar g_sat{}; ///< g0/(1+n1)
    Scalar f_sat{}; ///< f0/(1+n2)
    Scalar net_gain{}; ///< g_sat - gamma0
    Scalar net_loss{}; ///< gamma0 + f_sat
    std::vector<Scalar> detunings; ///< signed omega - omega0
    Scalar phase{};
    Scalar rho{};
    Scalar eta{};
    Regime regime = Regime::PTBroken;
    SolutionSource source = SolutionSource::ClosedFormPT;

    /// Amplitudes of the first listed detuning branch.
    Amplitudes<Scalar> amplitudes() const {
        using std::sqrt;
        Amplitudes<Scalar> a;
        a(0) = std::complex<Scalar>(sqrt(n1), 0);
        a(1) = std::polar(sqrt(n2), phase);
        return a;
    }
};

/// Dimensionless residual of the stationarity equations
///   -i d a1 = (g_sat - gamma0) a1 - i kappa a2
///   -i d a2 = (-gamma0 - f_sat) a2 - i kappa a1
/// with d = omega - omega0 and the saturated rates evaluated at |a_i|^2.
/// Normalised by the largest rate and the largest amplitude.
template <typename Scalar>
Scalar stationarity_residual(const Amplitudes<Scalar>& a, Scalar detuning,
                             const SystemParams<Scalar>& p) {
    const std::complex<Scalar> i(0, 1);
    const Scalar g_sat = p.g0 / (Scalar(1) + std::norm(a(0)));
    const Scalar f_sat = p.f0 / (Scalar(1) + std::norm(a(1)));
    const std::complex<Scalar> e1 =
        (g_sat - p.gamma0 + i * detuning) * a(0) - i * p.kappa * a(1);
    const std::complex<Scalar> e2 =
        (-p.gamma0 - f_sat + i * detuning) * a(1) - i * p.kappa * a(0);
    using std::abs;
    const Scalar scale = std::max(rate_scale(p), std::numeric_limits<Scalar>::min());
    const Scalar amp = std::max({abs(a(0)), abs(a(1)), Scalar(kResidualFloor)});
    const Scalar worst = std::max({abs(e1.real()), abs(e1.imag()), abs(e2.real()), abs(e2.imag())});
    return worst / (scale * amp);
}

/// Steady state above the exceptional point. The saturated rates lock to
/// g_sat - f_sat = 2 gamma0, both cavities hold the same photon number and
/// the pair oscillates at omega0 +/- sqrt(kappa^2 - kappa_c^2).
template <typename Scalar>
AnalyticSteadyState<Scalar> pt_symmetric_branch(const SystemParams<Scalar>& p) {
    require_lasing(p);
    const Scalar kc = critical_coupling(p);
    if (classify_regime(p) != Regime::PTSymmetric)
        throw Error(ErrorKind::Parameter, "violated kappa > kappa_c (kappa=" +
                                              std::to_string(double(p.kappa)) +
                                              ", kappa_c=" + std::to_string(double(kc)) + ")");
    using std::atan2;
    using std::sqrt;

    // Hyperbolic parametrisation g_sat = 2 gamma0 cosh^2 u, f_sat = 2 gamma0 sinh^2 u
    // with tanh^2 u = f0/g0 collapses to the rational forms below.
    AnalyticSteadyState<Scalar> s;
    const Scalar spread = p.g0 - p.f0;
    s.g_sat = Scalar(2) * p.gamma0 * p.g0 / spread;
    s.f_sat = Scalar(2) * p.gamma0 * p.f0 / spread;
    s.n1 = p.g0 / s.g_sat - Scalar(1);
    s.n2 = p.f0 > Scalar(0) ? p.f0 / s.f_sat - Scalar(1) : s.n1;
    s.net_gain = s.g_sat - p.gamma0;
    s.net_loss = p.gamma0 + s.f_sat;
    const Scalar d = sqrt(p.kappa * p.kappa - kc * kc);
    s.detunings = {d, -d};
    // alpha2/alpha1 = (d - i kappa_c)/kappa for the +d branch; the -d branch
    // has phase pi - phase.
    s.phase = atan2(-kc, d);
    s.rho = Scalar(1);
    s.eta = s.f_sat / s.g_sat;
    s.regime = Regime::PTSymmetric;
    s.source = SolutionSource::ClosedFormPT;
    return s;
}

/// Below the exceptional point: stationary (omega = omega0) state with the
/// output-cavity saturated loss pinned to f_sat = gamma0. This reproduces the
/// published closed forms; for generic (g0, f0) the unconstrained solution
/// from self_consistent_solve differs.
template <typename Scalar>
AnalyticSteadyState<Scalar> pt_broken_branch(const SystemParams<Scalar>& p) {
    if (!(p.g0 > p.f0))
        throw Error(ErrorKind::Parameter, "violated g0 > f0");
    if (!(p.gamma0 > Scalar(0)))
        throw Error(ErrorKind::Parameter, "violated gamma0 > 0");
    if (!(p.kappa > Scalar(0)) || classify_regime(p) != Regime::PTBroken)
        throw Error(ErrorKind::Parameter, "violated 0 < kappa < kappa_c");

    AnalyticSteadyState<Scalar> s;
    const Scalar k2 = p.kappa * p.kappa;
    const Scalar g2 = p.gamma0 * p.gamma0;
    s.f_sat = p.gamma0;
    s.g_sat = p.gamma0 + k2 / (Scalar(2) * p.gamma0);
    s.net_gain = k2 / (Scalar(2) * p.gamma0);
    s.net_loss = Scalar(2) * p.gamma0;
    s.n1 = p.g0 / s.g_sat - Scalar(1);
    if (s.n1 < Scalar(0))
        throw Error(ErrorKind::Parameter, "broken-branch closed form gives negative photon number");
    s.n2 = k2 / (Scalar(4) * g2) * s.n1;
    s.detunings = {Scalar(0)};
    s.rho = p.kappa / (Scalar(2) * p.gamma0);
    s.phase = -std::numbers::pi_v<Scalar> / Scalar(2);
    s.eta = k2 / (Scalar(2) * (k2 + Scalar(2) * g2));
    s.regime = Regime::PTBroken;
    s.source = SolutionSource::ClosedFormBroken;
    return s;
}

/// PT-regime transfer efficiency f_sat/g_sat = f0/g0, independent of kappa.
template <typename Scalar>
Scalar efficiency_pt(const SystemParams<Scalar>& p) {
    require_lasing(p);
    if (classify_regime(p) != Regime::PTSymmetric)
        throw Error(ErrorKind::Parameter, "violated kappa > kappa_c");
    return p.f0 / p.g0;
}

/// Broken-branch closed-form efficiency evaluated at kappa_c minus the
/// PT-branch value f0/g0. Zero only on the g0 = 3 f0 family.
template <typename Scalar>
Scalar continuity_gap(const SystemParams<Scalar>& p) {
    const Scalar kc = critical_coupling(p);
    const Scalar k2 = kc * kc;
    return k2 / (Scalar(2) * (k2 + Scalar(2) * p.gamma0 * p.gamma0)) - p.f0 / p.g0;
}

enum class SolveMode { Rotating, Stationary };

constexpr std::string_view to_string(SolveMode m) {
    return m == SolveMode::Rotating ? "rotating" : "stationary";
}

enum class SolveStatus { Solved, NoSolution };

template <typename Scalar = double>
struct SolveResult {
    SolveStatus status = SolveStatus::NoSolution;
    AnalyticSteadyState<Scalar> state;
    Scalar residual = std::numeric_limits<Scalar>::quiet_NaN();
    int iterations = 0;
    std::string detail;

    bool solved() const { return status == SolveStatus::Solved; }
};

inline constexpr double kSolverTolerance = 1e-12;
inline constexpr int kSolverMaxIterations = 10000;

namespace detail {

/// Bisection for a sign change of `f` on [lo, hi]; `f` may return +inf to
/// mark the infeasible side. Returns the midpoint of the final bracket.
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, int max_iter, int& iterations) {
    Scalar f_lo = f(lo);
    for (iterations = 0; iterations < max_iter; ++iterations) {
        const Scalar mid = lo + (hi - lo) / Scalar(2);
        if (mid <= lo || mid >= hi)
            break;
        const Scalar f_mid = f(mid);
        if (f_mid == Scalar(0))
            return mid;
        if ((f_mid < Scalar(0)) == (f_lo < Scalar(0))) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / Scalar(2);
}

template <typename Scalar>
SolveResult<Scalar> no_solution(std::string why) {
    SolveResult<Scalar> r;
    r.status = SolveStatus::NoSolution;
    r.detail = std::move(why);
    return r;
}

template <typename Scalar>
void finish_state(AnalyticSteadyState<Scalar>& s, const SystemParams<Scalar>& p) {
    s.g_sat = p.g0 / (Scalar(1) + s.n1);
    s.f_sat = p.f0 / (Scalar(1) + s.n2);
    s.net_gain = s.g_sat - p.gamma0;
    s.net_loss = p.gamma0 + s.f_sat;
    s.source = SolutionSource::SelfConsistent;
    if (s.n1 > Scalar(0) && s.g_sat > Scalar(0))
        s.eta = s.f_sat * s.n2 / (s.g_sat * s.n1);
}

} // namespace detail

/// Numeric solution of the stationarity equations without the closed-form
/// ansatz.
///
/// Rotating: the detuning is free. Non-zero detuning forces the imaginary part
/// of the characteristic determinant to vanish, which fixes f_sat in terms of
/// g_sat; n2 then follows from f_sat and the eigenvector modulus condition
/// closes the system in n1 alone.
///
/// Stationary: detuning is pinned to zero. The determinant condition
/// (g_sat - gamma0)(f_sat + gamma0) = kappa^2 fixes f_sat in terms of n1 and the
/// ratio n2/n1 = kappa^2/(gamma0 + f_sat)^2 closes the system.
///
/// Both reductions are solved by bisection over the feasible n1 interval.
/// Infeasibility is reported as NoSolution; a residual above `tol` after the
/// bracket collapses throws a numeric error.
template <typename Scalar>
SolveResult<Scalar> self_consistent_solve(const SystemParams<Scalar>& p, SolveMode mode,
                                          Scalar tol = Scalar(kSolverTolerance),
                                          int max_iter = kSolverMaxIterations) {
    if (!(p.g0 > p.f0))
        throw Error(ErrorKind::Parameter, "violated g0 > f0");
    using std::sqrt;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Scalar k2 = p.kappa * p.kappa;

    AnalyticSteadyState<Scalar> s;
    int iterations = 0;
    Scalar detuning = Scalar(0);

    if (p.kappa == Scalar(0)) {
        // Decoupled: the gain cavity saturates at g_sat = gamma0, the lossy one empties.
        if (!(p.g0 > p.gamma0))
            return detail::no_solution<Scalar>("decoupled gain cavity below threshold");
        s.n1 = p.g0 / p.gamma0 - Scalar(1);
        s.n2 = Scalar(0);
        s.phase = Scalar(0);
        s.rho = Scalar(0);
        s.detunings = {Scalar(0)};
    } else if (mode == SolveMode::Rotating) {
        const auto n2_of = [&](Scalar n1, Scalar& g_sat, Scalar& f_sat) {
            g_sat = p.g0 / (Scalar(1) + n1);
            f_sat = g_sat - Scalar(2) * p.gamma0;
            if (p.f0 == Scalar(0))
                return f_sat == Scalar(0) ? Scalar(0) : -inf;
            return f_sat > Scalar(0) ? p.f0 / f_sat - Scalar(1) : inf;
        };
        const auto ratio_mismatch = [&](Scalar n1) {
            Scalar g_sat, f_sat;
            const Scalar n2 = n2_of(n1, g_sat, f_sat);
            if (n2 == inf)
                return inf;
            const Scalar d2 = k2 - (g_sat - p.gamma0) * (p.gamma0 + f_sat);
            const Scalar gain = g_sat - p.gamma0;
            return k2 * n2 - n1 * (gain * gain + d2);
        };
        const Scalar hi = p.g0 / (Scalar(2) * p.gamma0) - Scalar(1);
        if (!(p.gamma0 > Scalar(0)) || !(hi > Scalar(0)))
            return detail::no_solution<Scalar>("no feasible n1 with g_sat > 2 gamma0");
        Scalar n1;
        if (p.f0 == Scalar(0)) {
            n1 = hi;
        } else {
            const Scalar lo = std::max(Scalar(0), p.g0 / (Scalar(2) * p.gamma0 + p.f0) - Scalar(1));
            if (!(ratio_mismatch(lo) <= Scalar(0)))
                return detail::no_solution<Scalar>("modulus condition has no sign change on the feasible interval");
            n1 = detail::bisect(ratio_mismatch, lo, hi, max_iter, iterations);
        }
        Scalar g_sat, f_sat;
        Scalar n2 = n2_of(n1, g_sat, f_sat);
        if (p.f0 == Scalar(0)) {
            const Scalar gain = g_sat - p.gamma0;
            n2 = n1 * (gain * gain + k2 - gain * p.gamma0) / k2;
        }
        const Scalar d2 = k2 - (g_sat - p.gamma0) * (p.gamma0 + f_sat);
        if (!(d2 > Scalar(0)))
            return detail::no_solution<Scalar>("no real detuning: coupling at or below the exceptional point");
        detuning = sqrt(d2);
        s.n1 = n1;
        s.n2 = n2;
        s.detunings = {detuning, -detuning};
        using std::arg;
        const std::complex<Scalar> i(0, 1);
        const std::complex<Scalar> ratio = (g_sat - p.gamma0 + i * detuning) / (i * p.kappa);
        s.phase = arg(ratio);
        s.rho = sqrt(n2 / n1);
    } else {
        const auto f_of = [&](Scalar n1) {
            const Scalar g_sat = p.g0 / (Scalar(1) + n1);
            return k2 / (g_sat - p.gamma0) - p.gamma0;
        };
        const auto ratio_mismatch = [&](Scalar n1) {
            const Scalar g_sat = p.g0 / (Scalar(1) + n1);
            if (!(g_sat > p.gamma0))
                return -inf;
            const Scalar f_sat = f_of(n1);
            if (!(f_sat > Scalar(0)))
                return inf;
            const Scalar n2 = p.f0 / f_sat - Scalar(1);
            const Scalar loss = p.gamma0 + f_sat;
            return n2 * loss * loss - k2 * n1;
        };
        // n1 range where 0 < f_sat <= f0
        const Scalar g_hi = p.gamma0 + k2 / (p.gamma0 + p.f0);
        const Scalar hi = p.g0 / g_hi - Scalar(1);
        if (!(hi > Scalar(0)))
            return detail::no_solution<Scalar>("gain too weak for a stationary lasing state");
        Scalar lo = Scalar(0);
        if (p.gamma0 > Scalar(0))
            lo = std::max(lo, p.g0 / (p.gamma0 + k2 / p.gamma0) - Scalar(1));
        if (p.f0 == Scalar(0)) {
            if (!(p.gamma0 > Scalar(0)))
                return detail::no_solution<Scalar>("f0 = gamma0 = 0 leaves the loss cavity undamped");
            s.n1 = hi;
            s.n2 = s.n1 * k2 / (p.gamma0 * p.gamma0);
        } else {
            if (!(ratio_mismatch(lo) >= Scalar(0)))
                return detail::no_solution<Scalar>("ratio condition has no sign change on the feasible interval");
            s.n1 = detail::bisect(ratio_mismatch, lo, hi, max_iter, iterations);
            s.n2 = p.f0 / f_of(s.n1) - Scalar(1);
        }
        s.detunings = {Scalar(0)};
        using std::arg;
        const std::complex<Scalar> ratio(Scalar(0), -p.kappa / (p.gamma0 + p.f0 / (Scalar(1) + s.n2)));
        s.phase = arg(ratio);
        s.rho = sqrt(s.n2 / s.n1);
    }

    detail::finish_state(s, p);
    if (p.g0 > p.f0)
        s.regime = classify_regime(p);

    SolveResult<Scalar> out;
    out.state = s;
    out.iterations = iterations;
    out.residual = stationarity_residual(s.amplitudes(), detuning, p);
    if (!(out.residual < tol))
        throw Error(ErrorKind::Numeric, "self-consistent solve did not reach tolerance, residual=" +
                                            std::to_string(double(out.residual)));
    out.status = SolveStatus::Solved;
    return out;
}

template <typename Scalar = double>
struct BifurcationRow {
    Scalar kappa{};
    Scalar kappa_over_kappac{};
    Scalar detuning_plus{};
    Scalar detuning_minus{};
    Scalar net_gain{}; ///< g_sat - gamma0
    Scalar net_loss{}; ///< gamma0 + f_sat
    Regime regime = Regime::PTBroken;
    Scalar eta{};
};

/// Emergent frequency branches and saturated net rates across a coupling grid,
/// from the closed forms on each side. The exceptional point is the merge row.
template <typename Scalar>
std::vector<BifurcationRow<Scalar>> bifurcation_sweep(const SystemParams<Scalar>& p,
                                                      std::span<const Scalar> kappa_grid,
                                                      Scalar ep_tol = Scalar(kDefaultEpTolerance)) {
    require_lasing(p);
    detail::require_increasing(kappa_grid);
    if (!(kappa_grid.front() > Scalar(0)))
        throw Error(ErrorKind::Parameter, "coupling grid must be positive");
    const Scalar kc = critical_coupling(p);
    std::vector<BifurcationRow<Scalar>> rows;
    rows.reserve(kappa_grid.size());
    for (Scalar k : kappa_grid) {
        SystemParams<Scalar> q = p;
        q.kappa = k;
        BifurcationRow<Scalar> row;
        row.kappa = k;
        row.kappa_over_kappac = k / kc;
        row.regime = classify_regime(q, ep_tol);
        switch (row.regime) {
        case Regime::PTSymmetric: {
            const auto s = pt_symmetric_branch(q);
            row.detuning_plus = s.detunings[0];
            row.detuning_minus = s.detunings[1];
            row.net_gain = s.net_gain;
            row.net_loss = s.net_loss;
            row.eta = s.eta;
            break;
        }
        case Regime::PTBroken: {
            const auto s = pt_broken_branch(q);
            row.net_gain = s.net_gain;
            row.net_loss = s.net_loss;
            row.eta = s.eta;
            break;
        }
        case Regime::ExceptionalPoint:
            row.net_gain = kc;
            row.net_loss = kc;
            row.eta = p.f0 / p.g0;
            break;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace ptcav
