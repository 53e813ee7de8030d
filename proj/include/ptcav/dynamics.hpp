#pragma once

// Mean-field coupled-mode dynamics of the saturable gain/loss cavity pair,
// integrated in the frame rotating at omega0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptcav/model.hpp"

namespace ptcav {

template <typename Scalar = double>
using Amplitudes = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar = double>
struct ModeState {
    Scalar t = Scalar(0);
    Amplitudes<Scalar> alpha = Amplitudes<Scalar>::Zero();

    const std::complex<Scalar>& alpha1() const { return alpha(0); }
    const std::complex<Scalar>& alpha2() const { return alpha(1); }
    Scalar n1() const { return std::norm(alpha(0)); }
    Scalar n2() const { return std::norm(alpha(1)); }
};

template <typename Scalar = double>
struct Trajectory {
    std::vector<ModeState<Scalar>> samples;
    Scalar dt = Scalar(0);
    int stride = 1;
    int method_order = 4;
};

struct IntegratorSettings {
    double t_end = 0;
    double dt = 0;
    int stride = 1;
};

inline constexpr double kDefaultSteadyTolerance = 1e-6;
inline constexpr double kDefaultWindowFraction = 0.2;
inline constexpr double kDivergenceAmplitude = 1e12;
inline constexpr double kResidualFloor = 1e-30;

/// Largest rate in the system; sets the integrator step and the scale used to
/// make residuals dimensionless.
template <typename Scalar>
Scalar rate_scale(const SystemParams<Scalar>& p) {
    return std::max({p.g0, p.kappa, p.gamma0 + p.f0});
}

/// The paper-style initial condition alpha1 = 1, alpha2 = 0.1 e^{i pi/2}.
template <typename Scalar = double>
ModeState<Scalar> default_initial_state() {
    ModeState<Scalar> s;
    s.alpha << std::complex<Scalar>(1, 0),
        std::polar(Scalar(0.1), std::numbers::pi_v<Scalar> / Scalar(2));
    return s;
}

/// Horizon 50/gamma0, step 0.01/rate_scale, about 5000 recorded samples.
inline IntegratorSettings default_integrator(const Params& p) {
    const double scale = rate_scale(p);
    IntegratorSettings s;
    s.dt = scale > 0 ? 0.01 / scale : 0.01;
    s.t_end = p.gamma0 > 0 ? 50.0 / p.gamma0 : (scale > 0 ? 50.0 / scale : 50.0);
    const double steps = std::ceil(s.t_end / s.dt);
    s.stride = std::max(1, static_cast<int>(steps / 5000));
    return s;
}

/// Right-hand side in the rotating frame:
///   d alpha1/dt = [-gamma0 + g0/(1+|alpha1|^2)] alpha1 - i kappa alpha2
///   d alpha2/dt = [-gamma0 - f0/(1+|alpha2|^2)] alpha2 - i kappa alpha1
template <typename Scalar>
Amplitudes<Scalar> derivative(const Amplitudes<Scalar>& alpha, const SystemParams<Scalar>& p) {
    using std::isfinite;
    if (!isfinite(alpha(0).real()) || !isfinite(alpha(0).imag()) ||
        !isfinite(alpha(1).real()) || !isfinite(alpha(1).imag()))
        throw Error(ErrorKind::Domain, "non-finite amplitude");
    const std::complex<Scalar> i(0, 1);
    const Scalar gain = -p.gamma0 + p.g0 / (Scalar(1) + std::norm(alpha(0)));
    const Scalar loss = -p.gamma0 - p.f0 / (Scalar(1) + std::norm(alpha(1)));
    Amplitudes<Scalar> d;
    d(0) = gain * alpha(0) - i * p.kappa * alpha(1);
    d(1) = loss * alpha(1) - i * p.kappa * alpha(0);
    return d;
}

template <typename Scalar>
Amplitudes<Scalar> derivative(const ModeState<Scalar>& s, const SystemParams<Scalar>& p) {
    return derivative(s.alpha, p);
}

/// Classical fourth-order Runge-Kutta step for an autonomous system.
template <typename Vector, typename Rhs, typename Scalar>
Vector rk4_step(const Rhs& rhs, const Vector& y, Scalar dt) {
    const Vector k1 = rhs(y);
    const Vector k2 = rhs(Vector(y + (dt / 2) * k1));
    const Vector k3 = rhs(Vector(y + (dt / 2) * k2));
    const Vector k4 = rhs(Vector(y + dt * k3));
    return y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Fixed-step RK4 from `initial` up to t_end, keeping every `stride`-th state.
template <typename Scalar>
Trajectory<Scalar> integrate(const ModeState<Scalar>& initial, const SystemParams<Scalar>& p,
                             Scalar t_end, Scalar dt, int stride) {
    if (!(dt > Scalar(0)) || !(t_end > Scalar(0)) || stride < 1)
        throw Error(ErrorKind::Parameter, "integrate requires dt > 0, t_end > 0, stride >= 1");
    const Scalar scale = rate_scale(p);
    if (scale > Scalar(0) && dt > Scalar(0.1) / scale * (Scalar(1) + Scalar(1e-12)))
        throw Error(ErrorKind::Parameter,
                    "dt=" + std::to_string(double(dt)) + " violates the stability guard dt <= " +
                        std::to_string(double(Scalar(0.1) / scale)));

    using std::ceil;
    const auto steps = static_cast<long long>(ceil(t_end / dt - Scalar(1e-9)));
    Trajectory<Scalar> traj;
    traj.dt = dt;
    traj.stride = stride;
    traj.samples.reserve(static_cast<std::size_t>(steps / stride + 1));
    traj.samples.push_back(initial);

    const auto rhs = [&p](const Amplitudes<Scalar>& a) { return derivative(a, p); };
    Amplitudes<Scalar> y = initial.alpha;
    for (long long k = 1; k <= steps; ++k) {
        y = rk4_step(rhs, y, dt);
        const Scalar t = initial.t + Scalar(k) * dt;
        using std::abs;
        using std::isfinite;
        const Scalar amp = std::max(abs(y(0)), abs(y(1)));
        if (!isfinite(amp) || amp > Scalar(kDivergenceAmplitude))
            throw DivergenceError(double(t), "amplitude blow-up at t=" + std::to_string(double(t)));
        if (k % stride == 0)
            traj.samples.push_back({t, y});
    }
    return traj;
}

inline Trajectory<double> integrate(const ModeState<double>& initial, const Params& p,
                                    const IntegratorSettings& s) {
    return integrate(initial, p, s.t_end, s.dt, s.stride);
}

struct PhotonSample {
    double t;
    double n1;
    double n2;
};

template <typename Scalar>
std::vector<PhotonSample> photon_numbers(const Trajectory<Scalar>& traj) {
    std::vector<PhotonSample> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back({double(s.t), double(s.n1()), double(s.n2())});
    return out;
}

namespace detail {
/// Index of the first sample inside the trailing window of the given length.
template <typename Scalar>
std::size_t window_begin(const Trajectory<Scalar>& traj, Scalar window) {
    if (traj.samples.empty())
        throw Error(ErrorKind::InsufficientData, "empty trajectory");
    if (!(window > Scalar(0)))
        throw Error(ErrorKind::Parameter, "window must be positive");
    const Scalar t_last = traj.samples.back().t;
    const Scalar t_first = traj.samples.front().t;
    if (t_last - t_first < window * (Scalar(1) - Scalar(1e-12)))
        throw Error(ErrorKind::InsufficientData, "trajectory shorter than the requested window");
    const auto it = std::lower_bound(
        traj.samples.begin(), traj.samples.end(), t_last - window * (Scalar(1) + Scalar(1e-12)),
        [](const ModeState<Scalar>& s, Scalar t) { return s.t < t; });
    const auto first = static_cast<std::size_t>(it - traj.samples.begin());
    if (traj.samples.size() - first < 3)
        throw Error(ErrorKind::InsufficientData, "window holds fewer than 3 samples");
    return first;
}
} // namespace detail

/// Least-squares slope of the unwrapped phase of alpha1 over the trailing
/// window. In the rotating frame alpha1 ~ e^{-i (omega - omega0) t}, so the
/// slope equals omega0 - omega.
template <typename Scalar>
Scalar fit_phase_slope(const Trajectory<Scalar>& traj, Scalar window) {
    const std::size_t first = detail::window_begin(traj, window);
    const auto n = static_cast<Eigen::Index>(traj.samples.size() - first);
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Mat design(n, 2);
    Vec phase(n);
    const Scalar t0 = traj.samples[first].t;
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar offset = Scalar(0);
    Scalar previous = Scalar(0);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& s = traj.samples[first + static_cast<std::size_t>(k)];
        using std::arg;
        const Scalar raw = arg(s.alpha1());
        if (k > 0) {
            Scalar jump = raw - previous;
            while (jump > std::numbers::pi_v<Scalar>) {
                offset -= two_pi;
                jump -= two_pi;
            }
            while (jump < -std::numbers::pi_v<Scalar>) {
                offset += two_pi;
                jump += two_pi;
            }
        }
        previous = raw;
        design(k, 0) = s.t - t0;
        design(k, 1) = Scalar(1);
        phase(k) = raw + offset;
    }
    const Eigen::Matrix<Scalar, 2, 1> coef = design.colPivHouseholderQr().solve(phase);
    return coef(0);
}

/// Emergent |omega - omega0| of the settled mode.
template <typename Scalar>
Scalar estimate_mode_frequency(const Trajectory<Scalar>& traj, Scalar window) {
    using std::abs;
    return abs(fit_phase_slope(traj, window));
}

struct SteadyStateReport {
    double n1 = 0;
    double n2 = 0;
    double g_sat = 0; ///< g0/(1+n1)
    double f_sat = 0; ///< f0/(1+n2)
    double detuning = 0;
    /// Sign of the fitted phase slope; the selected branch has
    /// omega - omega0 = -branch_sign * detuning. Zero when no rotation is resolved.
    int branch_sign = 0;
    std::optional<Regime> regime; ///< empty when g0 <= f0
    double eta = 0;
    double residual = 0;
    double drift = 0;
    double tolerance = 0;
};

/// Relative rates below this multiple of the rate scale count as "no rotation".
inline constexpr double kRotationFloor = 1e-9;

/// Checks that the trailing window of `traj` has settled and summarises it.
///
/// Drift is (max - min) of each photon number over the window relative to the
/// total photon number; the residual is the largest instantaneous |dn_i/dt|
/// over the window, relative to total photon number and the largest rate.
/// Both must be below `tol`, otherwise NotConvergedError carries the drift.
inline SteadyStateReport detect_steady_state(const Trajectory<double>& traj, const Params& p,
                                             double tol, double window,
                                             double ep_tol = kDefaultEpTolerance) {
    if (!(tol > 0))
        throw Error(ErrorKind::Parameter, "steady-state tolerance must be positive");
    const std::size_t first = detail::window_begin(traj, window);
    const double scale = rate_scale(p) > 0 ? rate_scale(p) : 1.0;

    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1;
    double lo2 = lo1, hi2 = -lo1;
    double sum1 = 0, sum2 = 0;
    double residual = 0;
    for (std::size_t k = first; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        const double n1 = s.n1(), n2 = s.n2();
        lo1 = std::min(lo1, n1);
        hi1 = std::max(hi1, n1);
        lo2 = std::min(lo2, n2);
        hi2 = std::max(hi2, n2);
        sum1 += n1;
        sum2 += n2;
        const Amplitudes<double> d = derivative(s.alpha, p);
        const double dn1 = 2 * std::real(std::conj(s.alpha(0)) * d(0));
        const double dn2 = 2 * std::real(std::conj(s.alpha(1)) * d(1));
        const double total = std::max(n1 + n2, kResidualFloor);
        residual = std::max(residual, std::max(std::abs(dn1), std::abs(dn2)) / (scale * total));
    }
    const double count = double(traj.samples.size() - first);
    const double mean_total = std::max((sum1 + sum2) / count, kResidualFloor);
    const double drift = std::max(hi1 - lo1, hi2 - lo2) / mean_total;
    if (!(drift < tol) || !(residual < tol))
        throw NotConvergedError(drift, "steady state not reached: drift=" + std::to_string(drift) +
                                           " residual=" + std::to_string(residual) +
                                           " tol=" + std::to_string(tol));

    SteadyStateReport r;
    const auto& last = traj.samples.back();
    r.n1 = last.n1();
    r.n2 = last.n2();
    r.g_sat = p.g0 / (1 + r.n1);
    r.f_sat = p.f0 / (1 + r.n2);
    r.residual = residual;
    r.drift = drift;
    r.tolerance = tol;

    const double slope = fit_phase_slope(traj, window);
    r.detuning = std::abs(slope);
    r.branch_sign = r.detuning > kRotationFloor * scale ? (slope > 0 ? 1 : -1) : 0;

    if (p.g0 > p.f0)
        r.regime = classify_regime(p, ep_tol);
    if (r.regime == Regime::PTBroken)
        r.eta = r.n1 > 0 && r.g_sat > 0 ? r.f_sat * r.n2 / (r.g_sat * r.n1) : 0.0;
    else
        r.eta = r.g_sat > 0 ? r.f_sat / r.g_sat : 0.0;
    return r;
}

} // namespace ptcav
