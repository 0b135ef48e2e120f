#pragma once

// Brute-force reference for the truncated van der Pol system: fixed-step RK4
// and a shooting method for its periodic orbits.

#include "hilbvp/evolution.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hilbvp {

struct IntegratorConfig {
    double step = 1e-3;
    double t_end = kTwoPi;
};

using VectorField = std::function<SpectralVector(double t, const SpectralVector& x)>;

/// One classical RK4 step.
[[nodiscard]] SpectralVector rk4_step(const VectorField& f, double t, const SpectralVector& x,
                                      double h);

/// x_k' = w_k y_k,  y_k' = -w_k x_k + (eps / w_k)(1 - sum_j x_j^2) y_k.
[[nodiscard]] VectorField vdp_vector_field(double eps, std::vector<double> frequencies);

/// RK4 trajectory on [0, t_end]. The step count is the smallest even integer
/// with t_end / count <= step, so the result lives on a uniform ModeGrid.
/// Empty `frequencies` means w_k = k. Requires w_max * step < 0.5.
/// Throws NumericalError when the state norm exceeds 1e6.
[[nodiscard]] Trajectory integrate(const SpectralVector& state0, double eps,
                                   const IntegratorConfig& cfg,
                                   std::span<const double> frequencies = {});

/// End point of `steps` RK4 steps over [0, t_end].
[[nodiscard]] SpectralVector flow(const SpectralVector& state0, double eps, double t_end,
                                  int steps, std::span<const double> frequencies = {});

inline constexpr double kShootingTol = 1e-9;

struct PeriodicOrbit {
    SpectralVector initial_state;
    double period = kTwoPi;
    /// max_t |x_k(t)| over one period.
    std::vector<double> amplitude_per_mode;
    /// ||phi_T(s) - s||
    double residual = 0.0;
    int newton_steps = 0;
    /// Mode whose y-component is pinned to zero at t = 0.
    int phase_mode = 1;
};

/// Newton iteration on (s, T) for phi_T(s) = s with the section y_{k1}(0) = 0,
/// k1 the mode of largest amplitude in the guess. The Jacobian is built by
/// central differences with step 1e-6. A guess that is already periodic over
/// 2 pi to kShootingTol is accepted as is. Throws NumericalError after 50
/// Newton steps without convergence.
[[nodiscard]] PeriodicOrbit shoot_periodic(const SpectralVector& guess, double eps,
                                           const IntegratorConfig& cfg = {},
                                           std::span<const double> frequencies = {});

/// Minimum over discrete time shifts of the sup-norm distance between the
/// solver trajectory and the oracle orbit sampled at the solver's spacing.
[[nodiscard]] double compare(const Trajectory& solver_traj, const PeriodicOrbit& orbit,
                             double eps, const IntegratorConfig& cfg = {});

}  // namespace hilbvp
