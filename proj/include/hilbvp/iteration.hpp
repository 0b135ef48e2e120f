#pragma once

// Fixed-point iteration for weakly nonlinear problems x' = Bx + g + eps H(t, x)
// branching from a generating solution x0(t, c0).

#include "hilbvp/linear_bvp.hpp"
#include "hilbvp/vdp.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hilbvp {

/// Sign of the amplitude correction c^m = s B0^+ b^m in the van der Pol path.
enum class CorrectionSign {
    /// c^m = -B0^+ b^m. This is the sign that makes U(t) c^m cancel the
    /// periodicity defect when B0 is the Jacobian of F.
    kConsistent,
    /// c^m = +B0^+ b^m, kept for comparison.
    kAsPrinted,
};

struct IterationState {
    int m = 0;
    SpectralVector c;
    const Trajectory* z_bar = nullptr;
    const Trajectory* z = nullptr;
    double delta = 0.0;
    double residual = 0.0;
};

struct IterationRecord {
    int m = 0;
    double delta = 0.0;
    double residual = 0.0;
};

struct IterationOptions {
    double tol = 1e-10;
    int max_iter = 200;
    double consistency_tol = kDefaultConsistencyTol;
    std::optional<double> rank_tol;
    CorrectionSign sign = CorrectionSign::kConsistent;
    /// Abort after this many consecutive growths of delta.
    int divergence_window = 5;
    std::function<void(const IterationState&)> observer;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_delta = 0.0;
    double ode_residual = 0.0;
    /// ||l(x) - alpha||; for the periodic problem ||x(0) - x(2 pi)||.
    double boundary_residual = 0.0;
    /// kClassical when the correction equation B0 c = b is solvable.
    Classification classification = Classification::kClassical;
    /// x = z + z0
    Trajectory trajectory{ModeGrid(1, 2), {}};
    Trajectory generating{ModeGrid(1, 2), {}};
    std::vector<int> active_modes;
    /// max_t |x_k(t)| for each active mode.
    std::vector<double> amplitude_check;
    std::vector<IterationRecord> history;
    SpectralVector c;
    Vector b;
    /// ||(I - B0 B0^+) b|| at the last iterate.
    double cokernel_norm = 0.0;
    /// max-abs difference between the factored and the direct pseudoinverse of B0.
    double pinv_discrepancy = 0.0;
    bool exact_generating = false;
    double epsilon = 0.0;
    double tol = 0.0;
    std::string diagnostic;
};

/// Fixed-point iteration for the periodic van der Pol problem:
///   z^{m+1} = U(t) c^m + zbar^{m+1},  c^m = s B0^+ (eps b1^m + b2^m),
///   zbar^{m+1} = eps int_0^t U(t - tau) H(z^m + z0) dtau,  z^0 = 0,
/// with B0 the closed-form Jacobian at c0, frozen across iterations.
/// Throws std::invalid_argument for an off-torus c0 and NumericalError on divergence.
[[nodiscard]] SolveReport iterate_vdp(const VdpConfig& config, const AmplitudePairs& c0,
                                      const IterationOptions& options = {});

struct Nonlinearity {
    NonlinearityFn value;
    /// dH/dx; central differences are used when empty.
    std::function<Matrix(double, const SpectralVector&)> jacobian;
};

/// The van der Pol nonlinearity for the given frequencies.
[[nodiscard]] Nonlinearity vdp_nonlinearity(std::vector<double> frequencies);

/// General iteration for x' = Bx + g + eps H(t, x), l(x) = alpha:
///   y_{k+1} = U(t) P_N c_k + ybar_{k+1},
///   c_k = -B0^+ P_H l int U(.) U^{-1} (H'(x0) ybar_k + R(y_k)),
///   ybar_{k+1} = eps G[H(y_k + x0), 0],  y_0 = ybar_0 = 0,
/// with x0 = U(t) P_N h0 + G[g, alpha]. Requires the generating problem to be
/// solvable and h0 to solve the generating equation.
[[nodiscard]] SolveReport iterate_general(const LinearBvpProblem& problem,
                                          const Nonlinearity& nonlinearity,
                                          const SpectralVector& h0, double eps,
                                          const IterationOptions& options = {});

}  // namespace hilbvp
