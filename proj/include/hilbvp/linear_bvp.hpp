#pragma once

// Linear boundary-value problem x' = Bx + g(t), l(x) = alpha, reduced to the
// finite operator equation Q c = g1 and solved through the pseudoinverse of Q.

#include "hilbvp/evolution.hpp"
#include "hilbvp/pseudoinverse.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace hilbvp {

/// weight * x(time)
struct PointTerm {
    double time = 0.0;
    Matrix weight;
};

/// l(x) = sum_i W_i x(t_i) + int_0^w K(tau) x(tau) dtau, with target alpha.
struct BoundaryFunctional {
    std::vector<PointTerm> point_terms;
    /// Empty, or one matrix per grid point.
    std::vector<Matrix> integral_kernel;
    Vector target;
};

/// l(x) = x(0) - x(period), alpha = 0.
[[nodiscard]] BoundaryFunctional periodic_boundary(int mode_count, double period = kTwoPi);
/// l(x) = x(0), alpha = x0.
[[nodiscard]] BoundaryFunctional initial_value_boundary(const Vector& x0);

struct LinearBvpProblem {
    ModeGrid grid;
    /// One sample per grid point; empty means g = 0.
    Samples forcing;
    BoundaryFunctional boundary;
};

enum class ModalShape { kCos, kSin };

/// f_k(t) = amplitude * cos(frequency t) or amplitude * sin(frequency t).
struct ModalTerm {
    int mode = 1;
    ModalShape shape = ModalShape::kCos;
    double frequency = 1.0;
    double amplitude = 1.0;
};

/// Forcing of the second-order equation c_k'' + w_k^2 c_k = f_k in first-order
/// form: g = (0, f_1 / w_1, 0, f_2 / w_2, ...).
[[nodiscard]] Samples modal_forcing(const ModeGrid& grid, const std::vector<ModalTerm>& terms);

enum class Classification { kClassical, kPseudosolution };

[[nodiscard]] std::string_view to_string(Classification c) noexcept;

/// Q = l U(.) and g1 = alpha - l(int_0^. U(. - tau) g(tau) dtau).
struct BoundaryOperator {
    Matrix q;
    Vector g1;
};

[[nodiscard]] BoundaryOperator assemble_Q(const LinearBvpProblem& problem);

/// l applied to the zero-initial-value particular solution of x' = Bx + g.
/// Same evaluation rules as assemble_Q.
[[nodiscard]] Vector apply_boundary_to_particular(const BoundaryFunctional& boundary,
                                                  const ModeGrid& grid, const Samples& g);

/// l(x) for a sampled trajectory (cubic interpolation between grid points).
[[nodiscard]] Vector apply_boundary(const BoundaryFunctional& boundary, const Trajectory& x);

struct LinearSolveResult {
    Classification classification = Classification::kClassical;
    /// Q^+ g1
    SpectralVector particular;
    /// Orthonormal columns spanning N(Q).
    Matrix kernel_basis;
    /// ||(I - Q Q^+) g1||
    double residual = 0.0;
    /// U(t) Q^+ g1 + int_0^t U(t - tau) g(tau) dtau
    Trajectory green_trajectory{ModeGrid(1, 2), {}};
    Matrix q;
    Vector g1;
    PinvResult q_pinv;
    double consistency_tol = kDefaultConsistencyTol;
};

/// Without rank_tol, singular values below max(rows, cols) * eps * max(sigma_max,
/// sum of boundary weight norms) count as zero.
[[nodiscard]] LinearSolveResult solve_linear(const LinearBvpProblem& problem,
                                             std::optional<double> rank_tol = std::nullopt,
                                             double consistency_tol = kDefaultConsistencyTol);

/// U(t) P_N(Q) h + green_trajectory(t).
[[nodiscard]] Trajectory full_solution(const LinearSolveResult& result, const SpectralVector& h);

/// ||l(x) - alpha||
[[nodiscard]] double boundary_residual(const BoundaryFunctional& boundary, const Trajectory& x);

}  // namespace hilbvp
