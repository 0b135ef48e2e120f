#pragma once

// Abstract van der Pol equation y'' + T y = eps (1 - ||y||^2) y' in modal form:
//   x_k' = k y_k,  y_k' = -k x_k + eps H_k,  H_k = (1/k)(1 - sum_j x_j^2) y_k,
// with 2 pi periodic boundary conditions.

#include "hilbvp/evolution.hpp"

#include <span>
#include <vector>

namespace hilbvp {

inline constexpr double kAmplitudeTol = 1e-10;

/// Generating constants c = (c1^k, c2^k), k = 1..M, stored interleaved.
class AmplitudePairs {
public:
    explicit AmplitudePairs(int mode_count);
    [[nodiscard]] static AmplitudePairs from_vector(const SpectralVector& v);

    [[nodiscard]] int mode_count() const noexcept { return static_cast<int>(coeffs_.size() / 2); }
    [[nodiscard]] double c1(int k) const { return coeffs_[index(k)]; }
    [[nodiscard]] double c2(int k) const { return coeffs_[index(k) + 1]; }
    void set(int k, double c1, double c2);
    [[nodiscard]] const SpectralVector& to_vector() const noexcept { return coeffs_; }

    /// Modes (1-based, ascending) whose pair is not (0, 0).
    [[nodiscard]] std::vector<int> active_set() const;
    /// Every active pair has c1^2 + c2^2 = 4 / (2N - 1) to `tol`. The zero
    /// vector (N = 0) counts as on the torus.
    [[nodiscard]] bool on_torus(double tol = kAmplitudeTol) const;

private:
    [[nodiscard]] Eigen::Index index(int k) const;
    SpectralVector coeffs_;
};

/// a = 2 / sqrt(2N - 1)
[[nodiscard]] double torus_amplitude(int active_count);

struct VdpConfig {
    double epsilon = 0.0;
    ModeGrid grid{1};
    /// 1-based active modes.
    std::vector<int> active{1};
    /// One phase per active mode; empty means all zero.
    std::vector<double> phases;
};

/// Checks 0 <= eps < 1, a resonant 2 pi grid, and the active/phase lists.
/// Warns when eps > 0.2.
void validate(const VdpConfig& config);

/// col(0, H_1, 0, H_2, ...) with H_k = (1/k)(1 - sum_j x_j^2) y_k.
[[nodiscard]] SpectralVector nonlinearity_H(const SpectralVector& state, int mode_count);
/// Same with 1/k replaced by 1/w_k.
[[nodiscard]] SpectralVector nonlinearity_H(const SpectralVector& state,
                                            std::span<const double> frequencies);
/// dH/dx at `state`.
[[nodiscard]] Matrix nonlinearity_jacobian(const SpectralVector& state,
                                           std::span<const double> frequencies);
/// R(z) = H(z + z0) - H(z0) - H'(z0) z.
[[nodiscard]] SpectralVector remainder_R(const SpectralVector& z, const SpectralVector& z0,
                                         std::span<const double> frequencies);

/// F(c) = int_0^{2 pi} U^{-1}(tau) H(U(tau) c) dtau by composite Simpson.
/// `intervals` = 0 picks max(256, 16 M), enough to integrate the trigonometric
/// integrand exactly up to rounding.
[[nodiscard]] Vector generating_F(const AmplitudePairs& c, int intervals = 0);

/// F_1^k = -(pi c1^k / 4k)(2 sum_j |c^j|^2 - |c^k|^2 - 4), F_2^k likewise with c2^k.
[[nodiscard]] Vector generating_F_closed(const AmplitudePairs& c);

/// (c1, c2) = a (cos theta_i, sin theta_i) on the active modes, zero elsewhere.
/// An empty active set returns the zero vector with a warning.
[[nodiscard]] AmplitudePairs generating_torus(int mode_count, const std::vector<int>& active,
                                              const std::vector<double>& phases = {});

/// B0 = -(pi/2) {(1/k) c^k c^k^T on the diagonal, (2/k) c^k c^j^T off it}
/// over the active modes, zero elsewhere.
[[nodiscard]] Matrix jacobian_B0_closed(const AmplitudePairs& c0);

/// Central differences of generating_F_closed. `step` <= 0 picks 1e-6 (1 + ||c0||).
[[nodiscard]] Matrix jacobian_B0_fd(const AmplitudePairs& c0, double step = 0.0);

struct B0Factors {
    Matrix v1;
    Matrix w;
    Matrix v2;
    /// max-abs of V1 W V2 - jacobian_B0_closed(c0)
    double discrepancy = 0.0;
};

/// V1 = diag(c^k / k), V2 = diag(c^k), W = -(pi/2) {W_1 on the diagonal, W_2 off it}
/// on the active blocks, W_j = j [[1, 1], [1, 1]].
[[nodiscard]] B0Factors factorize_B0(const AmplitudePairs& c0);

/// z0(t) = U(t) c on the grid.
[[nodiscard]] Trajectory generating_solution(const AmplitudePairs& c, const ModeGrid& grid);

struct RhsB {
    Vector b;
    Vector b1;
    Vector b2;
};

/// b = eps b1 + b2 with
///   b1 = int U^{-1}(tau) H'(z0(tau)) int_0^tau U(tau - s) H(z(s) + z0(s)) ds dtau,
///   b2 = int U^{-1}(tau) R(z(tau)) dtau,
/// z0 the generating solution of c0 on z's grid.
[[nodiscard]] RhsB rhs_b(const Trajectory& z, const AmplitudePairs& c0, double eps);

/// int_0^{2 pi} U^{-1}(tau) v(tau) dtau for samples on a 2 pi grid.
[[nodiscard]] Vector pulled_back_integral(const ModeGrid& grid, const Samples& v);

}  // namespace hilbvp
