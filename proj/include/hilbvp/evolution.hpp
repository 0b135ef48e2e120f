#pragma once

// Block system x' = Bx + g with B = diag(B_k), B_k = [[0, w_k], [-w_k, 0]].
// Its evolution operator U(t) is a direct sum of 2x2 rotations and is only
// ever applied blockwise.

#include "hilbvp/common.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace hilbvp {

/// Uniform time grid on [0, period] together with the modal frequencies
/// w_k = sqrt(lambda_k). The resonant family has lambda_k = 4 pi^2 k^2 / period^2,
/// so w_k = k exactly when period = 2 pi.
class ModeGrid {
public:
    /// Resonant grid. `intervals` must be even and >= 2 (composite Simpson).
    explicit ModeGrid(int mode_count, int intervals = 256, double period = kTwoPi);

    /// Grid with an arbitrary positive frequency sequence (non-resonant case).
    static ModeGrid with_frequencies(std::vector<double> frequencies, int intervals,
                                     double period);

    [[nodiscard]] int mode_count() const noexcept { return static_cast<int>(frequencies_.size()); }
    [[nodiscard]] int dimension() const noexcept { return 2 * mode_count(); }
    [[nodiscard]] int intervals() const noexcept { return static_cast<int>(times_.size()) - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] double period() const noexcept { return times_.back(); }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] double time(std::size_t i) const { return times_.at(i); }

    /// Frequency of mode k, 1-based.
    [[nodiscard]] double frequency(int k) const { return frequencies_.at(static_cast<std::size_t>(k - 1)); }
    [[nodiscard]] const std::vector<double>& frequencies() const noexcept { return frequencies_; }

    /// Index of the grid point closest to t (t is clamped to [0, period]).
    [[nodiscard]] std::size_t nearest_index(double t) const noexcept;

    /// True when t lies on a grid point up to a relative snap tolerance.
    [[nodiscard]] bool on_grid(double t) const noexcept;

    [[nodiscard]] bool operator==(const ModeGrid&) const = default;

private:
    ModeGrid(std::vector<double> frequencies, int intervals, double period, bool);

    std::vector<double> frequencies_;
    std::vector<double> times_;
    double step_ = 0.0;
};

/// U(t) = diag(U_k(t)), U_k(t) = [[cos w_k t, sin w_k t], [-sin w_k t, cos w_k t]].
class BlockRotationOperator {
public:
    BlockRotationOperator(double t, std::span<const double> frequencies);

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] int mode_count() const noexcept { return static_cast<int>(cos_.size()); }

    [[nodiscard]] SpectralVector apply(const SpectralVector& v) const;
    /// U(t)^{-1} v = U(-t) v = U(t)^T v.
    [[nodiscard]] SpectralVector apply_inverse(const SpectralVector& v) const;
    /// Applies U(t) to each column.
    [[nodiscard]] Matrix apply(const Matrix& m) const;
    [[nodiscard]] Matrix apply_inverse(const Matrix& m) const;

    /// Dense 2M x 2M matrix; for diagnostics and tests only.
    [[nodiscard]] Matrix to_dense() const;

private:
    double time_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Resonant frequencies w_k = k, k = 1..M.
[[nodiscard]] std::vector<double> resonant_frequencies(int mode_count);

[[nodiscard]] SpectralVector apply_evolution(double t, const SpectralVector& v, int mode_count);
[[nodiscard]] SpectralVector apply_evolution(double t, const SpectralVector& v,
                                             std::span<const double> frequencies);
[[nodiscard]] SpectralVector apply_evolution_inverse(double t, const SpectralVector& v,
                                                     int mode_count);
[[nodiscard]] SpectralVector apply_evolution_inverse(double t, const SpectralVector& v,
                                                     std::span<const double> frequencies);

/// B v, blockwise.
[[nodiscard]] SpectralVector apply_generator(const SpectralVector& v,
                                             std::span<const double> frequencies);

/// Values of a vector-valued function at every grid point.
using Samples = std::vector<SpectralVector>;

struct Trajectory {
    ModeGrid grid;
    Samples samples;

    [[nodiscard]] static Trajectory zeros(const ModeGrid& grid);
    [[nodiscard]] const SpectralVector& front() const { return samples.front(); }
    [[nodiscard]] const SpectralVector& back() const { return samples.back(); }

    /// max_i ||a_i - b_i||_2 over the grid.
    [[nodiscard]] double sup_distance(const Trajectory& other) const;
    /// max_i ||a_i||_2 over the grid.
    [[nodiscard]] double sup_norm() const;
    /// max_i |x_k(t_i)| for mode k (1-based).
    [[nodiscard]] double mode_amplitude(int k) const;

    /// Value at arbitrary t; exact on grid points, cubic Lagrange otherwise.
    [[nodiscard]] SpectralVector evaluate(double t) const;
};

[[nodiscard]] Trajectory operator+(const Trajectory& a, const Trajectory& b);
[[nodiscard]] Trajectory operator-(const Trajectory& a, const Trajectory& b);
[[nodiscard]] Trajectory operator*(double s, const Trajectory& a);

// --- quadrature on the uniform grid ---------------------------------------

/// Composite Simpson over [0, h * (n - 1)], n odd.
[[nodiscard]] double simpson(double h, std::span<const double> values);
[[nodiscard]] Vector simpson(double h, const Samples& values);

/// Running integral I_i = int_0^{t_i} f. Even nodes carry exact composite
/// Simpson sums; odd nodes add a fourth-order cubic panel to the previous node.
[[nodiscard]] Samples cumulative_integral(double h, const Samples& values);

/// Values U(-t_i) g_i, i.e. the integrand of the variation-of-constants formula.
[[nodiscard]] Samples pull_back(const ModeGrid& grid, const Samples& g);

/// int_0^{t_i} U(t_i - tau) g(tau) dtau at every grid point.
[[nodiscard]] Samples duhamel_integral(const ModeGrid& grid, const Samples& g);

/// x(t) = U(t) c + int_0^t U(t - tau) g(tau) dtau. An empty `g` means zero forcing.
[[nodiscard]] Trajectory inhomogeneous_solution(const SpectralVector& c, const Samples& g,
                                                const ModeGrid& grid);

/// H(t, x); used by the residual check and the iterative solvers.
using NonlinearityFn = std::function<SpectralVector(double t, const SpectralVector& x)>;

/// max over interior grid points of ||x'(t) - Bx - eps H(t, x) - g(t)||_inf, with x'
/// from central differences. Empty `g` and `h` are treated as zero.
[[nodiscard]] double residual_ode(const Trajectory& traj, const Samples& g, double eps,
                                  const NonlinearityFn& h = {});

/// CSV with header `t,x_1,y_1,...,x_M,y_M`, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace hilbvp
