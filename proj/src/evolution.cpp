#include "hilbvp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace hilbvp {
namespace {

constexpr double kSnapFraction = 1e-9;

void check_frequencies(std::span<const double> frequencies) {
    detail::require(!frequencies.empty(), "mode count must be positive");
    for (double w : frequencies) {
        detail::require(std::isfinite(w) && w > 0.0, "frequencies must be positive and finite");
    }
}

}  // namespace

ModeGrid::ModeGrid(int mode_count, int intervals, double period)
    : ModeGrid(
          [&] {
              detail::require(mode_count >= 1, "mode count must be positive");
              detail::require(std::isfinite(period) && period > 0.0, "period must be positive");
              std::vector<double> w(static_cast<std::size_t>(mode_count));
              for (int k = 1; k <= mode_count; ++k) {
                  // lambda_k = 4 pi^2 k^2 / period^2; exact integers for the 2 pi case.
                  w[static_cast<std::size_t>(k - 1)] =
                      period == kTwoPi ? static_cast<double>(k) : kTwoPi * k / period;
              }
              return w;
          }(),
          intervals, period, true) {}

ModeGrid ModeGrid::with_frequencies(std::vector<double> frequencies, int intervals,
                                    double period) {
    return ModeGrid(std::move(frequencies), intervals, period, true);
}

ModeGrid::ModeGrid(std::vector<double> frequencies, int intervals, double period, bool)
    : frequencies_(std::move(frequencies)) {
    check_frequencies(frequencies_);
    detail::require(std::isfinite(period) && period > 0.0, "period must be positive");
    detail::require(intervals >= 2, "grid needs at least 3 points");
    detail::require(intervals % 2 == 0, "grid interval count must be even (Simpson rule)");
    step_ = period / intervals;
    times_.resize(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i < intervals; ++i) times_[static_cast<std::size_t>(i)] = i * step_;
    times_.back() = period;
}

std::size_t ModeGrid::nearest_index(double t) const noexcept {
    const double clamped = std::clamp(t, 0.0, period());
    const auto i = static_cast<long>(std::lround(clamped / step_));
    return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(intervals())));
}

bool ModeGrid::on_grid(double t) const noexcept {
    if (t < -kSnapFraction * step_ || t > period() + kSnapFraction * step_) return false;
    return std::abs(times_[nearest_index(t)] - t) <= kSnapFraction * step_;
}

// --- BlockRotationOperator -------------------------------------------------

BlockRotationOperator::BlockRotationOperator(double t, std::span<const double> frequencies)
    : time_(t), cos_(frequencies.size()), sin_(frequencies.size()) {
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const double angle = frequencies[k] * t;
        cos_[k] = std::cos(angle);
        sin_[k] = std::sin(angle);
    }
}

SpectralVector BlockRotationOperator::apply(const SpectralVector& v) const {
    detail::require_dimension(v.size(), 2 * static_cast<Eigen::Index>(cos_.size()),
                              "apply_evolution");
    SpectralVector out(v.size());
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        out[i] = cos_[k] * v[i] + sin_[k] * v[i + 1];
        out[i + 1] = -sin_[k] * v[i] + cos_[k] * v[i + 1];
    }
    return out;
}

SpectralVector BlockRotationOperator::apply_inverse(const SpectralVector& v) const {
    detail::require_dimension(v.size(), 2 * static_cast<Eigen::Index>(cos_.size()),
                              "apply_evolution_inverse");
    SpectralVector out(v.size());
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        out[i] = cos_[k] * v[i] - sin_[k] * v[i + 1];
        out[i + 1] = sin_[k] * v[i] + cos_[k] * v[i + 1];
    }
    return out;
}

Matrix BlockRotationOperator::apply(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j) = apply(SpectralVector(m.col(j)));
    return out;
}

Matrix BlockRotationOperator::apply_inverse(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.col(j) = apply_inverse(SpectralVector(m.col(j)));
    }
    return out;
}

Matrix BlockRotationOperator::to_dense() const {
    const auto n = 2 * static_cast<Eigen::Index>(cos_.size());
    Matrix u = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        u(i, i) = cos_[k];
        u(i, i + 1) = sin_[k];
        u(i + 1, i) = -sin_[k];
        u(i + 1, i + 1) = cos_[k];
    }
    return u;
}

std::vector<double> resonant_frequencies(int mode_count) {
    detail::require(mode_count >= 1, "mode count must be positive");
    std::vector<double> w(static_cast<std::size_t>(mode_count));
    for (int k = 1; k <= mode_count; ++k) w[static_cast<std::size_t>(k - 1)] = k;
    return w;
}

SpectralVector apply_evolution(double t, const SpectralVector& v, int mode_count) {
    return BlockRotationOperator(t, resonant_frequencies(mode_count)).apply(v);
}

SpectralVector apply_evolution(double t, const SpectralVector& v,
                               std::span<const double> frequencies) {
    return BlockRotationOperator(t, frequencies).apply(v);
}

SpectralVector apply_evolution_inverse(double t, const SpectralVector& v, int mode_count) {
    return BlockRotationOperator(t, resonant_frequencies(mode_count)).apply_inverse(v);
}

SpectralVector apply_evolution_inverse(double t, const SpectralVector& v,
                                       std::span<const double> frequencies) {
    return BlockRotationOperator(t, frequencies).apply_inverse(v);
}

SpectralVector apply_generator(const SpectralVector& v, std::span<const double> frequencies) {
    detail::require_dimension(v.size(), 2 * static_cast<Eigen::Index>(frequencies.size()),
                              "apply_generator");
    SpectralVector out(v.size());
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        out[i] = frequencies[k] * v[i + 1];
        out[i + 1] = -frequencies[k] * v[i];
    }
    return out;
}

// --- Trajectory --------------------------------------------------------------

Trajectory Trajectory::zeros(const ModeGrid& grid) {
    return {grid, Samples(grid.size(), SpectralVector::Zero(grid.dimension()))};
}

double Trajectory::sup_distance(const Trajectory& other) const {
    detail::require(samples.size() == other.samples.size(), "trajectories on different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        d = std::max(d, (samples[i] - other.samples[i]).norm());
    }
    return d;
}

double Trajectory::sup_norm() const {
    double d = 0.0;
    for (const auto& s : samples) d = std::max(d, s.norm());
    return d;
}

double Trajectory::mode_amplitude(int k) const {
    detail::require(k >= 1 && k <= grid.mode_count(), "mode index out of range");
    double a = 0.0;
    for (const auto& s : samples) a = std::max(a, std::abs(s[2 * (k - 1)]));
    return a;
}

SpectralVector Trajectory::evaluate(double t) const {
    if (grid.on_grid(t)) return samples[grid.nearest_index(t)];
    detail::require(t > 0.0 && t < grid.period(), "evaluation time outside the grid");
    const double h = grid.step();
    const long n = grid.intervals();
    long base = static_cast<long>(std::floor(t / h)) - 1;
    base = n >= 3 ? std::clamp(base, 0L, n - 3) : 0L;
    const long count = std::min(4L, n + 1);
    SpectralVector out = SpectralVector::Zero(grid.dimension());
    for (long a = 0; a < count; ++a) {
        double w = 1.0;
        const double ta = (base + a) * h;
        for (long b = 0; b < count; ++b) {
            if (b != a) w *= (t - (base + b) * h) / (ta - (base + b) * h);
        }
        out += w * samples[static_cast<std::size_t>(base + a)];
    }
    return out;
}

Trajectory operator+(const Trajectory& a, const Trajectory& b) {
    detail::require(a.samples.size() == b.samples.size(), "trajectories on different grids");
    Trajectory out = a;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += b.samples[i];
    return out;
}

Trajectory operator-(const Trajectory& a, const Trajectory& b) {
    detail::require(a.samples.size() == b.samples.size(), "trajectories on different grids");
    Trajectory out = a;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= b.samples[i];
    return out;
}

Trajectory operator*(double s, const Trajectory& a) {
    Trajectory out = a;
    for (auto& v : out.samples) v *= s;
    return out;
}

// --- quadrature --------------------------------------------------------------

double simpson(double h, std::span<const double> values) {
    const std::size_t n = values.size();
    detail::require(n >= 3 && n % 2 == 1, "Simpson rule needs an odd number of points >= 3");
    double sum = values.front() + values.back();
    for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
    return sum * h / 3.0;
}

Vector simpson(double h, const Samples& values) {
    const std::size_t n = values.size();
    detail::require(n >= 3 && n % 2 == 1, "Simpson rule needs an odd number of points >= 3");
    Vector sum = values.front() + values.back();
    for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
    return sum * (h / 3.0);
}

Samples cumulative_integral(double h, const Samples& f) {
    const std::size_t n = f.size();
    detail::require(n >= 3 && n % 2 == 1, "cumulative integral needs an odd number of points >= 3");
    Samples out(n, Vector::Zero(f.front().size()));
    for (std::size_t i = 2; i < n; i += 2) {
        out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    }
    for (std::size_t i = 1; i < n; i += 2) {
        Vector panel;
        if (i >= 2) {
            panel = (h / 24.0) * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1]);
        } else if (n >= 4) {
            panel = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else {
            panel = (h / 12.0) * (5.0 * f[0] + 8.0 * f[1] - f[2]);
        }
        out[i] = out[i - 1] + panel;
    }
    return out;
}

Samples pull_back(const ModeGrid& grid, const Samples& g) {
    detail::require(g.size() == grid.size(), "forcing must be sampled on every grid point");
    Samples out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        detail::require_dimension(g[i].size(), grid.dimension(), "forcing sample");
        out[i] = BlockRotationOperator(grid.time(i), grid.frequencies()).apply_inverse(g[i]);
    }
    return out;
}

Samples duhamel_integral(const ModeGrid& grid, const Samples& g) {
    Samples acc = cumulative_integral(grid.step(), pull_back(grid, g));
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] = BlockRotationOperator(grid.time(i), grid.frequencies()).apply(acc[i]);
    }
    return acc;
}

Trajectory inhomogeneous_solution(const SpectralVector& c, const Samples& g,
                                  const ModeGrid& grid) {
    detail::require_dimension(c.size(), grid.dimension(), "initial constant");
    Trajectory out{grid, Samples(grid.size())};
    if (g.empty()) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out.samples[i] = BlockRotationOperator(grid.time(i), grid.frequencies()).apply(c);
        }
        return out;
    }
    const Samples acc = cumulative_integral(grid.step(), pull_back(grid, g));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.samples[i] =
            BlockRotationOperator(grid.time(i), grid.frequencies()).apply(SpectralVector(c + acc[i]));
    }
    return out;
}

double residual_ode(const Trajectory& traj, const Samples& g, double eps,
                    const NonlinearityFn& h) {
    const ModeGrid& grid = traj.grid;
    detail::require(traj.samples.size() == grid.size(), "trajectory/grid size mismatch");
    detail::require(g.empty() || g.size() == grid.size(), "forcing/grid size mismatch");
    const double step = grid.step();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const SpectralVector& x = traj.samples[i];
        detail::require_dimension(x.size(), grid.dimension(), "trajectory sample");
        SpectralVector r = (traj.samples[i + 1] - traj.samples[i - 1]) / (2.0 * step) -
                           apply_generator(x, grid.frequencies());
        if (!g.empty()) r -= g[i];
        if (h && eps != 0.0) r -= eps * h(grid.time(i), x);
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << 't';
    for (int k = 1; k <= traj.grid.mode_count(); ++k) out << ",x_" << k << ",y_" << k;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.grid.time(i));
        out << buf;
        for (Eigen::Index j = 0; j < traj.samples[i].size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.samples[i][j]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace hilbvp
