#include "hilbvp/vdp.hpp"

#include "hilbvp/pseudoinverse.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hilbvp {
namespace {

void require_resonant_2pi(const ModeGrid& grid) {
    detail::require(grid.period() == kTwoPi, "van der Pol problems need period 2 pi");
    for (int k = 1; k <= grid.mode_count(); ++k) {
        detail::require(grid.frequency(k) == static_cast<double>(k),
                        "van der Pol problems need resonant frequencies w_k = k");
    }
}

}  // namespace

// --- AmplitudePairs ----------------------------------------------------------

AmplitudePairs::AmplitudePairs(int mode_count) {
    detail::require(mode_count >= 1, "mode count must be positive");
    coeffs_ = SpectralVector::Zero(2 * mode_count);
}

AmplitudePairs AmplitudePairs::from_vector(const SpectralVector& v) {
    detail::require(v.size() >= 2 && v.size() % 2 == 0,
                    "amplitude vector must have positive even length");
    detail::require(v.allFinite(), "amplitude vector has non-finite entries");
    AmplitudePairs out(static_cast<int>(v.size() / 2));
    out.coeffs_ = v;
    return out;
}

Eigen::Index AmplitudePairs::index(int k) const {
    if (k < 1 || k > mode_count()) {
        throw std::invalid_argument("mode index " + std::to_string(k) + " outside 1.." +
                                    std::to_string(mode_count()));
    }
    return 2 * (k - 1);
}

void AmplitudePairs::set(int k, double c1, double c2) {
    detail::require(std::isfinite(c1) && std::isfinite(c2), "amplitudes must be finite");
    coeffs_[index(k)] = c1;
    coeffs_[index(k) + 1] = c2;
}

std::vector<int> AmplitudePairs::active_set() const {
    std::vector<int> out;
    for (int k = 1; k <= mode_count(); ++k) {
        if (c1(k) != 0.0 || c2(k) != 0.0) out.push_back(k);
    }
    return out;
}

bool AmplitudePairs::on_torus(double tol) const {
    const std::vector<int> active = active_set();
    if (active.empty()) return true;
    const double a = torus_amplitude(static_cast<int>(active.size()));
    return std::all_of(active.begin(), active.end(), [&](int k) {
        return std::abs(c1(k) * c1(k) + c2(k) * c2(k) - a * a) <= tol;
    });
}

double torus_amplitude(int active_count) {
    detail::require(active_count >= 1, "torus needs at least one active mode");
    return 2.0 / std::sqrt(2.0 * active_count - 1.0);
}

void validate(const VdpConfig& config) {
    detail::require(std::isfinite(config.epsilon) && config.epsilon >= 0.0 && config.epsilon < 1.0,
                    "epsilon must satisfy 0 <= epsilon < 1");
    if (config.epsilon > 0.2) {
        warn("epsilon > 0.2 is outside the weakly nonlinear regime; convergence is not expected");
    }
    require_resonant_2pi(config.grid);
    std::set<int> seen;
    for (int k : config.active) {
        detail::require(k >= 1 && k <= config.grid.mode_count(),
                        "active mode " + std::to_string(k) + " outside 1.." +
                            std::to_string(config.grid.mode_count()));
        detail::require(seen.insert(k).second, "active modes must be distinct");
    }
    detail::require(config.phases.empty() || config.phases.size() == config.active.size(),
                    "phases must list one angle per active mode");
}

// --- nonlinearity ------------------------------------------------------------

SpectralVector nonlinearity_H(const SpectralVector& state, int mode_count) {
    detail::require(mode_count >= 1, "mode count must be positive");
    return nonlinearity_H(state, resonant_frequencies(mode_count));
}

SpectralVector nonlinearity_H(const SpectralVector& state, std::span<const double> frequencies) {
    const auto m = static_cast<Eigen::Index>(frequencies.size());
    detail::require_dimension(state.size(), 2 * m, "nonlinearity_H: state");
    double sum_x2 = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) sum_x2 += state[2 * k] * state[2 * k];
    const double factor = 1.0 - sum_x2;
    SpectralVector out = SpectralVector::Zero(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        out[2 * k + 1] = factor * state[2 * k + 1] / frequencies[static_cast<std::size_t>(k)];
    }
    return out;
}

Matrix nonlinearity_jacobian(const SpectralVector& state, std::span<const double> frequencies) {
    const auto m = static_cast<Eigen::Index>(frequencies.size());
    detail::require_dimension(state.size(), 2 * m, "nonlinearity_jacobian: state");
    double sum_x2 = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) sum_x2 += state[2 * k] * state[2 * k];
    Matrix out = Matrix::Zero(2 * m, 2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double inv_w = 1.0 / frequencies[static_cast<std::size_t>(k)];
        const double yk = state[2 * k + 1];
        for (Eigen::Index j = 0; j < m; ++j) out(2 * k + 1, 2 * j) = -2.0 * inv_w * state[2 * j] * yk;
        out(2 * k + 1, 2 * k + 1) = inv_w * (1.0 - sum_x2);
    }
    return out;
}

SpectralVector remainder_R(const SpectralVector& z, const SpectralVector& z0,
                           std::span<const double> frequencies) {
    detail::require_dimension(z.size(), z0.size(), "remainder_R: z");
    return nonlinearity_H(SpectralVector(z + z0), frequencies) - nonlinearity_H(z0, frequencies) -
           nonlinearity_jacobian(z0, frequencies) * z;
}

// --- generating amplitudes ---------------------------------------------------

Vector generating_F(const AmplitudePairs& c, int intervals) {
    const int m = c.mode_count();
    const int p = intervals > 0 ? intervals : std::max(256, 16 * m);
    const ModeGrid grid(m, p + (p % 2));
    const std::vector<double>& w = grid.frequencies();
    Samples integrand(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const BlockRotationOperator u(grid.time(i), w);
        integrand[i] = u.apply_inverse(nonlinearity_H(u.apply(c.to_vector()), w));
    }
    return simpson(grid.step(), integrand);
}

Vector generating_F_closed(const AmplitudePairs& c) {
    const int m = c.mode_count();
    double total = 0.0;
    for (int j = 1; j <= m; ++j) total += c.c1(j) * c.c1(j) + c.c2(j) * c.c2(j);
    Vector out(2 * m);
    for (int k = 1; k <= m; ++k) {
        const double rk = c.c1(k) * c.c1(k) + c.c2(k) * c.c2(k);
        const double bracket = 2.0 * total - rk - 4.0;
        out[2 * (k - 1)] = -(kPi * c.c1(k) / (4.0 * k)) * bracket;
        out[2 * (k - 1) + 1] = -(kPi * c.c2(k) / (4.0 * k)) * bracket;
    }
    return out;
}

AmplitudePairs generating_torus(int mode_count, const std::vector<int>& active,
                                const std::vector<double>& phases) {
    AmplitudePairs out(mode_count);
    if (active.empty()) {
        warn("empty active set: returning the zero generating solution");
        return out;
    }
    detail::require(phases.empty() || phases.size() == active.size(),
                    "phases must list one angle per active mode");
    std::set<int> seen;
    const double a = torus_amplitude(static_cast<int>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) {
        const int k = active[i];
        detail::require(k >= 1 && k <= mode_count, "active mode " + std::to_string(k) +
                                                       " outside 1.." +
                                                       std::to_string(mode_count));
        detail::require(seen.insert(k).second, "active modes must be distinct");
        const double theta = phases.empty() ? 0.0 : phases[i];
        detail::require(std::isfinite(theta), "phases must be finite");
        out.set(k, a * std::cos(theta), a * std::sin(theta));
    }
    return out;
}

Matrix jacobian_B0_closed(const AmplitudePairs& c0) {
    const int m = c0.mode_count();
    const std::vector<int> active = c0.active_set();
    Matrix out = Matrix::Zero(2 * m, 2 * m);
    for (int k : active) {
        const Eigen::Vector2d ck(c0.c1(k), c0.c2(k));
        for (int j : active) {
            const Eigen::Vector2d cj(c0.c1(j), c0.c2(j));
            const double scale = (k == j ? 1.0 : 2.0) / k;
            out.block<2, 2>(2 * (k - 1), 2 * (j - 1)) = -(kPi / 2.0) * scale * ck * cj.transpose();
        }
    }
    return out;
}

Matrix jacobian_B0_fd(const AmplitudePairs& c0, double step) {
    const SpectralVector& c = c0.to_vector();
    const double h = step > 0.0 ? step : 1e-6 * (1.0 + c.norm());
    const Eigen::Index n = c.size();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        SpectralVector plus = c;
        SpectralVector minus = c;
        plus[j] += h;
        minus[j] -= h;
        out.col(j) = (generating_F_closed(AmplitudePairs::from_vector(plus)) -
                      generating_F_closed(AmplitudePairs::from_vector(minus))) /
                     (2.0 * h);
    }
    return out;
}

B0Factors factorize_B0(const AmplitudePairs& c0) {
    const int m = c0.mode_count();
    const std::vector<int> active = c0.active_set();
    B0Factors out;
    out.v1 = Matrix::Zero(2 * m, 2 * m);
    out.v2 = Matrix::Zero(2 * m, 2 * m);
    out.w = Matrix::Zero(2 * m, 2 * m);
    for (int k = 1; k <= m; ++k) {
        const Eigen::Index i = 2 * (k - 1);
        out.v1(i, i) = c0.c1(k) / k;
        out.v1(i + 1, i + 1) = c0.c2(k) / k;
        out.v2(i, i) = c0.c1(k);
        out.v2(i + 1, i + 1) = c0.c2(k);
    }
    for (int k : active) {
        for (int j : active) {
            out.w.block<2, 2>(2 * (k - 1), 2 * (j - 1)) = -(kPi / 2.0) * w_block(k == j ? 1.0 : 2.0);
        }
    }
    const Matrix product = out.v1 * out.w * out.v2;
    out.discrepancy = (product - jacobian_B0_closed(c0)).cwiseAbs().maxCoeff();
    return out;
}

Trajectory generating_solution(const AmplitudePairs& c, const ModeGrid& grid) {
    detail::require_dimension(c.to_vector().size(), grid.dimension(), "generating_solution: c");
    return inhomogeneous_solution(c.to_vector(), {}, grid);
}

Vector pulled_back_integral(const ModeGrid& grid, const Samples& v) {
    return simpson(grid.step(), pull_back(grid, v));
}

RhsB rhs_b(const Trajectory& z, const AmplitudePairs& c0, double eps) {
    const ModeGrid& grid = z.grid;
    require_resonant_2pi(grid);
    detail::require(z.samples.size() == grid.size(), "rhs_b: trajectory/grid size mismatch");
    detail::require_dimension(c0.to_vector().size(), grid.dimension(), "rhs_b: c0");
    const std::vector<double>& w = grid.frequencies();
    const Trajectory z0 = generating_solution(c0, grid);

    Samples forcing(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        forcing[i] = nonlinearity_H(SpectralVector(z.samples[i] + z0.samples[i]), w);
    }
    const Samples green = duhamel_integral(grid, forcing);

    Samples linear_part(grid.size());
    Samples remainder(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        linear_part[i] = nonlinearity_jacobian(z0.samples[i], w) * green[i];
        remainder[i] = remainder_R(z.samples[i], z0.samples[i], w);
    }
    RhsB out;
    out.b1 = pulled_back_integral(grid, linear_part);
    out.b2 = pulled_back_integral(grid, remainder);
    out.b = eps * out.b1 + out.b2;
    return out;
}

}  // namespace hilbvp
