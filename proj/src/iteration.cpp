#include "hilbvp/iteration.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace hilbvp {
namespace {

void check_options(const IterationOptions& options) {
    detail::require(std::isfinite(options.tol) && options.tol > 0.0, "tol must be positive");
    detail::require(options.max_iter >= 1, "max_iter must be at least 1");
    detail::require(options.divergence_window >= 1, "divergence window must be at least 1");
    detail::require(options.consistency_tol >= 0.0, "consistency tolerance must be non-negative");
}

// Tracks consecutive growth of delta and aborts on divergence.
class DivergenceGuard {
public:
    explicit DivergenceGuard(int window) : window_(window) {}

    void observe(int m, double delta) {
        if (!std::isfinite(delta)) {
            throw NumericalError("iteration " + std::to_string(m) + " produced a non-finite update");
        }
        growths_ = (m > 1 && delta > previous_) ? growths_ + 1 : 0;
        previous_ = delta;
        if (growths_ >= window_) {
            std::ostringstream msg;
            msg << "iteration diverged: delta grew for " << window_
                << " consecutive iterations (delta = " << delta << " at m = " << m << ")";
            throw NumericalError(msg.str());
        }
    }

private:
    int window_;
    int growths_ = 0;
    double previous_ = 0.0;
};

Matrix fd_jacobian(const NonlinearityFn& h, double t, const SpectralVector& x) {
    const Eigen::Index n = x.size();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double step = 1e-6 * (1.0 + std::abs(x[j]));
        SpectralVector plus = x;
        SpectralVector minus = x;
        plus[j] += step;
        minus[j] -= step;
        out.col(j) = (h(t, plus) - h(t, minus)) / (2.0 * step);
    }
    return out;
}

void finish_amplitudes(SolveReport& report) {
    for (int k = 1; k <= report.trajectory.grid.mode_count(); ++k) {
        if (report.generating.mode_amplitude(k) > 0.0) {
            report.active_modes.push_back(k);
            report.amplitude_check.push_back(report.trajectory.mode_amplitude(k));
        }
    }
}

}  // namespace

SolveReport iterate_vdp(const VdpConfig& config, const AmplitudePairs& c0,
                        const IterationOptions& options) {
    validate(config);
    check_options(options);
    const ModeGrid& grid = config.grid;
    detail::require_dimension(c0.to_vector().size(), grid.dimension(), "iterate_vdp: c0");
    if (!c0.on_torus()) {
        throw std::invalid_argument(
            "c0 is not on the generating torus: active pairs must satisfy "
            "c1^2 + c2^2 = 4/(2N-1)");
    }
    const double eps = config.epsilon;
    const std::vector<double>& w = grid.frequencies();

    const Matrix b0 = jacobian_B0_closed(c0);
    const B0Factors factors = factorize_B0(c0);
    const FactoredPinv factored = factored_pinv(factors.v1, factors.w, factors.v2);
    const PinvResult direct = pinv(b0, options.rank_tol);
    Matrix b0_pinv = factored.value;
    const double scale = 1.0 + direct.pinv.cwiseAbs().maxCoeff();
    if (factored.product_formula_discrepancy > 1e-8 * scale) {
        warn("factored pseudoinverse of B0 disagrees with the direct one; using the direct value");
        b0_pinv = direct.pinv;
    }
    const double sign = options.sign == CorrectionSign::kConsistent ? -1.0 : 1.0;

    SolveReport report;
    report.epsilon = eps;
    report.tol = options.tol;
    report.exact_generating = eps == 0.0;
    report.pinv_discrepancy = factored.product_formula_discrepancy;
    report.generating = generating_solution(c0, grid);

    Trajectory z = Trajectory::zeros(grid);
    DivergenceGuard guard(options.divergence_window);
    Vector b = Vector::Zero(grid.dimension());
    SpectralVector c = SpectralVector::Zero(grid.dimension());

    for (int m = 0; m < options.max_iter; ++m) {
        b = rhs_b(z, c0, eps).b;
        c = sign * (b0_pinv * b);

        Samples forcing(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            forcing[i] =
                nonlinearity_H(SpectralVector(z.samples[i] + report.generating.samples[i]), w);
        }
        Trajectory z_bar{grid, duhamel_integral(grid, forcing)};
        for (auto& s : z_bar.samples) s *= eps;

        Trajectory next = z_bar;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            next.samples[i] += BlockRotationOperator(grid.time(i), w).apply(c);
        }
        const double delta = next.sup_distance(z);
        const double residual = (next.front() - next.back()).norm();
        z = std::move(next);

        report.history.push_back({m + 1, delta, residual});
        if (options.observer) options.observer({m + 1, c, &z_bar, &z, delta, residual});
        report.iterations = m + 1;
        report.final_delta = delta;
        if (delta <= options.tol) {
            report.converged = true;
            break;
        }
        guard.observe(m + 1, delta);
    }

    b = rhs_b(z, c0, eps).b;
    report.b = b;
    report.c = c;
    report.cokernel_norm = (direct.cokernel_projector * b).norm();
    report.classification = report.cokernel_norm <= options.consistency_tol * (1.0 + b.norm())
                                ? Classification::kClassical
                                : Classification::kPseudosolution;
    report.trajectory = z + report.generating;
    report.ode_residual = residual_ode(report.trajectory, {}, eps,
                                       [&](double, const SpectralVector& x) {
                                           return nonlinearity_H(x, w);
                                       });
    report.boundary_residual = (report.trajectory.front() - report.trajectory.back()).norm();
    finish_amplitudes(report);
    if (!report.converged) {
        std::ostringstream msg;
        msg << "no convergence within " << options.max_iter << " iterations (delta = "
            << report.final_delta << ")";
        report.diagnostic = msg.str();
    } else if (report.exact_generating) {
        report.diagnostic = "epsilon = 0: the generating solution is exact";
    } else if (report.classification == Classification::kPseudosolution) {
        report.diagnostic =
            "correction equation B0 c = b is not solvable; the iterate is a pseudosolution";
    }
    return report;
}

Nonlinearity vdp_nonlinearity(std::vector<double> frequencies) {
    auto shared = std::make_shared<const std::vector<double>>(std::move(frequencies));
    Nonlinearity out;
    out.value = [shared](double, const SpectralVector& x) { return nonlinearity_H(x, *shared); };
    out.jacobian = [shared](double, const SpectralVector& x) {
        return nonlinearity_jacobian(x, *shared);
    };
    return out;
}

SolveReport iterate_general(const LinearBvpProblem& problem, const Nonlinearity& nonlinearity,
                            const SpectralVector& h0, double eps,
                            const IterationOptions& options) {
    check_options(options);
    detail::require(static_cast<bool>(nonlinearity.value), "nonlinearity must be provided");
    detail::require(std::isfinite(eps) && eps >= 0.0, "epsilon must be non-negative");
    const ModeGrid& grid = problem.grid;
    const Eigen::Index n = grid.dimension();
    detail::require_dimension(h0.size(), n, "iterate_general: h0");
    const std::vector<double>& w = grid.frequencies();
    const BoundaryFunctional& boundary = problem.boundary;

    const LinearSolveResult lin = solve_linear(problem, options.rank_tol, options.consistency_tol);
    if (lin.classification != Classification::kClassical) {
        throw std::invalid_argument(
            "the generating linear problem is not solvable (boundary residual " +
            std::to_string(lin.residual) + ")");
    }
    const Matrix& p_n = lin.q_pinv.kernel_projector;
    const Matrix& p_h = lin.q_pinv.cokernel_projector;
    const Matrix& q_pinv = lin.q_pinv.pinv;

    SolveReport report;
    report.epsilon = eps;
    report.tol = options.tol;
    report.exact_generating = eps == 0.0;
    report.generating = full_solution(lin, h0);
    const Samples& x0 = report.generating.samples;

    auto h_at = [&](std::size_t i, const SpectralVector& x) {
        return nonlinearity.value(grid.time(i), x);
    };
    std::vector<Matrix> jac(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        jac[i] = nonlinearity.jacobian ? nonlinearity.jacobian(grid.time(i), x0[i])
                                       : fd_jacobian(nonlinearity.value, grid.time(i), x0[i]);
        detail::require(jac[i].rows() == n && jac[i].cols() == n,
                        "nonlinearity Jacobian has the wrong shape");
    }
    // P_H l int_0^. U(.) U^{-1}(tau) f(tau) dtau
    auto projected = [&](const Samples& f) -> Vector {
        return p_h * apply_boundary_to_particular(boundary, grid, f);
    };
    // G[f, 0](t) = U(t) Q^+ (-l int f) + int_0^t U(t - tau) f(tau) dtau
    auto green_zero = [&](const Samples& f) {
        const SpectralVector c = q_pinv * (-apply_boundary_to_particular(boundary, grid, f));
        return inhomogeneous_solution(c, f, grid);
    };

    Samples h_x0(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) h_x0[i] = h_at(i, x0[i]);
    const Vector f_c0 = projected(h_x0);
    if (f_c0.norm() > 1e-8 * (1.0 + h0.norm())) {
        std::ostringstream msg;
        msg << "h0 does not solve the generating equation (residual " << f_c0.norm() << ")";
        throw std::invalid_argument(msg.str());
    }

    Matrix b0(boundary.target.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const SpectralVector e = p_n.col(j);
        Samples f(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f[i] = jac[i] * BlockRotationOperator(grid.time(i), w).apply(e);
        }
        b0.col(j) = projected(f);
    }
    const PinvResult b0_inv = pinv(b0, options.rank_tol);

    Trajectory y = Trajectory::zeros(grid);
    Trajectory y_bar = Trajectory::zeros(grid);
    DivergenceGuard guard(options.divergence_window);
    Vector b = Vector::Zero(boundary.target.size());
    SpectralVector c = SpectralVector::Zero(n);

    auto correction_rhs = [&](const Trajectory& yk, const Trajectory& yk_bar) {
        Samples f(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const SpectralVector full = yk.samples[i] + x0[i];
            f[i] = jac[i] * yk_bar.samples[i] + (h_at(i, full) - h_x0[i] - jac[i] * yk.samples[i]);
        }
        return projected(f);
    };

    for (int m = 0; m < options.max_iter; ++m) {
        b = correction_rhs(y, y_bar);
        if (b0_inv.rank == 0 && b.norm() > options.consistency_tol * (1.0 + b.norm())) {
            throw NumericalError(
                "solvability condition for the correction equation violated: B0 vanishes "
                "while the projected right-hand side does not");
        }
        c = -(b0_inv.pinv * b);

        Samples f(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f[i] = h_at(i, SpectralVector(y.samples[i] + x0[i]));
        }
        Trajectory next_bar = eps == 0.0 ? Trajectory::zeros(grid) : eps * green_zero(f);
        Trajectory next = next_bar;
        const SpectralVector pc = p_n * c;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            next.samples[i] += BlockRotationOperator(grid.time(i), w).apply(pc);
        }
        const double delta = next.sup_distance(y);
        y = std::move(next);
        y_bar = std::move(next_bar);
        const double residual = boundary_residual(boundary, y + report.generating);

        report.history.push_back({m + 1, delta, residual});
        if (options.observer) options.observer({m + 1, c, &y_bar, &y, delta, residual});
        report.iterations = m + 1;
        report.final_delta = delta;
        if (delta <= options.tol) {
            report.converged = true;
            break;
        }
        guard.observe(m + 1, delta);
    }

    b = correction_rhs(y, y_bar);
    report.b = b;
    report.c = c;
    report.cokernel_norm = (b0_inv.cokernel_projector * b).norm();
    report.classification = report.cokernel_norm <= options.consistency_tol * (1.0 + b.norm())
                                ? Classification::kClassical
                                : Classification::kPseudosolution;
    report.trajectory = y + report.generating;
    report.ode_residual = residual_ode(report.trajectory, problem.forcing, eps, nonlinearity.value);
    report.boundary_residual = boundary_residual(boundary, report.trajectory);
    finish_amplitudes(report);
    if (!report.converged) {
        std::ostringstream msg;
        msg << "no convergence within " << options.max_iter << " iterations (delta = "
            << report.final_delta << ")";
        report.diagnostic = msg.str();
    } else if (report.exact_generating) {
        report.diagnostic = "epsilon = 0: the generating solution is exact";
    } else if (report.classification == Classification::kPseudosolution) {
        report.diagnostic =
            "correction equation B0 c = b is not solvable; the iterate is a pseudosolution";
    }
    return report;
}

}  // namespace hilbvp
