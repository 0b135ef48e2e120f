#include "hilbvp/linear_bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilbvp {
namespace {

void validate_boundary(const BoundaryFunctional& boundary, const ModeGrid& grid) {
    const Eigen::Index n = grid.dimension();
    const Eigen::Index rows = boundary.target.size();
    detail::require(rows > 0, "boundary functional: target alpha is empty");
    detail::require(!boundary.point_terms.empty() || !boundary.integral_kernel.empty(),
                    "boundary functional needs at least one term");
    for (const PointTerm& term : boundary.point_terms) {
        detail::require(std::isfinite(term.time) && term.time >= 0.0 &&
                            (term.time <= grid.period() || grid.on_grid(term.time)),
                        "boundary point time outside [0, period]");
        detail::require(term.weight.rows() == rows && term.weight.cols() == n,
                        "boundary weight must be " + std::to_string(rows) + "x" +
                            std::to_string(n));
        detail::require(term.weight.allFinite(), "boundary weight has non-finite entries");
    }
    if (!boundary.integral_kernel.empty()) {
        detail::require(boundary.integral_kernel.size() == grid.size(),
                        "integral kernel must be sampled on every grid point");
        for (const Matrix& k : boundary.integral_kernel) {
            detail::require(k.rows() == rows && k.cols() == n,
                            "integral kernel samples must be " + std::to_string(rows) + "x" +
                                std::to_string(n));
        }
        for (const PointTerm& term : boundary.point_terms) {
            detail::require(grid.on_grid(term.time),
                            "boundary point times must lie on the grid when an integral "
                            "kernel is present");
        }
    }
}

// int_{t_j}^{t} of the cubic interpolant of `pulled`, t in [t_j, t_{j+1}].
Vector partial_panel(const Trajectory& pulled, double from, double to) {
    static constexpr double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double half = 0.5 * (to - from);
    const double mid = 0.5 * (to + from);
    Vector sum = Vector::Zero(pulled.grid.dimension());
    for (int q = 0; q < 3; ++q) sum += weights[q] * pulled.evaluate(mid + half * nodes[q]);
    return half * sum;
}

// Particular solution int_0^t U(t - tau) g(tau) dtau at an arbitrary t, given the
// pulled-back integrand and its running integral on the grid.
Vector particular_at(const ModeGrid& grid, const Trajectory& pulled, const Samples& running,
                     double t) {
    const BlockRotationOperator u(t, grid.frequencies());
    if (grid.on_grid(t)) return u.apply(running[grid.nearest_index(t)]);
    const auto j = static_cast<std::size_t>(std::floor(t / grid.step()));
    const std::size_t left = std::min(j, grid.size() - 2);
    return u.apply(SpectralVector(running[left] + partial_panel(pulled, grid.time(left), t)));
}

}  // namespace

BoundaryFunctional periodic_boundary(int mode_count, double period) {
    detail::require(mode_count >= 1, "mode count must be positive");
    const Eigen::Index n = 2 * mode_count;
    BoundaryFunctional out;
    out.point_terms.push_back({0.0, Matrix::Identity(n, n)});
    out.point_terms.push_back({period, -Matrix::Identity(n, n)});
    out.target = Vector::Zero(n);
    return out;
}

BoundaryFunctional initial_value_boundary(const Vector& x0) {
    detail::require(x0.size() > 0 && x0.size() % 2 == 0, "initial value must have even length");
    BoundaryFunctional out;
    out.point_terms.push_back({0.0, Matrix::Identity(x0.size(), x0.size())});
    out.target = x0;
    return out;
}

Samples modal_forcing(const ModeGrid& grid, const std::vector<ModalTerm>& terms) {
    Samples out(grid.size(), SpectralVector::Zero(grid.dimension()));
    for (const ModalTerm& term : terms) {
        detail::require(term.mode >= 1 && term.mode <= grid.mode_count(),
                        "forcing mode index out of range");
        detail::require(std::isfinite(term.frequency) && std::isfinite(term.amplitude),
                        "forcing parameters must be finite");
        const double w = grid.frequency(term.mode);
        const auto slot = static_cast<Eigen::Index>(2 * term.mode - 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double arg = term.frequency * grid.time(i);
            const double f = term.amplitude *
                             (term.shape == ModalShape::kCos ? std::cos(arg) : std::sin(arg));
            out[i][slot] += f / w;
        }
    }
    return out;
}

std::string_view to_string(Classification c) noexcept {
    return c == Classification::kClassical ? "classical" : "pseudosolution";
}

Vector apply_boundary_to_particular(const BoundaryFunctional& boundary, const ModeGrid& grid,
                                    const Samples& g) {
    validate_boundary(boundary, grid);
    Vector out = Vector::Zero(boundary.target.size());
    if (g.empty()) return out;
    const Samples pulled = pull_back(grid, g);
    const Samples running = cumulative_integral(grid.step(), pulled);
    const Trajectory pulled_traj{grid, pulled};
    for (const PointTerm& term : boundary.point_terms) {
        out += term.weight * particular_at(grid, pulled_traj, running, term.time);
    }
    if (!boundary.integral_kernel.empty()) {
        Samples integrand(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            integrand[i] = boundary.integral_kernel[i] *
                           BlockRotationOperator(grid.time(i), grid.frequencies()).apply(running[i]);
        }
        out += simpson(grid.step(), integrand);
    }
    return out;
}

BoundaryOperator assemble_Q(const LinearBvpProblem& problem) {
    const ModeGrid& grid = problem.grid;
    const BoundaryFunctional& boundary = problem.boundary;
    validate_boundary(boundary, grid);
    const Eigen::Index n = grid.dimension();
    const Matrix eye = Matrix::Identity(n, n);

    BoundaryOperator out;
    out.q = Matrix::Zero(boundary.target.size(), n);
    for (const PointTerm& term : boundary.point_terms) {
        const double t = grid.on_grid(term.time) ? grid.time(grid.nearest_index(term.time))
                                                 : term.time;
        out.q += term.weight * BlockRotationOperator(t, grid.frequencies()).apply(eye);
    }
    if (!boundary.integral_kernel.empty()) {
        const Eigen::Index rows = boundary.target.size();
        Matrix acc = Matrix::Zero(rows, n);
        const double h = grid.step();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double w = (i == 0 || i + 1 == grid.size()) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += w * boundary.integral_kernel[i] *
                   BlockRotationOperator(grid.time(i), grid.frequencies()).apply(eye);
        }
        out.q += acc * (h / 3.0);
    }
    out.g1 = boundary.target - apply_boundary_to_particular(boundary, grid, problem.forcing);
    return out;
}

Vector apply_boundary(const BoundaryFunctional& boundary, const Trajectory& x) {
    validate_boundary(boundary, x.grid);
    detail::require(x.samples.size() == x.grid.size(), "trajectory/grid size mismatch");
    Vector out = Vector::Zero(boundary.target.size());
    for (const PointTerm& term : boundary.point_terms) out += term.weight * x.evaluate(term.time);
    if (!boundary.integral_kernel.empty()) {
        Samples integrand(x.grid.size());
        for (std::size_t i = 0; i < x.grid.size(); ++i) {
            integrand[i] = boundary.integral_kernel[i] * x.samples[i];
        }
        out += simpson(x.grid.step(), integrand);
    }
    return out;
}

double boundary_residual(const BoundaryFunctional& boundary, const Trajectory& x) {
    return (apply_boundary(boundary, x) - boundary.target).norm();
}

namespace {

// Entries of Q are sums of weights times rotations, so cancellation (as in
// U(0) - U(2 pi) for resonant frequencies) leaves round-off of the size of
// the weights rather than of Q itself.
double default_rank_tol(const LinearBvpProblem& problem, const Matrix& q) {
    double scale = 0.0;
    for (const PointTerm& term : problem.boundary.point_terms) scale += term.weight.norm();
    for (const Matrix& k : problem.boundary.integral_kernel) scale += problem.grid.step() * k.norm();
    const double sigma_max = q.size() == 0 ? 0.0 : q.jacobiSvd().singularValues()(0);
    const auto dim = static_cast<double>(std::max(q.rows(), q.cols()));
    return dim * std::numeric_limits<double>::epsilon() * std::max(scale, sigma_max);
}

}  // namespace

LinearSolveResult solve_linear(const LinearBvpProblem& problem, std::optional<double> rank_tol,
                               double consistency_tol) {
    detail::require(problem.forcing.empty() || problem.forcing.size() == problem.grid.size(),
                    "forcing must be sampled on every grid point");
    detail::require(consistency_tol >= 0.0, "consistency tolerance must be non-negative");
    const BoundaryOperator op = assemble_Q(problem);

    LinearSolveResult out;
    out.q = op.q;
    out.g1 = op.g1;
    out.q_pinv = pinv(op.q, rank_tol ? *rank_tol : default_rank_tol(problem, op.q));
    out.particular = out.q_pinv.pinv * op.g1;
    out.kernel_basis = out.q_pinv.kernel_basis;
    out.residual = (out.q_pinv.cokernel_projector * op.g1).norm();
    out.consistency_tol = consistency_tol;
    out.classification = out.residual <= consistency_tol * (1.0 + op.g1.norm())
                             ? Classification::kClassical
                             : Classification::kPseudosolution;
    out.green_trajectory = inhomogeneous_solution(out.particular, problem.forcing, problem.grid);
    return out;
}

Trajectory full_solution(const LinearSolveResult& result, const SpectralVector& h) {
    const ModeGrid& grid = result.green_trajectory.grid;
    detail::require_dimension(h.size(), grid.dimension(), "full_solution: h");
    const SpectralVector c = result.q_pinv.kernel_projector * h;
    Trajectory out = result.green_trajectory;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.samples[i] += BlockRotationOperator(grid.time(i), grid.frequencies()).apply(c);
    }
    return out;
}

}  // namespace hilbvp
