#include "hilbvp/linear_bvp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hilbvp;

namespace {

LinearBvpProblem periodic_with(const ModeGrid& grid, std::vector<ModalTerm> terms) {
    return {grid, modal_forcing(grid, terms), periodic_boundary(grid.mode_count())};
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(AssembleQ, PeriodicResonantIsZero) {
    for (int m : {1, 3, 8}) {
        const ModeGrid grid(m, 64);
        Vector alpha = Vector::LinSpaced(2 * m, 0.5, 1.5);
        LinearBvpProblem p{grid, {}, periodic_boundary(m)};
        p.boundary.target = alpha;
        const BoundaryOperator op = assemble_Q(p);
        EXPECT_LE(max_abs(op.q), 1e-13);
        EXPECT_LE((op.g1 - alpha).norm(), 0.0);
    }
}

TEST(AssembleQ, InitialValueIsIdentity) {
    const ModeGrid grid(2, 32);
    Vector alpha(4);
    alpha << 1, 2, 3, 4;
    const BoundaryOperator op = assemble_Q({grid, {}, initial_value_boundary(alpha)});
    EXPECT_LE(max_abs(op.q - Matrix::Identity(4, 4)), 0.0);
    EXPECT_EQ(op.g1, alpha);
}

TEST(AssembleQ, TwoPointHalfPeriodCancels) {
    const ModeGrid grid(1, 64);
    BoundaryFunctional l;
    l.point_terms = {{0.0, Matrix::Identity(2, 2)}, {kPi, Matrix::Identity(2, 2)}};
    l.target = Vector::Zero(2);
    EXPECT_LE(max_abs(assemble_Q({grid, {}, l}).q), 1e-15);
}

TEST(AssembleQ, RejectsMalformedFunctionals) {
    const ModeGrid grid(1, 16);
    BoundaryFunctional empty;
    empty.target = Vector::Zero(2);
    EXPECT_THROW((void)assemble_Q({grid, {}, empty}), std::invalid_argument);

    BoundaryFunctional outside = periodic_boundary(1);
    outside.point_terms[1].time = 7.0;
    EXPECT_THROW((void)assemble_Q({grid, {}, outside}), std::invalid_argument);

    BoundaryFunctional wrong = periodic_boundary(1);
    wrong.point_terms[0].weight = Matrix::Identity(3, 3);
    EXPECT_THROW((void)assemble_Q({grid, {}, wrong}), std::invalid_argument);

    LinearBvpProblem bad_forcing{grid, Samples(3, SpectralVector::Zero(2)), periodic_boundary(1)};
    EXPECT_THROW((void)solve_linear(bad_forcing), std::invalid_argument);
}

TEST(SolveLinear, NonResonantForcingIsClassical) {
    const ModeGrid grid(1, 256);
    const LinearBvpProblem p = periodic_with(grid, {{1, ModalShape::kCos, 2.0, 1.0}});
    const LinearSolveResult r = solve_linear(p);
    EXPECT_EQ(r.classification, Classification::kClassical);
    EXPECT_EQ(r.kernel_basis.cols(), 2);
    EXPECT_LE(boundary_residual(p.boundary, r.green_trajectory), 1e-8);
    // solvability conditions: int sin(k tau) f_k = int cos(k tau) f_k = 0
    std::vector<double> s, c;
    for (double t : grid.times()) {
        s.push_back(std::sin(t) * std::cos(2.0 * t));
        c.push_back(std::cos(t) * std::cos(2.0 * t));
    }
    EXPECT_NEAR(simpson(grid.step(), s), 0.0, 1e-12);
    EXPECT_NEAR(simpson(grid.step(), c), 0.0, 1e-12);
}

TEST(SolveLinear, ResonantForcingIsPseudosolution) {
    const ModeGrid grid(1, 256);
    const LinearBvpProblem p = periodic_with(grid, {{1, ModalShape::kCos, 1.0, 1.0}});
    const LinearSolveResult r = solve_linear(p);
    EXPECT_EQ(r.classification, Classification::kPseudosolution);
    // x(2 pi) - x(0) = (0, pi) for x'' + x = cos t from rest
    EXPECT_NEAR(r.residual, kPi, 1e-8);
    EXPECT_NEAR(boundary_residual(p.boundary, full_solution(r, SpectralVector::Zero(2))),
                r.residual, 1e-8);
}

TEST(SolveLinear, ResonantKernelHasFullDimension) {
    for (int m : {1, 4, 16}) {
        const ModeGrid grid(m, 64);
        const LinearSolveResult r = solve_linear({grid, {}, periodic_boundary(m)});
        EXPECT_EQ(r.kernel_basis.cols(), 2 * m);
        EXPECT_EQ(r.q_pinv.rank, 0);
    }
}

TEST(SolveLinear, InitialValueProblemIsUniqueAndMatchesIvp) {
    const ModeGrid grid(2, 256);
    Vector alpha(4);
    alpha << 0.3, -0.2, 0.1, 0.5;
    const Samples g = modal_forcing(grid, {{1, ModalShape::kSin, 1.0, 1.0},
                                           {2, ModalShape::kCos, 3.0, 0.5}});
    const LinearSolveResult r = solve_linear({grid, g, initial_value_boundary(alpha)});
    EXPECT_EQ(r.classification, Classification::kClassical);
    EXPECT_EQ(r.kernel_basis.cols(), 0);
    const Trajectory ivp = inhomogeneous_solution(alpha, g, grid);
    EXPECT_LE(r.green_trajectory.sup_distance(ivp), 1e-12);
}

TEST(SolveLinear, ClassificationInvariantUnderScaling) {
    const ModeGrid grid(2, 128);
    for (double f : {1.0, 2.0}) {
        const LinearBvpProblem p = periodic_with(grid, {{1, ModalShape::kCos, f, 1.0}});
        const Classification base = solve_linear(p).classification;
        for (double s : {-3.0, 1e-3, 1e4}) {
            LinearBvpProblem scaled = p;
            for (auto& v : scaled.forcing) v *= s;
            EXPECT_EQ(solve_linear(scaled).classification, base) << "scale " << s;
        }
    }
}

TEST(FullSolution, ZeroHIsGreenTrajectory) {
    const ModeGrid grid(1, 64);
    const LinearSolveResult r =
        solve_linear(periodic_with(grid, {{1, ModalShape::kCos, 2.0, 1.0}}));
    EXPECT_EQ(full_solution(r, SpectralVector::Zero(2)).sup_distance(r.green_trajectory), 0.0);
}

TEST(FullSolution, ClassicalFamilySatisfiesBoundaryAndIsAffine) {
    const ModeGrid grid(2, 256);
    const LinearBvpProblem p = periodic_with(grid, {{1, ModalShape::kCos, 2.0, 1.0},
                                                    {2, ModalShape::kSin, 3.0, -0.7}});
    const LinearSolveResult r = solve_linear(p);
    ASSERT_EQ(r.classification, Classification::kClassical);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        SpectralVector h1(4), h2(4);
        for (auto& v : h1) v = d(rng);
        for (auto& v : h2) v = d(rng);
        const double theta = 0.5 * (1.0 + d(rng) / 2.0);
        const Trajectory x1 = full_solution(r, h1);
        const Trajectory x2 = full_solution(r, h2);
        EXPECT_LE(boundary_residual(p.boundary, x1), 1e-8 * (1.0 + p.boundary.target.norm()));
        const Trajectory mix = full_solution(r, theta * h1 + (1.0 - theta) * h2);
        EXPECT_LE(mix.sup_distance(theta * x1 + (1.0 - theta) * x2), 1e-10);
    }
}

TEST(FullSolution, OdeResidualConvergesWithGrid) {
    auto residual_at = [](int intervals) {
        const ModeGrid grid(1, intervals);
        const LinearBvpProblem p = periodic_with(grid, {{1, ModalShape::kCos, 2.0, 1.0}});
        const LinearSolveResult r = solve_linear(p);
        SpectralVector h(2);
        h << 0.4, -0.1;
        return residual_ode(full_solution(r, h), p.forcing, 0.0);
    };
    const double coarse = residual_at(64);
    const double fine = residual_at(128);
    EXPECT_GT(coarse / fine, 3.0);
}

TEST(BoundaryFunctional, OffGridPointUsesExactEvolution) {
    // l(x) = x(0.1234) evaluated between grid nodes
    const double t = 0.1234;
    auto value_at = [&](int intervals) {
        const ModeGrid grid(1, intervals);
        BoundaryFunctional l;
        l.point_terms = {{t, Matrix::Identity(2, 2)}};
        l.target = Vector::Zero(2);
        const Samples g = modal_forcing(grid, {{1, ModalShape::kCos, 2.0, 1.0}});
        return apply_boundary_to_particular(l, grid, g);
    };
    // x'' + x = cos 2t from rest: x = (cos t - cos 2t) / 3
    Vector exact(2);
    exact << (std::cos(t) - std::cos(2.0 * t)) / 3.0, (-std::sin(t) + 2.0 * std::sin(2.0 * t)) / 3.0;
    auto err = [&](int n) { return (value_at(n) - exact).cwiseAbs().maxCoeff(); };
    const double coarse = err(64);
    const double fine = err(1024);
    EXPECT_LE(coarse, 2e-5);
    EXPECT_LE(err(512), 1e-9);
    // roughly fourth order over a 16x refinement, allowing for where t falls in a panel
    EXPECT_GE(coarse / fine, std::pow(16.0, 3.5));
}

TEST(BoundaryFunctional, IntegralKernelMeanCondition) {
    // l(x) = int_0^{2 pi} x dt, alpha = 0, no forcing: every rotation has zero mean.
    const ModeGrid grid(1, 64);
    BoundaryFunctional l;
    l.integral_kernel.assign(grid.size(), Matrix::Identity(2, 2));
    l.target = Vector::Zero(2);
    const LinearSolveResult r = solve_linear({grid, {}, l});
    EXPECT_EQ(r.kernel_basis.cols(), 2);
    EXPECT_EQ(r.classification, Classification::kClassical);
}

TEST(Classification, Names) {
    EXPECT_EQ(to_string(Classification::kClassical), "classical");
    EXPECT_EQ(to_string(Classification::kPseudosolution), "pseudosolution");
}
