#include "hilbvp/evolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace hilbvp;

namespace {

SpectralVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    SpectralVector v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST(ModeGrid, EndpointsAreExactAndSpacingUniform) {
    const ModeGrid grid(3, 256);
    EXPECT_EQ(grid.times().front(), 0.0);
    EXPECT_EQ(grid.times().back(), kTwoPi);
    EXPECT_EQ(grid.size(), 257u);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        EXPECT_NEAR(grid.time(i) - grid.time(i - 1), kTwoPi / 256.0, 1e-14);
    }
    EXPECT_EQ(grid.frequency(1), 1.0);
    EXPECT_EQ(grid.frequency(3), 3.0);
}

TEST(ModeGrid, NonStandardPeriodUsesScaledFrequencies) {
    const ModeGrid grid(2, 64, kPi);
    EXPECT_DOUBLE_EQ(grid.frequency(1), 2.0);
    EXPECT_DOUBLE_EQ(grid.frequency(2), 4.0);
}

TEST(ModeGrid, RejectsOddIntervalCountAndBadInput) {
    EXPECT_THROW(ModeGrid(1, 3), std::invalid_argument);
    EXPECT_THROW(ModeGrid(0, 4), std::invalid_argument);
    EXPECT_THROW(ModeGrid(1, 4, -1.0), std::invalid_argument);
    EXPECT_THROW(ModeGrid::with_frequencies({1.0, -2.0}, 4, 1.0), std::invalid_argument);
}

TEST(BlockRotation, IdentityAtZero) {
    std::mt19937_64 rng(1);
    const SpectralVector v = random_vector(rng, 8);
    EXPECT_EQ(apply_evolution(0.0, v, 4), v);
}

TEST(BlockRotation, FullPeriodClosesForIntegerFrequencies) {
    std::mt19937_64 rng(2);
    const SpectralVector v = random_vector(rng, 6);
    EXPECT_LE((apply_evolution(kTwoPi, v, 3) - v).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(BlockRotation, QuarterTurnOfUnitVector) {
    SpectralVector v(2);
    v << 1.0, 0.0;
    const SpectralVector u = apply_evolution(kPi / 2.0, v, 1);
    EXPECT_NEAR(u[0], 0.0, 1e-15);
    EXPECT_NEAR(u[1], -1.0, 1e-15);
    SpectralVector back(2);
    back << 0.0, -1.0;
    const SpectralVector w = apply_evolution_inverse(kPi / 2.0, back, 1);
    EXPECT_NEAR(w[0], 1.0, 1e-15);
    EXPECT_NEAR(w[1], 0.0, 1e-15);
}

TEST(BlockRotation, InverseOfZeroAndRoundTrip) {
    EXPECT_EQ(apply_evolution_inverse(1.3, SpectralVector::Zero(4), 2), SpectralVector::Zero(4));
    std::mt19937_64 rng(3);
    const SpectralVector v = random_vector(rng, 8);
    const SpectralVector r = apply_evolution_inverse(0.7, apply_evolution(0.7, v, 4), 4);
    EXPECT_LE((r - v).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(BlockRotation, BlocksAreOrthogonal) {
    const std::vector<double> w = resonant_frequencies(5);
    for (double t : {0.0, 0.3, 2.0, -4.5, 17.0}) {
        const Matrix u = BlockRotationOperator(t, w).to_dense();
        EXPECT_LE((u * u.transpose() - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BlockRotation, DimensionMismatchThrows) {
    EXPECT_THROW((void)apply_evolution(0.1, SpectralVector::Zero(3), 2), std::invalid_argument);
}

TEST(EvolutionProperties, NormGroupLawAndGenerator) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-6.0, 6.0);
    const std::vector<double> w = resonant_frequencies(64);
    for (int trial = 0; trial < 25; ++trial) {
        const SpectralVector v = random_vector(rng, 128);
        const double s = d(rng);
        const double t = d(rng);
        EXPECT_NEAR(apply_evolution(t, v, w).norm(), v.norm(), 1e-12);
        EXPECT_LE((apply_evolution(s, apply_evolution(t, v, w), w) - apply_evolution(s + t, v, w))
                      .lpNorm<Eigen::Infinity>(),
                  1e-10);
        EXPECT_LE((apply_evolution(kTwoPi, v, w) - v).lpNorm<Eigen::Infinity>(), 1e-10);

        double errs[2];
        int i = 0;
        for (double h : {1e-3, 5e-4}) {
            const SpectralVector fd =
                (apply_evolution(t + h, v, w) - apply_evolution(t - h, v, w)) / (2.0 * h);
            errs[i++] =
                (fd - apply_generator(apply_evolution(t, v, w), w)).lpNorm<Eigen::Infinity>();
        }
        // second-order: halving h quarters the error
        EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.4);
    }
}

TEST(Quadrature, SimpsonIsExactForCubics) {
    const ModeGrid grid(1, 8, 2.0);
    std::vector<double> f;
    for (double t : grid.times()) f.push_back(t * t * t - t + 1.0);
    EXPECT_NEAR(simpson(grid.step(), f), 4.0 - 2.0 + 2.0, 1e-13);
}

TEST(Quadrature, CumulativeIntegralMatchesAntiderivative) {
    auto worst = [](int points) {
        const ModeGrid grid(1, points);
        Samples f;
        for (double t : grid.times()) f.push_back(Vector::Constant(1, std::cos(t)));
        const Samples c = cumulative_integral(grid.step(), f);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(c[i][0] - std::sin(grid.time(i))));
        }
        return err;
    };
    const double coarse = worst(64);
    const double fine = worst(128);
    EXPECT_LE(coarse, 1e-6);
    EXPECT_LE(fine, 1e-7);
    // fourth order: halving h should cut the error by about 16
    EXPECT_GE(coarse / fine, 12.0);
}

TEST(InhomogeneousSolution, ZeroDataGivesZero) {
    const ModeGrid grid(2, 32);
    const Trajectory x = inhomogeneous_solution(SpectralVector::Zero(4), {}, grid);
    EXPECT_EQ(x.sup_norm(), 0.0);
    EXPECT_EQ(x.samples.size(), grid.size());
}

TEST(InhomogeneousSolution, FreeRotation) {
    const ModeGrid grid(1, 128);
    SpectralVector c(2);
    c << 1.0, 0.0;
    const Trajectory x = inhomogeneous_solution(c, {}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(x.samples[i][0], std::cos(grid.time(i)), 1e-14);
        EXPECT_NEAR(x.samples[i][1], -std::sin(grid.time(i)), 1e-14);
    }
}

TEST(InhomogeneousSolution, NonResonantForcingMatchesClosedForm) {
    const ModeGrid grid(1, 256);
    Samples g;
    for (double t : grid.times()) {
        SpectralVector v(2);
        v << 0.0, std::cos(2.0 * t);
        g.push_back(v);
    }
    const Trajectory x = inhomogeneous_solution(SpectralVector::Zero(2), g, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.time(i);
        err = std::max(err, std::abs(x.samples[i][0] - (std::cos(t) - std::cos(2.0 * t)) / 3.0));
    }
    EXPECT_LE(err, 1e-7);
}

TEST(ResidualOde, ZeroTrajectoryHasZeroResidual) {
    const ModeGrid grid(2, 32);
    EXPECT_EQ(residual_ode(Trajectory::zeros(grid), {}, 0.0), 0.0);
}

TEST(ResidualOde, ExactSolutionConvergesAtSecondOrder) {
    auto residual_at = [](int intervals) {
        const ModeGrid grid(1, intervals);
        Samples g;
        for (double t : grid.times()) {
            SpectralVector v(2);
            v << 0.0, std::cos(2.0 * t);
            g.push_back(v);
        }
        SpectralVector c(2);
        c << 0.5, -0.25;
        return residual_ode(inhomogeneous_solution(c, g, grid), g, 0.0);
    };
    const double coarse = residual_at(64);
    const double fine = residual_at(128);
    EXPECT_LE(coarse, 0.05);
    EXPECT_GT(coarse / fine, 3.0);
}

TEST(ResidualOde, PointPerturbationScalesLikeDeltaOverH) {
    const ModeGrid grid(1, 128);
    SpectralVector c(2);
    c << 1.0, 0.0;
    Trajectory x = inhomogeneous_solution(c, {}, grid);
    const double base = residual_ode(x, {}, 0.0);
    const double delta = 1e-4;
    x.samples[64][0] += delta;
    const double bumped = residual_ode(x, {}, 0.0);
    const double growth = bumped - base;
    EXPECT_GT(growth, 0.2 * delta / grid.step());
    EXPECT_LT(growth, 5.0 * delta / grid.step());
}

TEST(Trajectory, EvaluateInterpolatesBetweenNodes) {
    // cubic interpolation: error bound h^4 / 24 * max|x''''| with h = 2 pi / 128
    const ModeGrid grid(1, 128);
    const double bound = std::pow(grid.step(), 4) / 24.0;
    SpectralVector c(2);
    c << 1.0, 0.0;
    const Trajectory x = inhomogeneous_solution(c, {}, grid);
    for (double t : {0.01, 1.234, 3.0, 6.2}) {
        const SpectralVector v = x.evaluate(t);
        EXPECT_NEAR(v[0], std::cos(t), bound);
        EXPECT_NEAR(v[1], -std::sin(t), bound);
    }
    EXPECT_THROW((void)x.evaluate(7.0), std::invalid_argument);
}

TEST(Trajectory, CsvHasHeaderAndOneRowPerSample) {
    const ModeGrid grid(2, 4);
    std::ostringstream out;
    write_trajectory_csv(out, Trajectory::zeros(grid));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,x_1,y_1,x_2,y_2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
}
