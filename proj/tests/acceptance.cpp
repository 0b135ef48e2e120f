// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are fixed here; the process exits non-zero if any criterion fails.

#include "hilbvp/iteration.hpp"
#include "hilbvp/oracle.hpp"
#include "hilbvp/pseudoinverse.hpp"
#include "hilbvp/vdp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace hilbvp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<int> first_modes(int n) {
    std::vector<int> out;
    for (int k = 1; k <= n; ++k) out.push_back(k);
    return out;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

Outcome amplitude_law() {
    double amp_err = 0.0;
    double f_err = 0.0;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int n = 1; n <= 4; ++n) {
        std::vector<double> phases(static_cast<std::size_t>(n));
        for (double& p : phases) p = phase(rng);
        const AmplitudePairs c = generating_torus(n, first_modes(n), phases);
        const double a = 2.0 / std::sqrt(2.0 * n - 1.0);
        for (int k = 1; k <= n; ++k) {
            amp_err = std::max(amp_err, std::abs(std::hypot(c.c1(k), c.c2(k)) - a));
        }
        f_err = std::max(f_err, generating_F(c).lpNorm<Eigen::Infinity>());
    }
    return {amp_err <= 1e-12 && f_err <= 1e-8,
            fmt("amplitude error %.2e (tol 1e-12), max |F| on torus %.2e (tol 1e-8)", amp_err,
                f_err)};
}

Outcome single_mode_physics() {
    const double eps = 0.01;
    const AmplitudePairs c0 = generating_torus(1, {1});
    IterationOptions opts;
    opts.tol = 1e-10;
    const SolveReport report = iterate_vdp(VdpConfig{eps, ModeGrid(1), {1}, {}}, c0, opts);
    const PeriodicOrbit orbit = shoot_periodic(c0.to_vector(), eps);
    const double distance = compare(report.trajectory, orbit, eps);
    const double amp = report.amplitude_check.at(0);
    const bool pass =
        report.converged && distance <= 0.05 && std::abs(amp - 2.0) <= 0.02;
    return {pass, fmt("converged=%g, sup distance to shooting orbit %.2e (tol 0.05), amplitude "
                      "%.6f (2 +- 0.02)",
                      report.converged ? 1.0 : 0.0, distance, amp)};
}

Outcome closed_form_F() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 8);
        SpectralVector v(2 * m);
        for (auto& x : v) x = d(rng);
        v *= 3.0 * std::abs(d(rng)) / v.norm();
        const AmplitudePairs c = AmplitudePairs::from_vector(v);
        worst = std::max(worst, (generating_F(c) - generating_F_closed(c)).lpNorm<Eigen::Infinity>());
    }
    return {worst <= 1e-8, fmt("max deviation %.2e over 100 random c, M <= 8 (tol 1e-8)", worst)};
}

Outcome jacobian() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        std::vector<double> phases(static_cast<std::size_t>(n));
        for (double& p : phases) p = phase(rng);
        const AmplitudePairs c = generating_torus(n, first_modes(n), phases);
        worst = std::max(worst,
                         (jacobian_B0_fd(c) - jacobian_B0_closed(c)).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-5,
            fmt("max |FD - closed| %.2e at 20 torus points, N in {1,2,3} (tol 1e-5)", worst)};
}

Outcome pseudoinverse() {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double identities = 0.0;
    int deficient = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 8);
        const int c = 1 + static_cast<int>(rng() % 8);
        const int rank = static_cast<int>(rng() % (std::min(r, c) + 1));
        if (rank < std::min(r, c)) ++deficient;
        Matrix a = Matrix::Zero(r, c);
        for (int k = 0; k < rank; ++k) {
            Vector u(r), v(c);
            for (auto& x : u) x = d(rng);
            for (auto& x : v) x = d(rng);
            a += u * v.transpose();
        }
        const Matrix x = pinv(a).pinv;
        const double na = std::max(a.norm(), 1e-300);
        const double nx = std::max(x.norm(), 1e-300);
        identities = std::max({identities, (a * x * a - a).norm() / na,
                               (x * a * x - x).norm() / nx,
                               ((a * x).transpose() - a * x).norm(),
                               ((x * a).transpose() - x * a).norm()});
    }
    const Matrix w1 = factorize_B0(generating_torus(1, {1})).w;
    const double w_plus_n1 = (w_plus_closed_form(1, 1) - pinv(w1).pinv).cwiseAbs().maxCoeff();

    // N >= 2 and factored formulas: measured and reported, not asserted.
    std::string report;
    bool reported = true;
    for (int n = 2; n <= 3; ++n) {
        const AmplitudePairs c = generating_torus(n, first_modes(n));
        const B0Factors f = factorize_B0(c);
        const double wp = (w_plus_closed_form(n, n) - pinv(f.w).pinv).cwiseAbs().maxCoeff();
        const double product = factored_pinv(f.v1, f.w, f.v2).discrepancy;
        double bracket = NAN;
        try {
            bracket = factored_pinv(f.v1, f.w, f.v2, FactoredFormula::kBracketedInverse).discrepancy;
        } catch (const NumericalError&) {
        }
        reported = reported && std::isfinite(wp) && std::isfinite(product);
        report += fmt("; N=%g: W+ %.1e, product %.1e", n, wp, product) +
                  fmt(", bracketed %.1e", bracket);
    }
    const B0Factors f1 = factorize_B0(generating_torus(1, {1}));
    const double product_n1 = factored_pinv(f1.v1, f1.w, f1.v2).discrepancy;

    const bool pass = identities <= 1e-9 && deficient > 0 && w_plus_n1 <= 1e-10 &&
                      product_n1 <= 1e-10 && reported;
    return {pass, fmt("MP identities %.2e (tol 1e-9, %g rank-deficient), W+ N=1 %.2e (tol 1e-10)",
                      identities, deficient, w_plus_n1) +
                      fmt(", product N=1 %.2e", product_n1) + report};
}

Outcome linear_solvability() {
    const ModeGrid grid(1);
    const LinearBvpProblem good{grid, modal_forcing(grid, {{1, ModalShape::kCos, 2.0, 1.0}}),
                                periodic_boundary(1)};
    const LinearBvpProblem bad{grid, modal_forcing(grid, {{1, ModalShape::kCos, 1.0, 1.0}}),
                               periodic_boundary(1)};
    const LinearSolveResult g = solve_linear(good);
    const LinearSolveResult b = solve_linear(bad);
    const double good_residual = boundary_residual(good.boundary, g.green_trajectory);
    const bool pass = g.classification == Classification::kClassical && good_residual <= 1e-8 &&
                      b.classification == Classification::kPseudosolution && b.residual >= 0.1;
    return {pass, std::string("cos 2t: ") + std::string(to_string(g.classification)) +
                      fmt(" (boundary residual %.2e, tol 1e-8)", good_residual) +
                      "; cos t: " + std::string(to_string(b.classification)) +
                      fmt(" (residual %.4f, need >= 0.1)", b.residual)};
}

Outcome first_order() {
    const AmplitudePairs c0 = generating_torus(1, {1});
    auto deviation = [&](double eps) {
        const SolveReport r = iterate_vdp(VdpConfig{eps, ModeGrid(1), {1}, {}}, c0);
        if (!r.converged) throw NumericalError("iteration did not converge");
        return r.trajectory.sup_distance(r.generating);
    };
    const double a = deviation(0.01);
    const double b = deviation(0.005);
    const double ratio = a / b;
    return {std::abs(ratio - 2.0) <= 0.3,
            fmt("||x - z0|| = %.4e (eps 0.01), %.4e (eps 0.005), ratio %.4f (2 +- 0.3)", a, b,
                ratio)};
}

Outcome evolution() {
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> d(-6.0, 6.0);
    const std::vector<double> w = resonant_frequencies(64);
    double orth = 0.0, group = 0.0, period = 0.0, order = 1e300;
    for (int trial = 0; trial < 20; ++trial) {
        SpectralVector v(128);
        for (auto& x : v) x = d(rng) / 6.0;
        const double s = d(rng);
        const double t = d(rng);
        orth = std::max(orth, std::abs(apply_evolution(t, v, w).norm() - v.norm()));
        group = std::max(group, (apply_evolution(s, apply_evolution(t, v, w), w) -
                                 apply_evolution(s + t, v, w))
                                    .lpNorm<Eigen::Infinity>());
        period = std::max(period, (apply_evolution(kTwoPi, v, w) - v).lpNorm<Eigen::Infinity>());
        double errs[2];
        int i = 0;
        for (double h : {1e-3, 5e-4}) {
            const SpectralVector fd =
                (apply_evolution(t + h, v, w) - apply_evolution(t - h, v, w)) / (2.0 * h);
            errs[i++] = (fd - apply_generator(apply_evolution(t, v, w), w)).lpNorm<Eigen::Infinity>();
        }
        order = std::min(order, errs[0] / errs[1]);
    }
    const bool pass = orth <= 1e-10 && group <= 1e-10 && period <= 1e-10 && order >= 3.5;
    return {pass, fmt("norm %.1e, group law %.1e, U(2 pi) - I %.1e (tol 1e-10)", orth, group,
                      period) +
                      fmt(", generator error ratio h/(h/2) >= %.3f (need >= 3.5)", order)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "amplitude law on the generating torus", 1.0, amplitude_law},
        {2, "single-mode solution vs shooting oracle", 30.0, single_mode_physics},
        {3, "closed-form F vs quadrature", 10.0, closed_form_F},
        {4, "closed-form Jacobian vs finite differences", 5.0, jacobian},
        {5, "pseudoinverse identities and closed-form W+", 10.0, pseudoinverse},
        {6, "linear periodic problem classification", 5.0, linear_solvability},
        {7, "first-order deviation in epsilon", 60.0, first_order},
        {8, "evolution operator properties, M = 64", 5.0, evolution},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed < c.budget_seconds;
        const bool pass = out.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s criterion %d: %s | %s | %.3f s (budget %.0f s)\n", pass ? "PASS" : "FAIL",
                    c.id, c.name, out.detail.c_str(), elapsed, c.budget_seconds);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
