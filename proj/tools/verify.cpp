#include "cli.hpp"

#include "hilbvp/oracle.hpp"
#include "hilbvp/pseudoinverse.hpp"
#include "hilbvp/vdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace hilbvp::cli {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
    Matrix a = Matrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rank; ++r) {
        Vector u(rows);
        Vector v(cols);
        for (auto& x : u) x = uniform(rng, -1.0, 1.0);
        for (auto& x : v) x = uniform(rng, -1.0, 1.0);
        a += u * v.transpose();
    }
    return a;
}

std::vector<double> random_phases(Rng& rng, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& p : out) p = uniform(rng, 0.0, kTwoPi);
    return out;
}

std::vector<int> leading(int n) {
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

CheckRow bound(std::string suite, std::string check, double value, double threshold) {
    return {std::move(suite), std::move(check), value, threshold, value <= threshold, false};
}

CheckRow at_least(std::string suite, std::string check, double value, double threshold) {
    return {std::move(suite), std::move(check), value, threshold, value >= threshold, false};
}

CheckRow info(std::string suite, std::string check, double value) {
    return {std::move(suite), std::move(check), value, 0.0, true, true};
}

void evolution_suite(std::vector<CheckRow>& rows, Rng& rng) {
    const int m = 64;
    const std::vector<double> w = resonant_frequencies(m);
    double orth = 0.0, group = 0.0, periodic = 0.0;
    double gen_coarse = 0.0, gen_fine = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        SpectralVector v(2 * m);
        for (auto& x : v) x = uniform(rng, -1.0, 1.0);
        const double s = uniform(rng, -5.0, 5.0);
        const double t = uniform(rng, -5.0, 5.0);
        orth = std::max(orth, std::abs(apply_evolution(t, v, w).norm() - v.norm()));
        group = std::max(group, (apply_evolution(s, apply_evolution(t, v, w), w) -
                                 apply_evolution(s + t, v, w))
                                    .lpNorm<Eigen::Infinity>());
        periodic = std::max(periodic, (apply_evolution(kTwoPi, v, w) - v).lpNorm<Eigen::Infinity>());
        for (double h : {1e-3, 5e-4}) {
            const SpectralVector fd =
                (apply_evolution(t + h, v, w) - apply_evolution(t - h, v, w)) / (2.0 * h);
            const double err =
                (fd - apply_generator(apply_evolution(t, v, w), w)).lpNorm<Eigen::Infinity>();
            (h == 1e-3 ? gen_coarse : gen_fine) = std::max(h == 1e-3 ? gen_coarse : gen_fine, err);
        }
    }
    rows.push_back(bound("evolution", "norm preservation, M=64", orth, 1e-10));
    rows.push_back(bound("evolution", "group law U(s)U(t)=U(s+t), M=64", group, 1e-10));
    rows.push_back(bound("evolution", "U(2 pi) = I, M=64", periodic, 1e-10));
    rows.push_back(at_least("evolution", "generator error ratio at h, h/2 (~4)",
                            gen_coarse / gen_fine, 3.5));
}

void pinv_suite(std::vector<CheckRow>& rows, Rng& rng) {
    double id1 = 0.0, id2 = 0.0, id3 = 0.0, id4 = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(1, 8)(rng));
        const auto c = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(1, 8)(rng));
        const auto rank = static_cast<Eigen::Index>(
            std::uniform_int_distribution<int>(0, static_cast<int>(std::min(r, c)))(rng));
        const Matrix a = random_matrix(rng, r, c, rank);
        const Matrix x = pinv(a).pinv;
        const double na = std::max(a.norm(), 1e-300);
        const double nx = std::max(x.norm(), 1e-300);
        id1 = std::max(id1, (a * x * a - a).norm() / na);
        id2 = std::max(id2, (x * a * x - x).norm() / nx);
        id3 = std::max(id3, ((a * x).transpose() - a * x).norm());
        id4 = std::max(id4, ((x * a).transpose() - x * a).norm());
    }
    rows.push_back(bound("pinv", "A A+ A = A (relative), 100 matrices", id1, 1e-9));
    rows.push_back(bound("pinv", "A+ A A+ = A+ (relative), 100 matrices", id2, 1e-9));
    rows.push_back(bound("pinv", "(A A+)^T = A A+", id3, 1e-10));
    rows.push_back(bound("pinv", "(A+ A)^T = A+ A", id4, 1e-10));
}

void w_plus_suite(std::vector<CheckRow>& rows) {
    for (int n = 1; n <= 4; ++n) {
        const AmplitudePairs c0 = generating_torus(n, leading(n));
        const Matrix w = factorize_B0(c0).w;
        const double dev = (w_plus_closed_form(n, n) - pinv(w).pinv).cwiseAbs().maxCoeff();
        const std::string name = "closed-form W+ vs pinv(W), N=" + std::to_string(n);
        rows.push_back(n == 1 ? bound("w-plus", name, dev, 1e-10) : info("w-plus", name, dev));
    }
}

void factorization_suite(std::vector<CheckRow>& rows, Rng& rng) {
    for (int n = 1; n <= 3; ++n) {
        const AmplitudePairs c0 = generating_torus(n, leading(n), random_phases(rng, n));
        const B0Factors f = factorize_B0(c0);
        const std::string tag = ", N=" + std::to_string(n);
        rows.push_back(info("factorization", "V1 W V2 vs closed B0" + tag, f.discrepancy));
        const FactoredPinv product = factored_pinv(f.v1, f.w, f.v2);
        rows.push_back(
            n == 1 ? bound("factorization", "(W V2)+ W (V1 W)+ vs pinv(B0)" + tag,
                           product.discrepancy, 1e-8)
                   : info("factorization", "(W V2)+ W (V1 W)+ vs pinv(B0)" + tag,
                          product.discrepancy));
        try {
            const FactoredPinv bracket =
                factored_pinv(f.v1, f.w, f.v2, FactoredFormula::kBracketedInverse);
            rows.push_back(info("factorization", "bracketed formula vs pinv(B0)" + tag,
                                bracket.discrepancy));
        } catch (const NumericalError&) {
            rows.push_back(info("factorization", "bracketed formula singular" + tag, NAN));
        }
    }
    const AmplitudePairs c1 = generating_torus(1, {1});
    const B0Factors f1 = factorize_B0(c1);
    rows.push_back(info("factorization", "||B0 B0^- B0 - B0|| with B0^- = V2^-1 W V1^-1, N=1",
                        generalized_inverse_check(f1.v1, f1.w, f1.v2)));
}

void vdp_f_suite(std::vector<CheckRow>& rows, Rng& rng) {
    double dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = std::uniform_int_distribution<int>(1, 8)(rng);
        SpectralVector c(2 * m);
        for (auto& x : c) x = uniform(rng, -1.0, 1.0);
        c *= uniform(rng, 0.0, 3.0) / std::max(c.norm(), 1e-12);
        const AmplitudePairs pairs = AmplitudePairs::from_vector(c);
        dev = std::max(dev, (generating_F(pairs) - generating_F_closed(pairs))
                                .lpNorm<Eigen::Infinity>());
    }
    rows.push_back(bound("vdp-F", "closed form vs quadrature, 100 random c, M<=8", dev, 1e-8));
    double roots = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const AmplitudePairs c0 = generating_torus(n + 2, leading(n), random_phases(rng, n));
        roots = std::max(roots, generating_F(c0).lpNorm<Eigen::Infinity>());
    }
    rows.push_back(bound("vdp-F", "F vanishes on the torus, N<=4", roots, 1e-8));
}

void vdp_jacobian_suite(std::vector<CheckRow>& rows, Rng& rng) {
    double dev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        const AmplitudePairs c0 = generating_torus(n, leading(n), random_phases(rng, n));
        dev = std::max(dev, (jacobian_B0_fd(c0) - jacobian_B0_closed(c0)).cwiseAbs().maxCoeff());
    }
    rows.push_back(bound("vdp-jacobian", "max FD deviation, 20 torus points, N in {1,2,3}", dev,
                         1e-5));
}

void linear_suite(std::vector<CheckRow>& rows) {
    const ModeGrid grid(1);
    LinearBvpProblem resonant{grid, modal_forcing(grid, {{1, ModalShape::kCos, 1.0, 1.0}}),
                              periodic_boundary(1)};
    LinearBvpProblem nonresonant{grid, modal_forcing(grid, {{1, ModalShape::kCos, 2.0, 1.0}}),
                                 periodic_boundary(1)};
    const LinearSolveResult good = solve_linear(nonresonant);
    const LinearSolveResult bad = solve_linear(resonant);
    rows.push_back(bound("linear", "f = cos 2t: classical (0 = yes)",
                         good.classification == Classification::kClassical ? 0.0 : 1.0, 0.0));
    rows.push_back(bound("linear", "f = cos 2t: boundary residual",
                         boundary_residual(nonresonant.boundary, good.green_trajectory), 1e-8));
    rows.push_back(bound("linear", "f = cos t: pseudosolution (0 = yes)",
                         bad.classification == Classification::kPseudosolution ? 0.0 : 1.0, 0.0));
    rows.push_back(at_least("linear", "f = cos t: residual", bad.residual, 0.1));
}

void oracle_suite(std::vector<CheckRow>& rows) {
    for (double eps : {0.01, 0.005}) {
        char tag[32];
        std::snprintf(tag, sizeof tag, ", eps=%g", eps);
        const AmplitudePairs c0 = generating_torus(1, {1});
        const SolveReport report = iterate_vdp(VdpConfig{eps, ModeGrid(1), {1}, {}}, c0);
        const PeriodicOrbit orbit = shoot_periodic(c0.to_vector(), eps);
        rows.push_back(bound("oracle", std::string("solver amplitude - 2") + tag,
                             std::abs(report.amplitude_check.at(0) - 2.0), 0.02));
        rows.push_back(bound("oracle", std::string("shooting amplitude - 2") + tag,
                             std::abs(orbit.amplitude_per_mode.at(0) - 2.0), 0.02));
        rows.push_back(bound("oracle", std::string("solver vs shooting distance") + tag,
                             compare(report.trajectory, orbit, eps), 0.05));
    }
}

}  // namespace

std::vector<CheckRow> run_verify(const std::string& suite, unsigned long long seed) {
    const bool all = suite == "all";
    if (!all && std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end()) {
        throw std::invalid_argument("unknown suite '" + suite + "'");
    }
    Rng rng(seed);
    std::vector<CheckRow> rows;
    if (all || suite == "evolution") evolution_suite(rows, rng);
    if (all || suite == "pinv") pinv_suite(rows, rng);
    if (all || suite == "w-plus") w_plus_suite(rows);
    if (all || suite == "factorization") factorization_suite(rows, rng);
    if (all || suite == "vdp-F") vdp_f_suite(rows, rng);
    if (all || suite == "vdp-jacobian") vdp_jacobian_suite(rows, rng);
    if (all || suite == "linear") linear_suite(rows);
    if (all || suite == "oracle") oracle_suite(rows);
    return rows;
}

void print_table(std::ostream& out, const std::vector<CheckRow>& rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-58s %-12s %-12s %s\n", "suite", "check", "value",
                  "threshold", "status");
    out << line;
    for (const CheckRow& r : rows) {
        char threshold[32];
        if (r.informational) {
            std::snprintf(threshold, sizeof threshold, "%s", "-");
        } else {
            std::snprintf(threshold, sizeof threshold, "%.3e", r.threshold);
        }
        std::snprintf(line, sizeof line, "%-14s %-58s %-12.3e %-12s %s\n", r.suite.c_str(),
                      r.check.c_str(), r.value, threshold,
                      r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL"));
        out << line;
    }
}

}  // namespace hilbvp::cli
