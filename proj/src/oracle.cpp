#include "hilbvp/oracle.hpp"

#include "hilbvp/vdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace hilbvp {
namespace {

constexpr double kBlowUp = 1e6;
constexpr int kMaxNewton = 50;
constexpr double kFdStep = 1e-6;

std::vector<double> frequencies_for(const SpectralVector& state,
                                    std::span<const double> frequencies) {
    detail::require(state.size() >= 2 && state.size() % 2 == 0,
                    "state must have positive even length");
    const auto m = static_cast<int>(state.size() / 2);
    if (frequencies.empty()) return resonant_frequencies(m);
    detail::require_dimension(static_cast<Eigen::Index>(frequencies.size()), m, "frequencies");
    return {frequencies.begin(), frequencies.end()};
}

int even_steps(double t_end, double step) {
    detail::require(std::isfinite(step) && step > 0.0, "integrator step must be positive");
    detail::require(std::isfinite(t_end) && t_end > 0.0, "integration horizon must be positive");
    auto n = static_cast<long>(std::ceil(t_end / step - 1e-9));
    n = std::max(2L, n + (n % 2));
    detail::require(n < 200'000'000L, "too many integration steps");
    return static_cast<int>(n);
}

SpectralVector run(const VectorField& f, SpectralVector x, double t_end, int steps,
                   Samples* record) {
    const double h = t_end / steps;
    if (record) record->push_back(x);
    for (int i = 0; i < steps; ++i) {
        x = rk4_step(f, i * h, x, h);
        if (!x.allFinite() || x.norm() > kBlowUp) {
            std::ostringstream msg;
            msg << "integration blew up at t = " << (i + 1) * h;
            throw NumericalError(msg.str());
        }
        if (record) record->push_back(x);
    }
    return x;
}

}  // namespace

SpectralVector rk4_step(const VectorField& f, double t, const SpectralVector& x, double h) {
    const SpectralVector k1 = f(t, x);
    const SpectralVector k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const SpectralVector k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const SpectralVector k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VectorField vdp_vector_field(double eps, std::vector<double> frequencies) {
    auto w = std::make_shared<const std::vector<double>>(std::move(frequencies));
    return [eps, w](double, const SpectralVector& x) -> SpectralVector {
        SpectralVector out = apply_generator(x, *w);
        if (eps != 0.0) out += eps * nonlinearity_H(x, *w);
        return out;
    };
}

Trajectory integrate(const SpectralVector& state0, double eps, const IntegratorConfig& cfg,
                     std::span<const double> frequencies) {
    std::vector<double> w = frequencies_for(state0, frequencies);
    detail::require(std::isfinite(eps), "epsilon must be finite");
    const int steps = even_steps(cfg.t_end, cfg.step);
    const double h = cfg.t_end / steps;
    detail::require(*std::max_element(w.begin(), w.end()) * h < 0.5,
                    "integrator step too large: need w_max * step < 0.5");
    ModeGrid grid = ModeGrid::with_frequencies(w, steps, cfg.t_end);
    Samples samples;
    samples.reserve(grid.size());
    run(vdp_vector_field(eps, std::move(w)), state0, cfg.t_end, steps, &samples);
    return Trajectory{std::move(grid), std::move(samples)};
}

SpectralVector flow(const SpectralVector& state0, double eps, double t_end, int steps,
                    std::span<const double> frequencies) {
    detail::require(steps >= 1, "step count must be positive");
    return run(vdp_vector_field(eps, frequencies_for(state0, frequencies)), state0, t_end, steps,
               nullptr);
}

PeriodicOrbit shoot_periodic(const SpectralVector& guess, double eps, const IntegratorConfig& cfg,
                             std::span<const double> frequencies) {
    const std::vector<double> w = frequencies_for(guess, frequencies);
    const Eigen::Index n = guess.size();
    const int m = static_cast<int>(n / 2);
    const int steps = even_steps(kTwoPi, cfg.step);
    detail::require(*std::max_element(w.begin(), w.end()) * (kTwoPi / steps) < 0.5,
                    "integrator step too large: need w_max * step < 0.5");

    int phase_mode = 1;
    double best = -1.0;
    for (int k = 1; k <= m; ++k) {
        const double a = std::hypot(guess[2 * (k - 1)], guess[2 * (k - 1) + 1]);
        if (a > best) {
            best = a;
            phase_mode = k;
        }
    }
    const Eigen::Index pinned = 2 * (phase_mode - 1) + 1;

    PeriodicOrbit orbit;
    orbit.phase_mode = phase_mode;

    auto periodicity = [&](const SpectralVector& s, double period) {
        return SpectralVector(flow(s, eps, period, steps, w) - s);
    };
    auto system = [&](const Vector& u) {
        Vector g(n + 1);
        g.head(n) = periodicity(u.head(n), u[n]);
        g[n] = u[pinned];
        return g;
    };

    Vector u(n + 1);
    u.head(n) = guess;
    u[n] = kTwoPi;

    const double initial = periodicity(guess, kTwoPi).norm();
    if (initial <= kShootingTol) {
        orbit.initial_state = guess;
        orbit.residual = initial;
    } else {
        Vector g = system(u);
        int it = 0;
        for (; it < kMaxNewton && g.norm() > kShootingTol; ++it) {
            Matrix jac(n + 1, n + 1);
            for (Eigen::Index j = 0; j <= n; ++j) {
                const double h = kFdStep * (1.0 + std::abs(u[j]));
                Vector plus = u;
                Vector minus = u;
                plus[j] += h;
                minus[j] -= h;
                jac.col(j) = (system(plus) - system(minus)) / (2.0 * h);
            }
            const Vector du = jac.completeOrthogonalDecomposition().solve(-g);
            double lambda = 1.0;
            Vector trial = u + du;
            Vector g_trial = system(trial);
            for (int half = 0; half < 10 && g_trial.norm() > g.norm(); ++half) {
                lambda *= 0.5;
                trial = u + lambda * du;
                g_trial = system(trial);
            }
            u = trial;
            g = g_trial;
        }
        if (g.norm() > kShootingTol) {
            std::ostringstream msg;
            msg << "shooting did not converge in " << kMaxNewton << " Newton steps (residual "
                << g.norm() << ")";
            throw NumericalError(msg.str());
        }
        orbit.initial_state = u.head(n);
        orbit.period = u[n];
        orbit.residual = periodicity(orbit.initial_state, orbit.period).norm();
        orbit.newton_steps = it;
    }

    const Trajectory one_period =
        integrate(orbit.initial_state, eps, {orbit.period / steps, orbit.period}, w);
    for (int k = 1; k <= m; ++k) orbit.amplitude_per_mode.push_back(one_period.mode_amplitude(k));
    return orbit;
}

double compare(const Trajectory& solver_traj, const PeriodicOrbit& orbit, double eps,
               const IntegratorConfig& cfg) {
    const ModeGrid& grid = solver_traj.grid;
    detail::require_dimension(orbit.initial_state.size(), grid.dimension(), "compare: orbit state");
    const double hs = grid.step();
    const int q = std::max(1, static_cast<int>(std::ceil(hs / cfg.step - 1e-9)));
    const double h = hs / q;
    const auto shifts = static_cast<std::size_t>(std::ceil(orbit.period / h));
    const std::size_t needed = shifts + static_cast<std::size_t>(grid.intervals()) * q + 1;
    const std::vector<double>& w = grid.frequencies();
    detail::require(*std::max_element(w.begin(), w.end()) * h < 0.5,
                    "integrator step too large: need w_max * step < 0.5");

    Samples dense;
    dense.reserve(needed);
    run(vdp_vector_field(eps, w), orbit.initial_state, h * static_cast<double>(needed - 1),
        static_cast<int>(needed - 1), &dense);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s <= shifts; ++s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size() && worst < best; ++i) {
            worst = std::max(worst, (solver_traj.samples[i] - dense[s + i * q]).norm());
        }
        best = std::min(best, worst);
    }
    return best;
}

}  // namespace hilbvp
