#include "hilbvp/iteration.hpp"
#include "hilbvp/linear_bvp.hpp"
#include "hilbvp/oracle.hpp"
#include "hilbvp/pseudoinverse.hpp"
#include "hilbvp/vdp.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hilbvp;

namespace {

// Rows are grid times, columns the interleaved state (x1, y1, x2, y2, ...).
Matrix samples_matrix(const Trajectory& t) {
    Matrix out(static_cast<Eigen::Index>(t.samples.size()), t.grid.dimension());
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = t.samples[i].transpose();
    }
    return out;
}

Vector times_vector(const ModeGrid& g) {
    Vector out(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) out[static_cast<Eigen::Index>(i)] = g.time(i);
    return out;
}

AmplitudePairs torus(int modes, const std::vector<int>& active, const std::vector<double>& phases) {
    return generating_torus(modes, active, phases);
}

}  // namespace

PYBIND11_MODULE(_hilbvp, m) {
    m.doc() = "Pseudoinverse-based solvers for weakly nonlinear periodic problems";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("resonant_frequencies", &resonant_frequencies, py::arg("mode_count"));
    m.def("apply_evolution",
          py::overload_cast<double, const SpectralVector&, int>(&apply_evolution), py::arg("t"),
          py::arg("v"), py::arg("mode_count"));
    m.def("torus_amplitude", &torus_amplitude, py::arg("active_count"));

    m.def(
        "generating_torus",
        [](int modes, const std::vector<int>& active, const std::vector<double>& phases) {
            return torus(modes, active, phases).to_vector();
        },
        py::arg("mode_count"), py::arg("active"), py::arg("phases") = std::vector<double>{});
    m.def(
        "generating_F",
        [](const SpectralVector& c, bool closed) {
            const AmplitudePairs pairs = AmplitudePairs::from_vector(c);
            return closed ? generating_F_closed(pairs) : generating_F(pairs);
        },
        py::arg("c"), py::arg("closed") = true);
    m.def(
        "jacobian_B0",
        [](const SpectralVector& c, bool closed) {
            const AmplitudePairs pairs = AmplitudePairs::from_vector(c);
            return closed ? jacobian_B0_closed(pairs) : jacobian_B0_fd(pairs);
        },
        py::arg("c"), py::arg("closed") = true);

    m.def(
        "pinv",
        [](const Matrix& a, std::optional<double> tol) {
            const PinvResult r = pinv(a, tol);
            py::dict out;
            out["pinv"] = r.pinv;
            out["rank"] = r.rank;
            out["singular_values"] = r.singular_values;
            out["kernel_basis"] = r.kernel_basis;
            return out;
        },
        py::arg("a"), py::arg("rank_tol") = py::none());
    m.def("w_plus_closed_form", &w_plus_closed_form, py::arg("active_pairs"),
          py::arg("mode_count"));

    m.def(
        "solve_periodic_linear",
        [](int modes, int intervals, int mode, double frequency, double amplitude, bool sine) {
            const ModeGrid grid(modes, intervals);
            const ModalShape shape = sine ? ModalShape::kSin : ModalShape::kCos;
            const LinearBvpProblem problem{
                grid, modal_forcing(grid, {{mode, shape, frequency, amplitude}}),
                periodic_boundary(modes)};
            const LinearSolveResult r = solve_linear(problem);
            py::dict out;
            out["classification"] = std::string(to_string(r.classification));
            out["residual"] = r.residual;
            out["times"] = times_vector(grid);
            out["states"] = samples_matrix(r.green_trajectory);
            return out;
        },
        py::arg("mode_count"), py::arg("intervals") = 256, py::arg("mode") = 1,
        py::arg("frequency") = 2.0, py::arg("amplitude") = 1.0, py::arg("sine") = false);

    m.def(
        "solve_vdp",
        [](double eps, int modes, const std::vector<int>& active, const std::vector<double>& phases,
           int intervals, double tol, int max_iter) {
            const VdpConfig config{eps, ModeGrid(modes, intervals), active, phases};
            IterationOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            const SolveReport r = iterate_vdp(config, torus(modes, active, phases), opts);
            py::dict out;
            out["converged"] = r.converged;
            out["iterations"] = r.iterations;
            out["final_delta"] = r.final_delta;
            out["classification"] = std::string(to_string(r.classification));
            out["boundary_residual"] = r.boundary_residual;
            out["ode_residual"] = r.ode_residual;
            out["amplitudes"] = r.amplitude_check;
            out["c"] = r.c;
            out["times"] = times_vector(r.trajectory.grid);
            out["states"] = samples_matrix(r.trajectory);
            return out;
        },
        py::arg("epsilon"), py::arg("mode_count") = 1, py::arg("active") = std::vector<int>{1},
        py::arg("phases") = std::vector<double>{}, py::arg("intervals") = 256,
        py::arg("tol") = 1e-10, py::arg("max_iter") = 200);

    m.def(
        "shoot_periodic",
        [](const SpectralVector& guess, double eps) {
            const PeriodicOrbit o = shoot_periodic(guess, eps);
            py::dict out;
            out["initial_state"] = o.initial_state;
            out["period"] = o.period;
            out["amplitudes"] = o.amplitude_per_mode;
            out["residual"] = o.residual;
            out["newton_steps"] = o.newton_steps;
            return out;
        },
        py::arg("guess"), py::arg("epsilon"));
}
