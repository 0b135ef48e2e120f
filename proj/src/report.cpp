#include "hilbvp/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hilbvp {
namespace {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write(std::ostringstream& out, const nlohmann::json& value, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (value.type()) {
        case nlohmann::json::value_t::object: {
            if (value.empty()) {
                out << "{}";
                return;
            }
            out << '{' << nl;
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out << ',' << nl;
                first = false;
                out << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
                write(out, it.value(), indent, depth + 1);
            }
            out << nl << close_pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (value.empty()) {
                out << "[]";
                return;
            }
            out << '[' << nl;
            bool first = true;
            for (const auto& item : value) {
                if (!first) out << ',' << nl;
                first = false;
                out << pad;
                write(out, item, indent, depth + 1);
            }
            out << nl << close_pad << ']';
            return;
        }
        case nlohmann::json::value_t::number_float:
            out << format_double(value.get<double>());
            return;
        default:
            out << value.dump();
            return;
    }
}

nlohmann::json pinv_summary(const PinvResult& p) {
    return {{"rank", p.rank},
            {"rank_tolerance", p.tolerance},
            {"singular_values", vector_to_json(p.singular_values)}};
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
    std::ostringstream out;
    write(out, value, indent, 0);
    if (indent > 0) out << '\n';
    return out.str();
}

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
    return out;
}

std::string solve_classification(Classification c) {
    return c == Classification::kClassical ? "solution" : "pseudosolution";
}

nlohmann::json to_json(const SolveReport& report) {
    nlohmann::json amplitudes = nlohmann::json::array();
    for (std::size_t i = 0; i < report.active_modes.size(); ++i) {
        amplitudes.push_back({{"mode", report.active_modes[i]},
                              {"amplitude", report.amplitude_check[i]}});
    }
    nlohmann::json history = nlohmann::json::array();
    for (const IterationRecord& r : report.history) {
        history.push_back({{"m", r.m}, {"delta", r.delta}, {"residual", r.residual}});
    }
    return {{"converged", report.converged},
            {"iterations", report.iterations},
            {"final_delta", report.final_delta},
            {"tol", report.tol},
            {"epsilon", report.epsilon},
            {"ode_residual", report.ode_residual},
            {"boundary_residual", report.boundary_residual},
            {"classification", solve_classification(report.classification)},
            {"cokernel_norm", report.cokernel_norm},
            {"exact_generating", report.exact_generating},
            {"pinv_discrepancy", report.pinv_discrepancy},
            {"amplitude_check", amplitudes},
            {"c", vector_to_json(report.c)},
            {"b", vector_to_json(report.b)},
            {"mode_count", report.trajectory.grid.mode_count()},
            {"grid_points", report.trajectory.grid.size()},
            {"diagnostic", report.diagnostic},
            {"history", history}};
}

nlohmann::json to_json(const LinearSolveResult& result) {
    return {{"classification", std::string(to_string(result.classification))},
            {"residual", result.residual},
            {"consistency_tolerance", result.consistency_tol},
            {"particular", vector_to_json(result.particular)},
            {"kernel_dimension", result.kernel_basis.cols()},
            {"kernel_basis", matrix_to_json(result.kernel_basis)},
            {"g1", vector_to_json(result.g1)},
            {"q", matrix_to_json(result.q)},
            {"pinv", pinv_summary(result.q_pinv)},
            {"mode_count", result.green_trajectory.grid.mode_count()},
            {"grid_points", result.green_trajectory.grid.size()}};
}

std::string iteration_log(const SolveReport& report) {
    std::ostringstream out;
    for (const IterationRecord& r : report.history) {
        out << "iter " << r.m << ' ' << format_double(r.delta) << ' ' << format_double(r.residual)
            << '\n';
    }
    return out.str();
}

}  // namespace hilbvp
