#pragma once

#include <Eigen/Dense>

#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hilbvp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Truncated modal state, interleaved as (x_1, y_1, x_2, y_2, ..., x_M, y_M).
using SpectralVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when a computation is well-posed but fails numerically
/// (divergence, Newton failure, blow-up, violated solvability condition).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Warnings are routed through a process-wide sink; the default writes to stderr.
void warn(std::string_view message);
void set_warning_sink(std::function<void(std::string_view)> sink);

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

inline void require_dimension(Eigen::Index actual, Eigen::Index expected, const char* what) {
    if (actual != expected) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(actual));
    }
}

}  // namespace detail
}  // namespace hilbvp
