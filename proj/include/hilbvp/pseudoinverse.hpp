#pragma once

// Moore-Penrose pseudoinversion through the SVD with an explicit rank
// tolerance, the kernel/cokernel orthoprojectors, and the structured-product
// formulas used for the van der Pol Jacobian B0 = V1 W V2.

#include "hilbvp/common.hpp"

#include <optional>
#include <string>

namespace hilbvp {

using DenseMatrix = Matrix;

inline constexpr double kDefaultConsistencyTol = 1e-8;

struct PinvResult {
    Matrix pinv;
    int rank = 0;
    /// P_N(A) = I - A^+ A, orthoprojector onto the kernel of A.
    Matrix kernel_projector;
    /// P_{H_A} = I - A A^+, orthoprojector onto the kernel of A^T.
    Matrix cokernel_projector;
    /// Orthonormal columns spanning N(A).
    Matrix kernel_basis;
    Vector singular_values;
    /// Threshold actually applied; singular values <= tolerance count as zero.
    double tolerance = 0.0;
};

/// Pseudoinverse of `a`. Without `rank_tol` the threshold is
/// max(rows, cols) * machine epsilon * sigma_max.
/// Throws std::invalid_argument for empty or non-finite input.
[[nodiscard]] PinvResult pinv(const Matrix& a, std::optional<double> rank_tol = std::nullopt);

struct LeastSquaresResult {
    Vector solution;       ///< A^+ b, the minimum-norm minimiser of ||A x - b||
    double residual_norm;  ///< ||A x - b||
    double cokernel_norm;  ///< ||(I - A A^+) b||
    bool is_consistent;    ///< cokernel_norm <= consistency_tol * (1 + ||b||)
};

[[nodiscard]] LeastSquaresResult least_squares_min_norm(
    const Matrix& a, const Vector& b, std::optional<double> rank_tol = std::nullopt,
    double consistency_tol = kDefaultConsistencyTol);

enum class FactoredFormula {
    /// (W V2)^+ W (V1 W)^+
    kProductOfPseudoinverses,
    /// (W V2)^* [W V2 (W V2)^* + I - W W^+]^{-1} W [(V1 V2)^* V1 W + I - W^+ W]^{-1} (V1 W)^*
    kBracketedInverse,
};

struct FactoredPinv {
    Matrix value;         ///< matrix produced by the requested formula
    Matrix direct;        ///< pinv(V1 W V2) computed directly
    double discrepancy;   ///< max-abs difference between value and direct
    /// Max-abs difference of the product formula against direct; always filled.
    double product_formula_discrepancy;
};

/// Pseudoinverse of V1 W V2 through a factored formula, always cross-checked
/// against the direct SVD pseudoinverse. Throws std::invalid_argument on
/// non-conforming factors and NumericalError when a bracketed inner matrix is
/// singular.
[[nodiscard]] FactoredPinv factored_pinv(
    const Matrix& v1, const Matrix& w, const Matrix& v2,
    FactoredFormula formula = FactoredFormula::kProductOfPseudoinverses);

/// W_j = j [[1, 1], [1, 1]].
[[nodiscard]] Matrix w_block(double j);

/// Closed-form W^+ = -1 / (2 (2N - 1) pi) * {W_{3-2N} on the diagonal, W_2 off it}
/// on the leading 2N x 2N block of a 2M x 2M matrix.
[[nodiscard]] Matrix w_plus_closed_form(int active_pairs, int mode_count);

/// || B0 B0^- B0 - B0 ||_F with B0 = V1 W V2 and B0^- = V2^{-1} W V1^{-1}.
/// Diagonal factors are inverted on their common support (the active block);
/// general factors must be invertible. Throws std::invalid_argument when the
/// active block of V1 or V2 is singular.
[[nodiscard]] double generalized_inverse_check(const Matrix& v1, const Matrix& w,
                                               const Matrix& v2);

}  // namespace hilbvp
