#include "hilbvp/pseudoinverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilbvp {
namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_diagonal(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) != 0.0) return false;
        }
    }
    return true;
}

Matrix checked_inverse(const Matrix& m, const char* what) {
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) {
        throw NumericalError(std::string("singular inner bracket in ") + what);
    }
    return lu.inverse();
}

}  // namespace

PinvResult pinv(const Matrix& a, std::optional<double> rank_tol) {
    detail::require(a.size() > 0, "pinv: empty matrix");
    detail::require(a.allFinite(), "pinv: non-finite entries");
    detail::require(!rank_tol || (std::isfinite(*rank_tol) && *rank_tol >= 0.0),
                    "pinv: rank tolerance must be non-negative");

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    const double tol =
        rank_tol.value_or(static_cast<double>(std::max(a.rows(), a.cols())) *
                          std::numeric_limits<double>::epsilon() * sigma_max);

    int rank = 0;
    while (rank < sigma.size() && sigma[rank] > tol) ++rank;

    const Matrix& u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    const Matrix ur = u.leftCols(rank);
    const Matrix vr = v.leftCols(rank);

    PinvResult out;
    out.rank = rank;
    out.tolerance = tol;
    out.singular_values = sigma;
    out.pinv = vr * sigma.head(rank).cwiseInverse().asDiagonal() * ur.transpose();
    out.kernel_projector =
        symmetrized(Matrix::Identity(a.cols(), a.cols()) - vr * vr.transpose());
    out.cokernel_projector =
        symmetrized(Matrix::Identity(a.rows(), a.rows()) - ur * ur.transpose());
    out.kernel_basis = v.rightCols(a.cols() - rank);
    return out;
}

LeastSquaresResult least_squares_min_norm(const Matrix& a, const Vector& b,
                                          std::optional<double> rank_tol,
                                          double consistency_tol) {
    detail::require_dimension(b.size(), a.rows(), "least_squares_min_norm: right-hand side");
    const PinvResult p = pinv(a, rank_tol);
    LeastSquaresResult out;
    out.solution = p.pinv * b;
    out.residual_norm = (a * out.solution - b).norm();
    out.cokernel_norm = (p.cokernel_projector * b).norm();
    out.is_consistent = out.cokernel_norm <= consistency_tol * (1.0 + b.norm());
    return out;
}

FactoredPinv factored_pinv(const Matrix& v1, const Matrix& w, const Matrix& v2,
                           FactoredFormula formula) {
    detail::require(v1.cols() == w.rows() && w.cols() == v2.rows(),
                    "factored_pinv: factors do not conform for V1 W V2");
    const Matrix product = v1 * w * v2;
    const Matrix direct = pinv(product).pinv;
    const Matrix wv2 = w * v2;
    const Matrix v1w = v1 * w;
    const Matrix by_product = pinv(wv2).pinv * w * pinv(v1w).pinv;

    FactoredPinv out;
    out.direct = direct;
    out.product_formula_discrepancy = (by_product - direct).cwiseAbs().maxCoeff();

    if (formula == FactoredFormula::kProductOfPseudoinverses) {
        out.value = by_product;
        out.discrepancy = out.product_formula_discrepancy;
        return out;
    }

    const Eigen::Index n = w.rows();
    detail::require(w.cols() == n && v1.rows() == n && v1.cols() == n && v2.rows() == n &&
                        v2.cols() == n,
                    "factored_pinv: bracketed formula needs square factors of one size");
    const Matrix w_pinv = pinv(w).pinv;
    const Matrix eye = Matrix::Identity(n, n);
    const Matrix left =
        checked_inverse(wv2 * wv2.transpose() + eye - w * w_pinv, "(W V2) bracket");
    const Matrix right = checked_inverse((v1 * v2).transpose() * v1w + eye - w_pinv * w,
                                         "(V1 W) bracket");
    out.value = wv2.transpose() * left * w * right * v1w.transpose();
    out.discrepancy = (out.value - direct).cwiseAbs().maxCoeff();
    return out;
}

Matrix w_block(double j) { return Matrix::Constant(2, 2, j); }

Matrix w_plus_closed_form(int active_pairs, int mode_count) {
    detail::require(active_pairs >= 1, "w_plus_closed_form: need at least one active pair");
    detail::require(active_pairs <= mode_count, "w_plus_closed_form: N must not exceed M");
    const int n = active_pairs;
    const double scale = -1.0 / (2.0 * (2.0 * n - 1.0) * kPi);
    Matrix out = Matrix::Zero(2 * mode_count, 2 * mode_count);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            out.block<2, 2>(2 * k, 2 * j) = scale * w_block(k == j ? 3.0 - 2.0 * n : 2.0);
        }
    }
    return out;
}

double generalized_inverse_check(const Matrix& v1, const Matrix& w, const Matrix& v2) {
    detail::require(v1.cols() == w.rows() && w.cols() == v2.rows(),
                    "generalized_inverse_check: factors do not conform");
    const Matrix b0 = v1 * w * v2;

    auto restricted_inverse = [](const Matrix& v, const Matrix& partner, const char* name) {
        if (is_diagonal(v) && is_diagonal(partner)) {
            Matrix inv = Matrix::Zero(v.rows(), v.cols());
            for (Eigen::Index i = 0; i < v.rows(); ++i) {
                const bool here = v(i, i) != 0.0;
                const bool there = partner(i, i) != 0.0;
                if (here != there) {
                    throw std::invalid_argument(std::string("generalized_inverse_check: ") +
                                                name + " is singular on the active block");
                }
                if (here) inv(i, i) = 1.0 / v(i, i);
            }
            return inv;
        }
        Eigen::FullPivLU<Matrix> lu(v);
        if (v.rows() != v.cols() || !lu.isInvertible()) {
            throw std::invalid_argument(std::string("generalized_inverse_check: ") + name +
                                        " is singular");
        }
        return Matrix(lu.inverse());
    };

    detail::require(v1.rows() == v1.cols() && v2.rows() == v2.cols(),
                    "generalized_inverse_check: V1 and V2 must be square");
    const bool both_diagonal = is_diagonal(v1) && is_diagonal(v2) && v1.rows() == v2.rows();
    const Matrix v1_inv = restricted_inverse(v1, both_diagonal ? v2 : v1, "V1");
    const Matrix v2_inv = restricted_inverse(v2, both_diagonal ? v1 : v2, "V2");
    const Matrix g = v2_inv * w * v1_inv;
    return (b0 * g * b0 - b0).norm();
}

}  // namespace hilbvp
