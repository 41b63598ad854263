#include "ddlab/numerics.hpp"

#include <cmath>
#include <string>

namespace ddlab {

QrThin qr_thin(const Matrix& A) {
  if (A.rows() < A.cols())
    throw DimensionError("qr_thin: need rows >= cols, got " + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()));
  if (A.cols() < 1) throw DimensionError("qr_thin: matrix has no columns");

  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix R = Matrix(qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>());
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (R(j, j) < 0.0) {
      R.row(j) = -R.row(j);
      Q.col(j) = -Q.col(j);
    }
  }

  const double dmax = R.diagonal().cwiseAbs().maxCoeff();
  const double dmin = R.diagonal().cwiseAbs().minCoeff();
  if (!(dmin > 1e-12 * dmax))
    throw RankError("qr_thin: rank-deficient matrix: min |R(j,j)| = " + std::to_string(dmin) +
                    " fails the 1e-12 relative diagonal test against max |R(j,j)| = " +
                    std::to_string(dmax));
  return {std::move(Q), std::move(R)};
}

SpdFactor cholesky(const Matrix& S) {
  if (S.rows() != S.cols())
    throw DimensionError("cholesky: matrix must be square, got " + std::to_string(S.rows()) +
                         "x" + std::to_string(S.cols()));
  const Eigen::Index n = S.rows();
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw NotSpdError("cholesky: input not symmetric within 1e-12 (max |S - S^T| = " +
                          std::to_string(asym) + ")",
                      -1);

  Matrix A = 0.5 * (S + S.transpose());  // symmetrize roundoff away
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = A(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0))
      throw NotSpdError("cholesky: matrix not positive definite, pivot " + std::to_string(j) +
                            " nonpositive (leading minor of order " + std::to_string(j + 1) +
                            ")",
                        static_cast<int>(j));
    L(j, j) = std::sqrt(d);
    if (j + 1 < n) {
      L.col(j).tail(n - j - 1) =
          (A.col(j).tail(n - j - 1) -
           L.bottomLeftCorner(n - j - 1, j) * L.row(j).head(j).transpose()) /
          L(j, j);
    }
  }
  return {std::move(L)};
}

Vector solve_spd(const SpdFactor& F, const Vector& b) {
  if (F.dimension() != b.size())
    throw DimensionError("solve_spd: factor dimension " + std::to_string(F.dimension()) +
                         " does not match rhs length " + std::to_string(b.size()));
  Vector x = F.L.triangularView<Eigen::Lower>().solve(b);
  F.L.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

double logdet_spd(const SpdFactor& F) {
  return 2.0 * F.L.diagonal().array().log().sum();
}

Vector min_norm_least_squares(const Matrix& A, const Vector& y, double tol) {
  if (A.rows() != y.size())
    throw DimensionError("min_norm_least_squares: " + std::to_string(A.rows()) +
                         " rows vs rhs length " + std::to_string(y.size()));
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(tol);
  return svd.solve(y);
}

}  // namespace ddlab
