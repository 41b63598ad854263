#pragma once

#include <Eigen/Dense>

#include "ddlab/errors.hpp"

// Dense linear-algebra kernel shared by all modules. Eigen supplies the
// factorizations; the functions here pin down the conventions the rest of
// the code relies on (QR sign convention, SPD pivot reporting, SVD cutoff).

namespace ddlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular Cholesky factor L with L*L^T = S.
struct SpdFactor {
  Matrix L;
  Eigen::Index dimension() const { return L.rows(); }
};

struct QrThin {
  Matrix Q;  // rows(A) x cols(A), orthonormal columns
  Matrix R;  // cols(A) x cols(A), upper triangular, positive diagonal
};

// Thin (economy) QR with the sign convention R(j,j) > 0. Throws RankError
// when min |R(j,j)| <= 1e-12 * max |R(j,j)|.
QrThin qr_thin(const Matrix& A);

// Hand-rolled lower Cholesky so failures can name the offending pivot.
// Input must be symmetric within 1e-12 (relative to its largest entry).
SpdFactor cholesky(const Matrix& S);

// Solve S x = b given the factor of S.
Vector solve_spd(const SpdFactor& F, const Vector& b);

// log det S = 2 * sum(log diag(L)).
double logdet_spd(const SpdFactor& F);

// Minimum-norm least-squares solution via SVD; singular values below
// tol * sigma_max are treated as zero.
Vector min_norm_least_squares(const Matrix& A, const Vector& y, double tol = 1e-10);

}  // namespace ddlab
