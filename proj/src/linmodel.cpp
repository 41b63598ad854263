#include "ddlab/linmodel.hpp"

#include <cmath>
#include <string>

namespace ddlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

void check_model(const GaussianLinearModel& m) {
  if (m.prior_variances.size() != m.design.matrix.cols())
    throw DimensionError("GaussianLinearModel: " + std::to_string(m.prior_variances.size()) +
                         " prior variances for " + std::to_string(m.design.matrix.cols()) +
                         " design columns");
  if (!(m.noise_variance > 0.0) || !std::isfinite(m.noise_variance))
    throw DomainViolation("GaussianLinearModel: noise_variance must be positive and finite");
  for (Eigen::Index j = 0; j < m.prior_variances.size(); ++j)
    if (!(m.prior_variances[j] > 0.0) || !std::isfinite(m.prior_variances[j]))
      throw DomainViolation("GaussianLinearModel: prior variance " + std::to_string(j) +
                            " must be positive and finite");
}

void check_y(const GaussianLinearModel& m, const Vector& y) {
  if (y.size() != m.design.matrix.rows())
    throw DimensionError("linmodel: y length " + std::to_string(y.size()) +
                         " does not match design rows " + std::to_string(m.design.matrix.rows()));
}

// Cholesky with a single jitter retry (1e-10 * trace / dim added to the
// diagonal) for systems singular at working precision, e.g. at the
// interpolation threshold with near-flat priors.
SpdFactor cholesky_jittered(Matrix S, bool* jitter_applied) {
  try {
    return cholesky(S);
  } catch (const NotSpdError&) {
    const double jitter = 1e-10 * S.trace() / static_cast<double>(S.rows());
    S.diagonal().array() += jitter;
    if (jitter_applied) *jitter_applied = true;
    return cholesky(S);
  }
}

Matrix spd_inverse(const SpdFactor& F) {
  const Eigen::Index n = F.dimension();
  Matrix X = F.L.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  F.L.transpose().triangularView<Eigen::Upper>().solveInPlace(X);
  return X;
}

// M = A^T A / sigma^2 + C^-1 and b = A^T y / sigma^2.
struct WeightSpace {
  Matrix M;
  Vector b;
};

WeightSpace weight_space(const GaussianLinearModel& m, const Vector& y) {
  const Matrix& A = m.design.matrix;
  WeightSpace ws;
  ws.M = A.transpose() * A / m.noise_variance;
  ws.M.diagonal() += m.prior_variances.cwiseInverse();
  ws.b = A.transpose() * y / m.noise_variance;
  return ws;
}

// Shared by posterior() and log_evidence_weight_space(), so the evidence a
// posterior reports is consistent with the (possibly jittered) factor it used.
double evidence_from_factor(const GaussianLinearModel& m, const Vector& y, const SpdFactor& F,
                            const Vector& b) {
  const double n = static_cast<double>(y.size());
  // matrix determinant lemma: logdet(ACA^T + s2 I) = N log s2 + sum log c_j + logdet M
  const double logdet_k =
      n * std::log(m.noise_variance) + m.prior_variances.array().log().sum() + logdet_spd(F);
  // Woodbury: y^T K^-1 y = y^T y / s2 - b^T M^-1 b
  const double quad = y.squaredNorm() / m.noise_variance - b.dot(solve_spd(F, b));
  return -0.5 * n * kLog2Pi - 0.5 * logdet_k - 0.5 * quad;
}

}  // namespace

double log_evidence_weight_space(const GaussianLinearModel& m, const Vector& y) {
  check_model(m);
  check_y(m, y);
  WeightSpace ws = weight_space(m, y);
  SpdFactor F = cholesky_jittered(std::move(ws.M), nullptr);
  return evidence_from_factor(m, y, F, ws.b);
}

double log_evidence_function_space(const GaussianLinearModel& m, const Vector& y) {
  check_model(m);
  check_y(m, y);
  const Matrix& A = m.design.matrix;
  const double n = static_cast<double>(y.size());
  Matrix K = A * m.prior_variances.asDiagonal() * A.transpose();
  K.diagonal().array() += m.noise_variance;
  SpdFactor F = cholesky_jittered(std::move(K), nullptr);
  return -0.5 * n * kLog2Pi - 0.5 * logdet_spd(F) - 0.5 * y.dot(solve_spd(F, y));
}

double log_evidence(const GaussianLinearModel& m, const Vector& y) {
  check_model(m);
  check_y(m, y);
  return (m.design.matrix.cols() < m.design.matrix.rows()) ? log_evidence_weight_space(m, y)
                                                           : log_evidence_function_space(m, y);
}

PosteriorSummary posterior(const GaussianLinearModel& m, const Vector& y) {
  check_model(m);
  check_y(m, y);
  WeightSpace ws = weight_space(m, y);

  PosteriorSummary out;
  SpdFactor F = cholesky_jittered(std::move(ws.M), &out.jitter_applied);
  out.mean = solve_spd(F, ws.b);
  out.log_evidence = evidence_from_factor(m, y, F, ws.b);

  Matrix sigma_post = m.noise_variance * spd_inverse(F);
  sigma_post = 0.5 * (sigma_post + sigma_post.transpose());  // enforce exact symmetry
  out.covariance_factor = cholesky_jittered(std::move(sigma_post), &out.jitter_applied);
  return out;
}

PredictiveSummary predictive(const GaussianLinearModel& m, const Vector& y,
                             const Vector& new_points) {
  PosteriorSummary post = posterior(m, y);
  const Matrix phi = m.design.evaluate_at(new_points);
  PredictiveSummary out;
  out.mean = phi * post.mean;
  // var_i = phi_i^T Sigma phi_i + s2 = ||L^T phi_i||^2 + s2
  const Matrix lt_phi = post.covariance_factor.L.transpose() * phi.transpose();
  out.variance = lt_phi.colwise().squaredNorm().transpose();
  out.variance.array() += m.noise_variance;
  return out;
}

Vector ols(const DesignMatrix& design, const Vector& y) {
  if (design.matrix.rows() != y.size())
    throw DimensionError("ols: y length does not match design rows");
  QrThin qr = qr_thin(design.matrix);  // throws RankError when column-deficient
  Vector rhs = qr.Q.transpose() * y;
  qr.R.triangularView<Eigen::Upper>().solveInPlace(rhs);
  return rhs;
}

Vector ridge(const DesignMatrix& design, const Vector& y, double lambda) {
  if (design.matrix.rows() != y.size())
    throw DimensionError("ridge: y length does not match design rows");
  if (lambda < 0.0) throw DomainViolation("ridge: lambda must be >= 0");
  const Matrix& A = design.matrix;
  Matrix M = A.transpose() * A;
  M.diagonal().array() += lambda;
  return solve_spd(cholesky(M), A.transpose() * y);
}

std::pair<double, int> residual_stats(const DesignMatrix& design, const Vector& y) {
  const int n = static_cast<int>(design.matrix.rows());
  const int k = static_cast<int>(design.matrix.cols());
  const int d = n - k;
  if (d < 1)
    throw DegreesOfFreedomError(
        "residual_stats: nonpositive degrees of freedom, need N > p+1 (N = " +
        std::to_string(n) + ", p+1 = " + std::to_string(k) +
        "); interpolating fits give s = 0");
  const Vector theta = ols(design, y);
  const double s = (y - design.matrix * theta).squaredNorm();
  return {s, d};
}

double mle_loglik(const GaussianLinearModel& m, const Vector& y) {
  check_model(m);
  check_y(m, y);
  const double n = static_cast<double>(y.size());
  const Vector theta = min_norm_least_squares(m.design.matrix, y);
  const double rss = (y - m.design.matrix * theta).squaredNorm();
  return -0.5 * n * (kLog2Pi + std::log(m.noise_variance)) - 0.5 * rss / m.noise_variance;
}

}  // namespace ddlab
