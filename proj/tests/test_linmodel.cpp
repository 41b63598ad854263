#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddlab/linmodel.hpp"
#include "ddlab/rng.hpp"
#include "oracles.hpp"

using namespace ddlab;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Design wrapper around a raw matrix, for tests that do not evaluate off
// the training points.
DesignMatrix raw_design(Matrix m) {
  DesignMatrix d;
  d.basis.kind = BasisKind::data_orthonormal;
  d.basis.degree_or_width = static_cast<int>(m.cols()) - 1;
  d.points = Vector::LinSpaced(m.rows(), -1.0, 1.0);
  d.matrix = std::move(m);
  d.r_inv = Matrix::Identity(d.matrix.cols(), d.matrix.cols());
  return d;
}

// The scalar model A = [1]: a degree-0 data-orthonormal design whose
// feature equals 1 everywhere (legendre phi_0 = sqrt(1/2) times r_inv).
DesignMatrix scalar_design(double x0) {
  DesignMatrix d;
  d.basis.kind = BasisKind::data_orthonormal;
  d.basis.degree_or_width = 0;
  d.points = Vector::Constant(1, x0);
  d.matrix = Matrix::Constant(1, 1, 1.0);
  d.r_inv = Matrix::Constant(1, 1, 1.0 / std::sqrt(0.5));
  return d;
}

GaussianLinearModel random_model(std::uint64_t seed, int max_rows, int max_cols) {
  Rng rng(seed);
  const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_rows - 1));
  const int p = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_cols));
  Matrix A(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
  GaussianLinearModel m{raw_design(std::move(A)), Vector(p), 0.25 + rng.uniform01()};
  for (int j = 0; j < p; ++j) m.prior_variances[j] = 0.5 + 2.0 * rng.uniform01();
  return m;
}

Vector random_y(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.normal();
  return y;
}

// Independent reference: log evidence by 2-D tensor-grid trapezoid
// quadrature of likelihood x prior, 400 points per axis over +-8 prior sd.
double quadrature_log_evidence(const GaussianLinearModel& m, const Vector& y, int grid = 400) {
  const Matrix& A = m.design.matrix;
  const double s2 = m.noise_variance;
  const auto log_joint = [&](double t0, double t1) {
    Vector theta(2);
    theta << t0, t1;
    const double rss = (y - A * theta).squaredNorm();
    double lp = -0.5 * y.size() * (kLog2Pi + std::log(s2)) - 0.5 * rss / s2;
    for (int j = 0; j < 2; ++j)
      lp += -0.5 * (kLog2Pi + std::log(m.prior_variances[j])) -
            0.5 * theta[j] * theta[j] / m.prior_variances[j];
    return lp;
  };
  const double r0 = 8.0 * std::sqrt(m.prior_variances[0]);
  const double r1 = 8.0 * std::sqrt(m.prior_variances[1]);
  return oracle::log_trapezoid_2d(log_joint, -r0, r0, -r1, r1, grid);
}

}  // namespace

TEST_CASE("posterior: flat-prior limit reproduces OLS on a square orthonormal design") {
  const Vector y = random_y(3, 1);
  GaussianLinearModel m{raw_design(Matrix::Identity(3, 3)), Vector::Constant(3, 1e12), 1.0};
  const PosteriorSummary post = posterior(m, y);
  CHECK((post.mean - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("posterior: scalar normal-normal identity") {
  for (double tau2 : {0.3, 1.0, 4.0}) {
    const double y0 = 1.7;
    GaussianLinearModel m{scalar_design(0.0), Vector::Constant(1, tau2), 1.0};
    const PosteriorSummary post = posterior(m, Vector::Constant(1, y0));
    CHECK(post.mean[0] == doctest::Approx(tau2 / (1.0 + tau2) * y0).epsilon(1e-12));
  }
}

TEST_CASE("posterior: vanishing prior pins the mean at zero") {
  const Vector y = random_y(4, 2);
  Matrix A(4, 2);
  A << 1, 0, 0, 1, 1, 1, 1, -1;
  GaussianLinearModel m{raw_design(A), Vector::Constant(2, 1e-12), 1.0};
  const PosteriorSummary post = posterior(m, y);
  CHECK(post.mean.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("posterior: coordinate-wise shrinkage on data-orthonormal designs") {
  const Vector x = Vector::LinSpaced(12, -1.0, 1.0);
  const DesignMatrix q = data_orthonormal_design(x, 4);
  const Vector y = random_y(12, 3);
  const double s2 = 0.09;
  Vector tau2(5);
  tau2 << 2.0, 1.0, 0.5, 0.25, 0.125;
  GaussianLinearModel m{q, tau2, s2};
  const Vector theta_hat = q.matrix.transpose() * y;
  const PosteriorSummary post = posterior(m, y);
  for (int j = 0; j < 5; ++j)
    CHECK(post.mean[j] ==
          doctest::Approx(tau2[j] / (tau2[j] + s2) * theta_hat[j]).epsilon(1e-10));
}

TEST_CASE("posterior: exactly singular threshold system is jittered, not fatal") {
  // A = [1 1] with effectively flat priors: A^T A / s2 + C^-1 = [[1,1],[1,1]]
  // exactly, whose second Cholesky pivot is exactly zero. The jitter retry
  // must kick in and return the min-norm interpolant (1,1).
  Matrix A(1, 2);
  A << 1, 1;
  GaussianLinearModel m{raw_design(A), Vector::Constant(2, 1e300), 1.0};
  const PosteriorSummary post = posterior(m, Vector::Constant(1, 2.0));
  CHECK(post.jitter_applied);
  CHECK(post.mean[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(post.mean[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::isfinite(post.log_evidence));
}

TEST_CASE("posterior: jitter flag stays clear on well-conditioned input") {
  const GaussianLinearModel m = random_model(4, 10, 3);
  const PosteriorSummary post = posterior(m, random_y(m.design.matrix.rows(), 5));
  CHECK_FALSE(post.jitter_applied);
}

TEST_CASE("log_evidence: scalar case equals the N(0, tau2 + s2) density") {
  const double tau2 = 0.7, s2 = 0.2, y0 = -1.1;
  GaussianLinearModel m{scalar_design(0.0), Vector::Constant(1, tau2), s2};
  const double expected =
      -0.5 * (kLog2Pi + std::log(tau2 + s2)) - 0.5 * y0 * y0 / (tau2 + s2);
  CHECK(log_evidence(m, Vector::Constant(1, y0)) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("log_evidence: y = 0 reduces to the log-determinant term") {
  Matrix A(3, 2);
  A << 1, 0.5, -1, 0.25, 0.5, 1;
  Vector tau2(2);
  tau2 << 0.8, 1.3;
  const double s2 = 0.4;
  GaussianLinearModel m{raw_design(A), tau2, s2};
  Matrix K = A * tau2.asDiagonal() * A.transpose();
  K.diagonal().array() += s2;
  const double expected = -1.5 * kLog2Pi - 0.5 * std::log(oracle::cofactor_det(K));
  CHECK(log_evidence(m, Vector::Zero(3)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_evidence: weight-space and function-space forms agree (Woodbury)") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Rng rng(7000 + seed);
    const int n = 2 + static_cast<int>(rng.next_u64() % 49);  // N <= 50
    const int p = 1 + static_cast<int>(rng.next_u64() % 40);  // p <= 40
    Matrix A(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    GaussianLinearModel m{raw_design(std::move(A)), Vector(p), 0.3 + rng.uniform01()};
    for (int j = 0; j < p; ++j) m.prior_variances[j] = 0.4 + rng.uniform01();
    const Vector y = random_y(n, 7100 + seed);
    const double ws = log_evidence_weight_space(m, y);
    const double fs = log_evidence_function_space(m, y);
    CHECK(std::abs(ws - fs) < 1e-8 * std::max(1.0, std::abs(ws)));
  }
}

TEST_CASE("log_evidence: two-parameter models match tensor-grid quadrature") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(7200 + seed);
    const int n = 4 + static_cast<int>(rng.next_u64() % 10);
    Matrix A(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) A(i, j) = rng.normal() / std::sqrt(static_cast<double>(n));
    GaussianLinearModel m{raw_design(std::move(A)), Vector(2), 0.36 + rng.uniform01()};
    m.prior_variances << 0.5 + rng.uniform01(), 0.5 + rng.uniform01();
    const Vector y = random_y(n, 7300 + seed);
    const double exact = log_evidence(m, y);
    const double quad = quadrature_log_evidence(m, y);
    CHECK(std::abs(exact - quad) < 1e-6 * std::abs(exact));
  }
}

TEST_CASE("log_evidence: doubling the noise variance of a pure-noise model") {
  // with prior variances ~0 the model is y ~ N(0, s2 I): doubling s2 with
  // y = 0 must change the log evidence by exactly -N/2 log 2.
  Matrix A(4, 2);
  A << 1, 0, 0, 1, 1, 1, 1, -1;
  const Vector y = Vector::Zero(4);
  GaussianLinearModel m{raw_design(A), Vector::Constant(2, 1e-14), 0.5};
  GaussianLinearModel m2 = m;
  m2.noise_variance = 1.0;
  CHECK(log_evidence(m2, y) - log_evidence(m, y) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("predictive: prior-dominated limit and variance floor") {
  const Vector x = Vector::LinSpaced(9, -1.0, 1.0);
  const DesignMatrix q = data_orthonormal_design(x, 3);
  const Vector y = random_y(9, 6);
  const double s2 = 0.09;

  GaussianLinearModel tight{q, Vector::Constant(4, 1e-12), s2};
  const Vector grid = Vector::LinSpaced(21, -1.0, 1.0);
  const PredictiveSummary pinched = predictive(tight, y, grid);
  CHECK(pinched.mean.cwiseAbs().maxCoeff() < 1e-5);
  CHECK((pinched.variance.array() - s2).abs().maxCoeff() < 1e-9);

  GaussianLinearModel loose{q, Vector::Constant(4, 1.0), s2};
  Rng rng(7);
  Vector random_points(100);
  for (int i = 0; i < 100; ++i) random_points[i] = -1.0 + 2.0 * rng.uniform01();
  const PredictiveSummary spread = predictive(loose, y, random_points);
  for (int i = 0; i < 100; ++i) CHECK(spread.variance[i] >= s2 - 1e-15);
}

TEST_CASE("predictive: scalar training-point mean is the shrunk observation") {
  const double tau2 = 0.9, s2 = 0.3, y0 = 2.4;
  GaussianLinearModel m{scalar_design(0.2), Vector::Constant(1, tau2), s2};
  const PredictiveSummary p = predictive(m, Vector::Constant(1, y0), Vector::Constant(1, 0.2));
  const double z = s2 / (s2 + tau2);
  CHECK(p.mean[0] == doctest::Approx((1.0 - z) * y0).epsilon(1e-12));
}

TEST_CASE("ols and ridge: orthonormal shortcut, lambda limits") {
  const Vector x = Vector::LinSpaced(10, -1.0, 1.0);
  const DesignMatrix q = data_orthonormal_design(x, 4);
  const Vector y = random_y(10, 8);
  const Vector beta = ols(q, y);
  CHECK((beta - q.matrix.transpose() * y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ridge(q, y, 0.0) - beta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ridge(q, y, 1e12).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("posterior mean approaches OLS as priors flatten (full rank)") {
  const GaussianLinearModel base = random_model(9, 12, 3);
  if (base.design.matrix.rows() <= base.design.matrix.cols()) return;
  GaussianLinearModel flat = base;
  flat.prior_variances.setConstant(1e12);
  const Vector y = random_y(base.design.matrix.rows(), 10);
  const Vector mean = posterior(flat, y).mean;
  const Vector beta = ols(base.design, y);
  CHECK((mean - beta).norm() < 1e-4 * beta.norm());
}

TEST_CASE("residual_stats: exact fits, degree-of-freedom guard, chi-square mean") {
  // three collinear points, degree-1 fit: s = 0, d = 1
  Vector x(3);
  x << -1.0, 0.0, 1.0;
  const DesignMatrix line = data_orthonormal_design(x, 1);
  Vector y_line(3);
  y_line << -2.0, 0.5, 3.0;  // y = 0.5 + 2.5 x
  const auto [s_line, d_line] = residual_stats(line, y_line);
  CHECK(s_line < 1e-20);
  CHECK(d_line == 1);

  const DesignMatrix square = data_orthonormal_design(x, 2);
  CHECK_THROWS_AS(residual_stats(square, y_line), DegreesOfFreedomError);

  // E[s] = d sigma^2: average over 2000 replicates within 5%
  const Vector xs = Vector::LinSpaced(12, -1.0, 1.0);
  const DesignMatrix q = data_orthonormal_design(xs, 3);
  const double sigma = 0.7;
  double acc = 0.0;
  const int reps = 2000;
  Rng rng(11);
  for (int r = 0; r < reps; ++r) {
    Vector y(12);
    for (int i = 0; i < 12; ++i) y[i] = sigma * rng.normal();
    acc += residual_stats(q, y).first;
  }
  const double expected = (12 - 4) * sigma * sigma;
  CHECK(std::abs(acc / reps - expected) < 0.05 * expected);
}

TEST_CASE("mle_loglik: closed form at the least-squares fit") {
  const GaussianLinearModel m = random_model(12, 10, 3);
  const Vector y = random_y(m.design.matrix.rows(), 13);
  const Vector theta = min_norm_least_squares(m.design.matrix, y);
  const double rss = (y - m.design.matrix * theta).squaredNorm();
  const double n = static_cast<double>(y.size());
  const double expected =
      -0.5 * n * (kLog2Pi + std::log(m.noise_variance)) - 0.5 * rss / m.noise_variance;
  CHECK(mle_loglik(m, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dimension mismatches are reported") {
  const GaussianLinearModel m = random_model(14, 8, 3);
  CHECK_THROWS_AS(log_evidence(m, Vector::Ones(m.design.matrix.rows() + 1)), DimensionError);
  GaussianLinearModel bad = m;
  bad.prior_variances = Vector::Ones(m.design.matrix.cols() + 1);
  CHECK_THROWS_AS(posterior(bad, Vector::Ones(m.design.matrix.rows())), DimensionError);
}
