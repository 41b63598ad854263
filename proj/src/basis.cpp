#include "ddlab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ddlab/rng.hpp"

namespace ddlab {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check_interval(double a, double b, const char* who) {
  if (!(a < b)) throw DomainViolation(std::string(who) + ": need a < b");
}

void check_in_domain(const Vector& x, double a, double b, const char* who) {
  const double slack = 1e-9 * (b - a);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < a - slack || x[i] > b + slack)
      throw DomainViolation(std::string(who) + ": point x = " + std::to_string(x[i]) +
                            " outside domain [" + std::to_string(a) + ", " + std::to_string(b) +
                            "]");
  }
}

Eigen::Index count_distinct(const Vector& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  return static_cast<Eigen::Index>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

Matrix legendre_rows(const Vector& x, int degree, double a, double b) {
  check_interval(a, b, "legendre_rows");
  Matrix M(x.size(), degree + 1);
  const double c0 = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = (2.0 * x[i] - (a + b)) / (b - a);
    M(i, 0) = c0;
    double pm1 = 1.0, p = t;  // P_0, P_1
    if (degree >= 1) M(i, 1) = std::sqrt(1.5) * t;
    for (int j = 2; j <= degree; ++j) {
      // j P_j = (2j-1) t P_{j-1} - (j-1) P_{j-2}
      const double pj = ((2.0 * j - 1.0) * t * p - (j - 1.0) * pm1) / j;
      M(i, j) = std::sqrt((2.0 * j + 1.0) / 2.0) * pj;
      pm1 = p;
      p = pj;
    }
  }
  return M;
}

DesignMatrix legendre_design(const Vector& points, int degree, double a, double b) {
  if (degree < 0) throw DomainViolation("legendre_design: degree must be >= 0");
  check_interval(a, b, "legendre_design");
  check_in_domain(points, a, b, "legendre_design");
  DesignMatrix d;
  d.basis = {BasisKind::legendre, degree, a, b, 0};
  d.points = points;
  d.matrix = legendre_rows(points, degree, a, b);
  d.map_a = a;
  d.map_b = b;
  return d;
}

DesignMatrix data_orthonormal_design(const Vector& points, int degree) {
  if (degree < 0) throw DomainViolation("data_orthonormal_design: degree must be >= 0");
  const Eigen::Index distinct = count_distinct(points);
  if (distinct < degree + 1)
    throw RankError("data_orthonormal_design: too few distinct points (" +
                    std::to_string(distinct) + ") for degree " + std::to_string(degree) +
                    ", need at least degree+1");
  const double lo = points.minCoeff(), hi = points.maxCoeff();
  QrThin qr = qr_thin(legendre_rows(points, degree, lo, hi));
  DesignMatrix d;
  d.basis = {BasisKind::data_orthonormal, degree, lo, hi, 0};
  d.points = points;
  d.matrix = std::move(qr.Q);
  d.map_a = lo;
  d.map_b = hi;
  d.r_inv = qr.R.triangularView<Eigen::Upper>().solve(Matrix::Identity(degree + 1, degree + 1));
  return d;
}

DesignMatrix random_feature_design(const Vector& points, int width, BasisKind kind,
                                   std::uint64_t seed) {
  if (width < 1) throw DimensionError("random_feature_design: width must be >= 1");
  if (kind != BasisKind::random_relu && kind != BasisKind::random_fourier)
    throw DomainViolation("random_feature_design: kind must be random_relu or random_fourier");
  Rng rng(seed);
  Vector w(width), b(width);
  for (int j = 0; j < width; ++j) {
    w[j] = rng.normal();
    b[j] = (kind == BasisKind::random_relu) ? rng.normal() : kTwoPi * rng.uniform01();
  }
  DesignMatrix d;
  d.basis = {kind, width, -1.0, 1.0, seed};
  d.points = points;
  d.w = std::move(w);
  d.b_shift = std::move(b);
  d.matrix = (kind == BasisKind::random_relu) ? relu_features(points, d.w, d.b_shift)
                                              : fourier_features(points, d.w, d.b_shift);
  return d;
}

// Rows of the piecewise-linear hats at `nodes` (sorted, distinct), clamped
// to constant outside the hull. At the nodes themselves this is the identity.
static Matrix hat_rows(const Vector& x, const Vector& nodes) {
  const Eigen::Index n = nodes.size();
  Matrix M = Matrix::Zero(x.size(), n);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi <= nodes[0]) {
      M(i, 0) = 1.0;
    } else if (xi >= nodes[n - 1]) {
      M(i, n - 1) = 1.0;
    } else {
      const double* lo =
          std::upper_bound(nodes.data(), nodes.data() + n, xi) - 1;  // nodes[k] <= xi < nodes[k+1]
      const Eigen::Index k = lo - nodes.data();
      const double t = (xi - nodes[k]) / (nodes[k + 1] - nodes[k]);
      M(i, k) = 1.0 - t;
      M(i, k + 1) = t;
    }
  }
  return M;
}

DesignMatrix interpolating_feature_design(const Vector& points, int width, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (width <= n)
    throw DimensionError("interpolating_feature_design: width must exceed the point count (" +
                         std::to_string(n) + "); use data_orthonormal_design at or below it");
  if (count_distinct(points) != n)
    throw RankError("interpolating_feature_design: points must be distinct");
  Vector nodes = points;
  std::sort(nodes.data(), nodes.data() + nodes.size());
  const int extra = width - n;
  Rng rng(seed);
  Vector w(extra), b(extra);
  for (int j = 0; j < extra; ++j) {
    w[j] = rng.normal();
    b[j] = kTwoPi * rng.uniform01();
  }
  DesignMatrix d;
  d.basis = {BasisKind::hat_fourier, width, nodes[0], nodes[nodes.size() - 1], seed};
  d.points = points;
  d.hat_nodes = std::move(nodes);
  d.w = std::move(w);
  d.b_shift = std::move(b);
  Matrix M(points.size(), width);
  M.leftCols(n) = hat_rows(points, d.hat_nodes);
  M.rightCols(extra) = fourier_features(points, d.w, d.b_shift);
  d.matrix = std::move(M);
  return d;
}

Matrix relu_features(const Vector& x, const Vector& w, const Vector& b) {
  if (w.size() != b.size()) throw DimensionError("relu_features: weight/offset length mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.size()));
  Matrix M = x * w.transpose();
  M.rowwise() += b.transpose();
  return M.cwiseMax(0.0) * scale;
}

Matrix fourier_features(const Vector& x, const Vector& w, const Vector& b) {
  if (w.size() != b.size())
    throw DimensionError("fourier_features: weight/offset length mismatch");
  const double scale = std::sqrt(2.0 / static_cast<double>(w.size()));
  Matrix M = x * w.transpose();
  M.rowwise() += b.transpose();
  return scale * M.array().cos().matrix();
}

Matrix DesignMatrix::evaluate_at(const Vector& x) const {
  switch (basis.kind) {
    case BasisKind::legendre:
      check_in_domain(x, basis.a, basis.b, "DesignMatrix::evaluate_at");
      return legendre_rows(x, basis.degree_or_width, basis.a, basis.b);
    case BasisKind::data_orthonormal:
      return legendre_rows(x, basis.degree_or_width, map_a, map_b) * r_inv;
    case BasisKind::random_relu:
      return relu_features(x, w, b_shift);
    case BasisKind::random_fourier:
      return fourier_features(x, w, b_shift);
    case BasisKind::hat_fourier: {
      Matrix M(x.size(), hat_nodes.size() + w.size());
      M.leftCols(hat_nodes.size()) = hat_rows(x, hat_nodes);
      M.rightCols(w.size()) = fourier_features(x, w, b_shift);
      return M;
    }
  }
  throw Error("DesignMatrix::evaluate_at: unknown basis kind");
}

}  // namespace ddlab
