#pragma once

#include <cstdint>

#include "ddlab/numerics.hpp"

// Feature maps: normalized Legendre polynomials, data-orthonormal polynomial
// bases (thin QR over the design points), and seeded random features for the
// over-parameterized regime.

namespace ddlab {

enum class BasisKind { legendre, data_orthonormal, random_relu, random_fourier, hat_fourier };

struct BasisSpec {
  BasisKind kind = BasisKind::legendre;
  int degree_or_width = 0;     // polynomial degree, or feature count for random kinds
  double a = -1.0, b = 1.0;    // domain [a,b] (legendre only enforces it)
  std::uint64_t seed = 0;      // random kinds only
};

struct DesignMatrix {
  BasisSpec basis;
  Vector points;
  Matrix matrix;  // rows = points, cols = features

  // Evaluation state. legendre / data_orthonormal map [map_a, map_b]
  // affinely onto [-1,1]; data_orthonormal additionally multiplies by the
  // stored inverse R of its QR step. Random kinds keep their weights.
  double map_a = -1.0, map_b = 1.0;
  Matrix r_inv;
  Vector w, b_shift;
  Vector hat_nodes;  // hat_fourier only: sorted construction points

  Eigen::Index n_features() const { return matrix.cols(); }

  // Feature rows at new inputs. legendre enforces its domain; the other
  // kinds evaluate anywhere (a data-orthonormal basis has no a-priori
  // domain beyond the hull of its construction points, and risk evaluation
  // needs it on dense grids).
  Matrix evaluate_at(const Vector& x) const;
};

// Rows of normalized Legendre values phi_0..phi_degree at x, with [a,b]
// mapped affinely onto [-1,1]; phi_j = sqrt((2j+1)/2) * P_j. No domain check.
Matrix legendre_rows(const Vector& x, int degree, double a, double b);

DesignMatrix legendre_design(const Vector& points, int degree, double a, double b);

// Thin QR of the Legendre design over [min(points), max(points)]; columns
// span 1, x, ..., x^degree and satisfy Q^T Q = I over the points.
DesignMatrix data_orthonormal_design(const Vector& points, int degree);

DesignMatrix random_feature_design(const Vector& points, int width, BasisKind kind,
                                   std::uint64_t seed);

// Over-parameterized basis that still interpolates: the N piecewise-linear
// hat functions at the (distinct) construction points plus width - N seeded
// Fourier features. The hat block is the identity on the points, so the
// design keeps all N singular values >= 1 and the min-norm fit reaches
// machine-zero train error at every width > N. Raw iid random features
// alone cannot do that here: N(0,1) frequencies on a unit-scale domain give
// a smooth kernel whose trailing singular values underflow to exact zero,
// so a pure random design is numerically rank-deficient. In kernel terms
// this basis is "random-Fourier kernel + nugget"; the min-norm interpolant
// is a smooth kernel fit plus local hat bumps that absorb the residual
// without out-of-sample amplification. Requires width > #points; Fourier
// draws are prefix-nested across widths.
DesignMatrix interpolating_feature_design(const Vector& points, int width, std::uint64_t seed);

// Feature matrices from explicit parameters (shared implementation, and the
// hook unit tests use to pin down single columns).
Matrix relu_features(const Vector& x, const Vector& w, const Vector& b);     // max(0,wx+b)/sqrt(width)
Matrix fourier_features(const Vector& x, const Vector& w, const Vector& b);  // sqrt(2/width)cos(wx+b)

}  // namespace ddlab
