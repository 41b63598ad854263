#pragma once

#include <utility>

#include "ddlab/basis.hpp"
#include "ddlab/numerics.hpp"

// Exact conjugate inference for y = A theta + eps, eps ~ N(0, sigma^2 I),
// theta ~ N(0, C) with diagonal C. Everything is closed-form:
//   Sigma_post = sigma^2 (A^T A / sigma^2 + C^-1)^-1
//   mean_post  = (A^T A / sigma^2 + C^-1)^-1 A^T y / sigma^2
//   log p(y)   = -N/2 log(2 pi) - 1/2 logdet(A C A^T + sigma^2 I)
//                - 1/2 y^T (A C A^T + sigma^2 I)^-1 y

namespace ddlab {

struct GaussianLinearModel {
  DesignMatrix design;
  Vector prior_variances;  // diagonal of C, one per design column, all > 0
  double noise_variance = 1.0;
};

struct PosteriorSummary {
  Vector mean;
  SpdFactor covariance_factor;  // of Sigma_post
  double log_evidence = 0.0;
  bool jitter_applied = false;  // near-singular system stabilized once (see docs)
};

struct PredictiveSummary {
  Vector mean;
  Vector variance;  // pointwise, includes noise_variance
};

PosteriorSummary posterior(const GaussianLinearModel& model, const Vector& y);

// Dispatches to the weight-space form (p x p system) when cols < rows and
// the function-space form (N x N system) otherwise.
double log_evidence(const GaussianLinearModel& model, const Vector& y);
double log_evidence_weight_space(const GaussianLinearModel& model, const Vector& y);
double log_evidence_function_space(const GaussianLinearModel& model, const Vector& y);

PredictiveSummary predictive(const GaussianLinearModel& model, const Vector& y,
                             const Vector& new_points);

Vector ols(const DesignMatrix& design, const Vector& y);
Vector ridge(const DesignMatrix& design, const Vector& y, double lambda);

// (s, d): residual sum of squares of the OLS fit and its degrees of freedom
// d = N - (p+1). Errors when d < 1 -- interpolating fits give s = 0.
std::pair<double, int> residual_stats(const DesignMatrix& design, const Vector& y);

// Gaussian log-likelihood at the OLS / min-norm fit with the model's known
// noise variance (the "mle_loglik" that feeds BIC).
double mle_loglik(const GaussianLinearModel& model, const Vector& y);

}  // namespace ddlab
