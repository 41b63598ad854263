#include "ddlab/risklab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddlab/rng.hpp"
#include "ddlab/selection.hpp"

namespace ddlab {

namespace {

void check_spec(const GeneratorSpec& spec) {
  if (spec.N < 2) throw DomainViolation("GeneratorSpec: N must be >= 2");
  if (!(spec.noise_sd > 0.0)) throw DomainViolation("GeneratorSpec: noise_sd must be > 0");
  if (!(spec.a < spec.b)) throw DomainViolation("GeneratorSpec: need a < b");
  if (spec.true_degree < 0) throw DomainViolation("GeneratorSpec: true_degree must be >= 0");
  if (spec.true_coefficients.size() != 0 &&
      spec.true_coefficients.size() != spec.true_degree + 1)
    throw DimensionError("GeneratorSpec: expected " + std::to_string(spec.true_degree + 1) +
                         " true coefficients, got " +
                         std::to_string(spec.true_coefficients.size()));
}

Vector equispaced(int n, double a, double b) {
  Vector x(n);
  for (int i = 0; i < n; ++i)
    x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

GeneratorSpec resolve_coefficients(GeneratorSpec spec, std::uint64_t seed) {
  check_spec(spec);
  if (spec.true_coefficients.size() == 0) {
    Rng rng(derive_seed(seed, stream::kCoef));
    spec.true_coefficients.resize(spec.true_degree + 1);
    for (Eigen::Index j = 0; j < spec.true_coefficients.size(); ++j)
      spec.true_coefficients[j] = rng.normal();
  }
  return spec;
}

Dataset generate(const GeneratorSpec& spec0, std::uint64_t seed) {
  GeneratorSpec spec = resolve_coefficients(spec0, seed);
  Dataset ds;
  ds.spec = spec;
  ds.seed = seed;

  if (spec.x_design == XDesign::equispaced) {
    ds.x = equispaced(spec.N, spec.a, spec.b);
  } else {
    Rng rx(derive_seed(seed, stream::kX));
    ds.x.resize(spec.N);
    for (int i = 0; i < spec.N; ++i) ds.x[i] = spec.a + (spec.b - spec.a) * rx.uniform01();
    std::sort(ds.x.data(), ds.x.data() + ds.x.size());
  }

  ds.f_true_at_x =
      legendre_rows(ds.x, spec.true_degree, spec.a, spec.b) * spec.true_coefficients;
  Rng rn(derive_seed(seed, stream::kNoise));
  ds.y.resize(spec.N);
  for (int i = 0; i < spec.N; ++i) ds.y[i] = ds.f_true_at_x[i] + spec.noise_sd * rn.normal();
  return ds;
}

double train_error(const Vector& y, const Vector& predictions) {
  if (y.size() != predictions.size())
    throw DimensionError("train_error: " + std::to_string(y.size()) + " targets vs " +
                         std::to_string(predictions.size()) + " predictions");
  return (y - predictions).squaredNorm() / static_cast<double>(y.size());
}

Vector prior_variances(const PriorSchedule& prior, int n_cols) {
  if (n_cols < 1) throw DimensionError("prior_variances: need n_cols >= 1");
  if (!(prior.tau2 > 0.0)) throw DomainViolation("prior_variances: tau2 must be > 0");
  Vector c(n_cols);
  for (int j = 0; j < n_cols; ++j) {
    c[j] = (prior.kind == PriorSchedule::Kind::constant)
               ? prior.tau2
               : prior.tau2 / ((1.0 + j) * (1.0 + j));
  }
  return c;
}

DesignMatrix complexity_design(const Vector& x, int complexity, std::uint64_t feature_seed) {
  if (complexity < 1) throw DomainViolation("complexity_design: complexity must be >= 1");
  if (complexity <= x.size()) return data_orthonormal_design(x, complexity - 1);
  return interpolating_feature_design(x, complexity, feature_seed);
}

namespace {

Vector fit_coefficients(const DesignMatrix& dm, const Vector& y, const Estimator& est,
                        double noise_variance) {
  switch (est.kind) {
    case Estimator::Kind::min_norm:
      return min_norm_least_squares(dm.matrix, y, est.min_norm_tol);
    case Estimator::Kind::ridge:
      return ridge(dm, y, est.ridge_lambda);
    case Estimator::Kind::bayes: {
      // lean posterior-mean path: solve (A^T A / s2 + C^-1) theta = A^T y / s2
      Matrix M = dm.matrix.transpose() * dm.matrix / noise_variance;
      M.diagonal() +=
          prior_variances(est.prior, static_cast<int>(dm.matrix.cols())).cwiseInverse();
      return solve_spd(cholesky(M), dm.matrix.transpose() * y / noise_variance);
    }
  }
  throw Error("fit_coefficients: unknown estimator kind");
}

}  // namespace

RiskResult frequentist_risk_custom(const GeneratorSpec& spec0, const Predictor& predictor,
                                   int replicates, int test_points, std::uint64_t master_seed,
                                   std::uint64_t stream_id) {
  if (replicates < 2) throw DomainViolation("frequentist_risk: replicates must be >= 2");
  if (test_points < 2) throw DomainViolation("frequentist_risk: test_points must be >= 2");
  GeneratorSpec spec = resolve_coefficients(spec0, master_seed);
  const Vector grid = equispaced(test_points, spec.a, spec.b);
  const Vector f_grid =
      legendre_rows(grid, spec.true_degree, spec.a, spec.b) * spec.true_coefficients;

  RiskResult out;
  out.samples.resize(replicates);
  for (int r = 0; r < replicates; ++r) {
    const Dataset ds = generate(spec, derive_seed(master_seed, stream_id, r));
    const Vector pred = predictor(ds, grid);
    if (pred.size() != grid.size())
      throw DimensionError("frequentist_risk: predictor returned wrong length");
    out.samples[r] = (pred - f_grid).squaredNorm() / static_cast<double>(test_points);
  }
  out.mean = out.samples.mean();
  const double var =
      (out.samples.array() - out.mean).square().sum() / static_cast<double>(replicates - 1);
  out.std_error = std::sqrt(var / static_cast<double>(replicates));
  return out;
}

RiskResult frequentist_risk(const GeneratorSpec& spec, int complexity, const Estimator& est,
                            int replicates, int test_points, std::uint64_t master_seed) {
  const double noise_variance = spec.noise_sd * spec.noise_sd;
  const std::uint64_t feature_seed = derive_seed(master_seed, stream::kFeatures);
  Predictor predictor = [complexity, est, noise_variance, feature_seed](const Dataset& ds,
                                                                        const Vector& tx) {
    const DesignMatrix dm = complexity_design(ds.x, complexity, feature_seed);
    const Vector theta = fit_coefficients(dm, ds.y, est, noise_variance);
    return Vector(dm.evaluate_at(tx) * theta);
  };
  return frequentist_risk_custom(spec, predictor, replicates, test_points, master_seed,
                                 static_cast<std::uint64_t>(complexity));
}

std::vector<RiskCurvePoint> double_descent_sweep(const GeneratorSpec& spec0,
                                                 const std::vector<int>& complexities,
                                                 const Estimator& mle_estimator,
                                                 const Estimator& bayes_estimator,
                                                 int replicates, int test_points,
                                                 std::uint64_t master_seed) {
  if (complexities.empty()) throw DomainViolation("double_descent_sweep: empty complexity list");
  if (!std::is_sorted(complexities.begin(), complexities.end()))
    throw DomainViolation("double_descent_sweep: complexities must be sorted");

  const GeneratorSpec spec = resolve_coefficients(spec0, master_seed);
  const Dataset canon = generate(spec, derive_seed(master_seed, stream::kCanonical));
  const std::uint64_t feature_seed = derive_seed(master_seed, stream::kFeatures);
  const double noise_variance = spec.noise_sd * spec.noise_sd;

  std::vector<RiskCurvePoint> curve;
  curve.reserve(complexities.size());
  for (int c : complexities) {
    RiskCurvePoint pt;
    pt.complexity = c;
    pt.replicates = replicates;

    const DesignMatrix dm = complexity_design(canon.x, c, feature_seed);
    const Vector theta_mn =
        min_norm_least_squares(dm.matrix, canon.y, mle_estimator.min_norm_tol);
    pt.train_mse = train_error(canon.y, dm.matrix * theta_mn);

    const GaussianLinearModel bayes_model{dm, prior_variances(bayes_estimator.prior, c),
                                          noise_variance};
    pt.log_evidence = log_evidence(bayes_model, canon.y);
    pt.bic_value = bic(mle_loglik(bayes_model, canon.y), c, static_cast<double>(spec.N));

    RiskResult rm = frequentist_risk(spec, c, mle_estimator, replicates, test_points, master_seed);
    RiskResult rb =
        frequentist_risk(spec, c, bayes_estimator, replicates, test_points, master_seed);
    pt.test_risk_mle = rm.mean;
    pt.test_risk_mle_se = rm.std_error;
    pt.test_risk_bayes = rb.mean;
    pt.test_risk_bayes_se = rb.std_error;
    pt.mle_samples = std::move(rm.samples);
    pt.bayes_samples = std::move(rb.samples);
    curve.push_back(std::move(pt));
  }
  return curve;
}

std::vector<std::pair<int, double>> evidence_sweep(const Dataset& data,
                                                   const std::vector<int>& degrees,
                                                   const PriorSchedule& prior,
                                                   double noise_variance) {
  if (degrees.empty()) throw DomainViolation("evidence_sweep: empty degree list");
  if (!(noise_variance > 0.0))
    throw DomainViolation("evidence_sweep: noise_variance must be > 0");
  std::vector<std::pair<int, double>> out;
  out.reserve(degrees.size());
  for (int deg : degrees) {
    if (deg < 0 || deg > data.x.size() - 1)
      throw DomainViolation("evidence_sweep: degree " + std::to_string(deg) +
                            " not in [0, N-1] for polynomial bases");
    const DesignMatrix q = data_orthonormal_design(data.x, deg);
    const GaussianLinearModel m{q, prior_variances(prior, deg + 1), noise_variance};
    out.emplace_back(deg, log_evidence(m, data.y));
  }
  return out;
}

}  // namespace ddlab
