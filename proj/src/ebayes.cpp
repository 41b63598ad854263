#include "ddlab/ebayes.hpp"

#include <cmath>
#include <string>

namespace ddlab {

namespace {

void check_stats(const CoefficientStats& stats) {
  if (stats.theta_hat.size() < 1)
    throw DimensionError("CoefficientStats: empty coefficient vector");
  if (stats.s < 0.0) throw DomainViolation("CoefficientStats: s must be >= 0");
  if (stats.d < 1)
    throw DegreesOfFreedomError("CoefficientStats: d must be >= 1 (need N > p+1)");
}

void check_z_sigma(const Vector& z, double sigma2, Eigen::Index p1) {
  if (z.size() != p1)
    throw DimensionError("joint_hyper_loglik: z length " + std::to_string(z.size()) +
                         " does not match coefficient count " + std::to_string(p1));
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!(z[i] > 0.0) || !(z[i] <= 1.0))
      throw DomainViolation("joint_hyper_loglik: z[" + std::to_string(i) +
                            "] = " + std::to_string(z[i]) + " outside (0,1]");
  if (!(sigma2 > 0.0)) throw DomainViolation("joint_hyper_loglik: sigma2 must be > 0");
}

void check_schedule(const GammaPriorSchedule& sched, Eigen::Index p2) {
  if (sched.shapes.size() != p2 || sched.scales.size() != p2)
    throw DimensionError("GammaPriorSchedule: need " + std::to_string(p2) +
                         " shape/scale pairs (coordinates 0..p+1)");
  for (Eigen::Index i = 0; i < p2; ++i) {
    if (!(sched.shapes[i] > 0.5))
      throw DomainViolation("GammaPriorSchedule: shape " + std::to_string(i) + " = " +
                            std::to_string(sched.shapes[i]) +
                            " violates the positivity condition gamma > 1/2");
    if (!(sched.scales[i] > 0.0))
      throw DomainViolation("GammaPriorSchedule: scale " + std::to_string(i) + " must be > 0");
  }
}

}  // namespace

GammaPriorSchedule default_schedule(int p) {
  if (p < 0) throw DomainViolation("default_schedule: p must be >= 0");
  GammaPriorSchedule sched;
  sched.shapes.resize(p + 2);
  sched.scales.resize(p + 2);
  for (int i = 0; i < p + 2; ++i) {
    sched.shapes[i] = 1.0 + 0.1 * i;
    sched.scales[i] = 10.0;
  }
  return sched;
}

double joint_hyper_loglik(const CoefficientStats& stats, const Vector& z, double sigma2) {
  check_stats(stats);
  check_z_sigma(z, sigma2, stats.theta_hat.size());
  const double n = static_cast<double>(stats.N);
  // ((d-2)/2) log s, with the d == 2 case pinned to 0 so s = 0 cannot NaN
  const double s_term = (stats.d == 2) ? 0.0 : 0.5 * (stats.d - 2) * std::log(stats.s);
  double ll = -0.5 * n * std::log(sigma2) + s_term - 0.5 * stats.s / sigma2;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    ll += 0.5 * std::log(z[i]) - 0.5 * stats.theta_hat[i] * stats.theta_hat[i] * z[i] / sigma2;
  return ll;
}

Vector joint_hyper_grad(const CoefficientStats& stats, const Vector& z, double sigma2) {
  check_stats(stats);
  check_z_sigma(z, sigma2, stats.theta_hat.size());
  const Eigen::Index p1 = z.size();
  Vector g(p1 + 1);
  double sum_zt = 0.0;
  for (Eigen::Index i = 0; i < p1; ++i) {
    const double t2 = stats.theta_hat[i] * stats.theta_hat[i];
    g[i] = 0.5 / z[i] - 0.5 * t2 / sigma2;
    sum_zt += t2 * z[i];
  }
  const double n = static_cast<double>(stats.N);
  g[p1] = -0.5 * n / sigma2 + 0.5 * stats.s / (sigma2 * sigma2) +
          0.5 * sum_zt / (sigma2 * sigma2);
  return g;
}

Vector unconstrained_v_map(const CoefficientStats& stats, const GammaPriorSchedule& schedule) {
  check_stats(stats);
  const Eigen::Index p1 = stats.theta_hat.size();
  check_schedule(schedule, p1 + 1);
  Vector v(p1 + 1);
  for (Eigen::Index i = 0; i < p1; ++i) {
    v[i] = (schedule.shapes[i] - 0.5) /
           (1.0 / schedule.scales[i] + 0.5 * stats.theta_hat[i] * stats.theta_hat[i]);
  }
  v[p1] = (schedule.shapes[p1] + 0.5 * stats.d - 1.0) /
          (1.0 / schedule.scales[p1] + 0.5 * stats.s);
  for (Eigen::Index i = 0; i <= p1; ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw DomainViolation("unconstrained_v_map: nonpositive MAP at coordinate " +
                            std::to_string(i) + " (gamma <= 1/2 violation)");
  return v;
}

std::pair<Vector, std::vector<std::pair<int, int>>> pava(const Vector& values,
                                                         const Vector& weights) {
  if (values.size() != weights.size())
    throw DimensionError("pava: values length " + std::to_string(values.size()) +
                         " != weights length " + std::to_string(weights.size()));
  if (values.size() == 0) throw DimensionError("pava: empty input");
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (!(weights[i] > 0.0)) throw DomainViolation("pava: weights must be > 0");

  struct Block {
    double sum_w, sum_wv;
    int start, end;
    double mean() const { return sum_wv / sum_w; }
  };
  std::vector<Block> stack;
  stack.reserve(values.size());
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    stack.push_back({weights[i], weights[i] * values[i], i, i});
    while (stack.size() >= 2 && stack[stack.size() - 2].mean() > stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().sum_w += top.sum_w;
      stack.back().sum_wv += top.sum_wv;
      stack.back().end = top.end;
    }
  }

  Vector fitted(values.size());
  std::vector<std::pair<int, int>> blocks;
  blocks.reserve(stack.size());
  for (const Block& b : stack) {
    for (int i = b.start; i <= b.end; ++i) fitted[i] = b.mean();
    blocks.emplace_back(b.start, b.end);
  }
  return {std::move(fitted), std::move(blocks)};
}

PavaFit deaton_fit(const CoefficientStats& stats, const GammaPriorSchedule& schedule,
                   PavaWeights weights) {
  PavaFit fit;
  fit.v_unconstrained = unconstrained_v_map(stats, schedule);
  const Eigen::Index p2 = fit.v_unconstrained.size();

  Vector w = Vector::Ones(p2);
  if (weights == PavaWeights::curvature) {
    // -d^2/dV^2 of (a log V - b V) at the MAP V = a/b is a / V^2
    for (Eigen::Index i = 0; i + 1 < p2; ++i)
      w[i] = (schedule.shapes[i] - 0.5) / (fit.v_unconstrained[i] * fit.v_unconstrained[i]);
    w[p2 - 1] = (schedule.shapes[p2 - 1] + 0.5 * stats.d - 1.0) /
                (fit.v_unconstrained[p2 - 1] * fit.v_unconstrained[p2 - 1]);
  }

  auto [fitted, blocks] = pava(fit.v_unconstrained, w);
  fit.v_isotonic = std::move(fitted);
  fit.pool_blocks = std::move(blocks);
  fit.sigma2_hat = 1.0 / fit.v_isotonic[p2 - 1];
  fit.z = fit.v_isotonic.head(p2 - 1) / fit.v_isotonic[p2 - 1];
  return fit;
}

Vector shrinkage_posterior_means(const CoefficientStats& stats, const PavaFit& fit) {
  if (fit.z.size() != stats.theta_hat.size())
    throw DimensionError("shrinkage_posterior_means: fit does not match stats");
  return (1.0 - fit.z.array()) * stats.theta_hat.array();
}

GaussianMeansResult gaussian_means_bayes(const Vector& y, const Vector& tau2, double sigma2) {
  if (tau2.size() != y.size())
    throw DimensionError("gaussian_means_bayes: tau2 length does not match y");
  if (!(sigma2 > 0.0)) throw DomainViolation("gaussian_means_bayes: sigma2 must be > 0");
  GaussianMeansResult out;
  out.means.resize(y.size());
  out.per_coord_risk.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(tau2[i] > 0.0)) throw DomainViolation("gaussian_means_bayes: tau2 must be > 0");
    out.means[i] = tau2[i] / (tau2[i] + sigma2) * y[i];
    out.per_coord_risk[i] = sigma2 * tau2[i] / (sigma2 + tau2[i]);
  }
  return out;
}

GaussianMeansResult gaussian_means_bayes(const Vector& y, double tau2, double sigma2) {
  return gaussian_means_bayes(y, Vector::Constant(y.size(), tau2), sigma2);
}

double james_stein_style_mean(double ybar, int n, double mu0, double tau2, double sigma2) {
  if (n < 1) throw DomainViolation("james_stein_style_mean: n must be >= 1");
  if (!(tau2 > 0.0) || !(sigma2 > 0.0))
    throw DomainViolation("james_stein_style_mean: variances must be > 0");
  const double nt = static_cast<double>(n) * tau2;
  return nt / (sigma2 + nt) * ybar + sigma2 / (sigma2 + nt) * mu0;
}

}  // namespace ddlab
