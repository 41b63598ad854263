#include "ddlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "ddlab/csv.hpp"
#include "ddlab/ebayes.hpp"
#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/selection.hpp"
#include "ddlab/svg.hpp"

namespace ddlab {

namespace {

std::string out_path(const CliOptions& opt, const char* name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

const GeneratorSpec& need_generator(const RunConfig& cfg, const char* cmd) {
  if (!cfg.generator)
    throw ConfigError(std::string(cmd) + " requires a 'generator' section in the config");
  return *cfg.generator;
}

std::uint64_t need_seed(const RunConfig& cfg, const char* cmd) {
  if (!cfg.seed) throw ConfigError(std::string(cmd) + " requires a top-level 'seed'");
  return *cfg.seed;
}

// Datasets written by `gen` (x,y,f_true) or any two-column x,y file.
std::pair<Vector, Vector> load_xy_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty dataset file");
  if (line != "x,y" && line != "x,y,f_true")
    throw ConfigError(path + ": expected header 'x,y' or 'x,y,f_true', got '" + line + "'");
  std::vector<double> xs, ys;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    if (parts.size() < 2)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected at least 2 columns");
    try {
      xs.push_back(parse_double(parts[0]));
      ys.push_back(parse_double(parts[1]));
    } catch (const Error& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (xs.size() < 2) throw ConfigError(path + ": needs at least 2 data rows");
  Vector x(static_cast<int>(xs.size())), y(static_cast<int>(ys.size()));
  for (int i = 0; i < x.size(); ++i) { x[i] = xs[static_cast<std::size_t>(i)]; y[i] = ys[static_cast<std::size_t>(i)]; }
  return {std::move(x), std::move(y)};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string dataset_csv_text(const Dataset& ds) {
  CsvTable t;
  t.header = {"x", "y", "f_true"};
  for (int i = 0; i < ds.x.size(); ++i)
    t.add_row({fmt_double(ds.x[i]), fmt_double(ds.y[i]), fmt_double(ds.f_true_at_x[i])});
  return t.serialize();
}

}  // namespace

void run_gen(const RunConfig& cfg, const CliOptions& opt) {
  const GeneratorSpec& gen = need_generator(cfg, "gen");
  const std::uint64_t seed = need_seed(cfg, "gen");
  const Dataset ds = generate(gen, seed);
  const std::string csv = dataset_csv_text(ds);
  if (opt.verify) {
    // Determinism self-check: an independent regeneration must be byte-identical.
    const Dataset again = generate(gen, seed);
    if (dataset_csv_text(again) != csv)
      throw Error("gen --verify: regeneration produced different bytes");
  }
  write_file(out_path(opt, "dataset.csv"), csv);
  write_file(out_path(opt, "dataset.json"), dataset_sidecar_json(ds.spec, seed));
}

void run_sweep(const RunConfig& cfg, const CliOptions& opt) {
  const GeneratorSpec& gen = need_generator(cfg, "sweep");
  const std::uint64_t seed = need_seed(cfg, "sweep");
  if (!cfg.sweep) throw ConfigError("sweep requires a 'sweep' section in the config");
  const SweepSection& s = *cfg.sweep;

  Estimator mle;
  mle.kind = Estimator::Kind::min_norm;
  mle.min_norm_tol = s.min_norm_tol;
  Estimator bayes;
  bayes.kind = Estimator::Kind::bayes;
  bayes.prior = s.prior;

  const std::vector<RiskCurvePoint> points = double_descent_sweep(
      gen, s.complexities, mle, bayes, s.replicates, s.test_points, seed);

  CsvTable t;
  t.header = {"complexity", "train_mse", "test_risk_mle", "test_risk_mle_se",
              "test_risk_bayes", "test_risk_bayes_se", "log_evidence", "bic", "replicates"};
  for (const RiskCurvePoint& p : points)
    t.add_row({fmt_int(p.complexity), fmt_double(p.train_mse), fmt_double(p.test_risk_mle),
               fmt_double(p.test_risk_mle_se), fmt_double(p.test_risk_bayes),
               fmt_double(p.test_risk_bayes_se), fmt_double(p.log_evidence),
               fmt_double(p.bic_value), fmt_int(p.replicates)});
  write_file(out_path(opt, "risk_curve.csv"), t.serialize());

  if (opt.svg) {
    Series mle_s{"min-norm risk", Vector(points.size()), Vector(points.size())};
    Series bay_s{"bayes risk", Vector(points.size()), Vector(points.size())};
    for (std::size_t i = 0; i < points.size(); ++i) {
      mle_s.x[static_cast<int>(i)] = points[i].complexity;
      mle_s.y[static_cast<int>(i)] = points[i].test_risk_mle;
      bay_s.x[static_cast<int>(i)] = points[i].complexity;
      bay_s.y[static_cast<int>(i)] = points[i].test_risk_bayes;
    }
    PlotSpec ps;
    ps.title = "Test risk vs model complexity";
    ps.xlabel = "complexity (design columns)";
    ps.ylabel = "mean squared test risk";
    ps.log_y = true;
    write_file(out_path(opt, "risk_curve.svg"), render_line_plot({mle_s, bay_s}, ps));
  }

  if (opt.verify) {
    // The two evidence forms are algebraically equal; require them to agree
    // on the canonical dataset at every complexity.
    const Dataset canon = generate(gen, derive_seed(seed, stream::kCanonical));
    const std::uint64_t feature_seed = derive_seed(seed, stream::kFeatures);
    const double noise_variance = gen.noise_sd * gen.noise_sd;
    for (int c : s.complexities) {
      const DesignMatrix dm = complexity_design(canon.x, c, feature_seed);
      const GaussianLinearModel m{dm, prior_variances(s.prior, c), noise_variance};
      const double ws = log_evidence_weight_space(m, canon.y);
      const double fs = log_evidence_function_space(m, canon.y);
      if (!(std::abs(ws - fs) <= 1e-8 * std::max(1.0, std::abs(ws))))
        throw Error("sweep --verify: evidence forms disagree at complexity " +
                    std::to_string(c) + " (" + fmt_double(ws) + " vs " + fmt_double(fs) + ")");
    }
  }
}

void run_evidence(const RunConfig& cfg, const CliOptions& opt) {
  const GeneratorSpec& gen = need_generator(cfg, "evidence");
  if (!cfg.evidence) throw ConfigError("evidence requires an 'evidence' section in the config");
  const EvidenceSection& e = *cfg.evidence;
  const double noise_variance = gen.noise_sd * gen.noise_sd;

  // One dataset per seed (or a single external dataset). Columns reported
  // are per-degree medians across datasets.
  std::vector<Dataset> datasets;
  if (e.dataset) {
    auto [x, y] = load_xy_csv(*e.dataset);
    Dataset ds;
    ds.x = std::move(x);
    ds.y = std::move(y);
    datasets.push_back(std::move(ds));
  } else {
    std::vector<std::uint64_t> seeds = e.seeds;
    if (seeds.empty()) seeds.push_back(need_seed(cfg, "evidence"));
    for (std::uint64_t s : seeds) datasets.push_back(generate(gen, s));
  }

  const int n_deg = static_cast<int>(e.degrees.size());
  std::vector<std::vector<double>> exact(e.degrees.size()), bics(e.degrees.size()),
      laplaces(e.degrees.size());
  for (const Dataset& ds : datasets) {
    ModelList list;
    for (int deg : e.degrees) {
      if (deg > ds.x.size() - 1)
        throw ConfigError("evidence: degree " + std::to_string(deg) +
                          " needs more than " + std::to_string(ds.x.size()) + " data points");
      list.models.push_back(GaussianLinearModel{data_orthonormal_design(ds.x, deg),
                                                prior_variances(e.prior, deg + 1),
                                                noise_variance});
    }
    list.prior_probs = Vector::Constant(n_deg, 1.0 / n_deg);
    const EvidenceReport report = model_posterior(list, ds.y);
    for (int i = 0; i < n_deg; ++i) {
      const ModelEvidence& me = report.per_model[static_cast<std::size_t>(i)];
      exact[static_cast<std::size_t>(i)].push_back(me.log_evidence);
      bics[static_cast<std::size_t>(i)].push_back(me.bic_value);
      laplaces[static_cast<std::size_t>(i)].push_back(me.laplace_log_evidence);
      if (opt.verify && !(std::abs(me.laplace_log_evidence - me.log_evidence) <= 1e-6))
        throw Error("evidence --verify: Laplace approximation off by " +
                    fmt_double(std::abs(me.laplace_log_evidence - me.log_evidence)) +
                    " at degree " + std::to_string(e.degrees[static_cast<std::size_t>(i)]) +
                    " (exact for a Gaussian posterior; tolerance 1e-6)");
    }
  }

  std::vector<double> med_exact(e.degrees.size()), med_bic(e.degrees.size()),
      med_lap(e.degrees.size());
  for (std::size_t i = 0; i < e.degrees.size(); ++i) {
    med_exact[i] = median_of(exact[i]);
    med_bic[i] = median_of(bics[i]);
    med_lap[i] = median_of(laplaces[i]);
  }
  const std::size_t argmax = static_cast<std::size_t>(
      std::max_element(med_exact.begin(), med_exact.end()) - med_exact.begin());

  CsvTable t;
  t.header = {"degree", "log_evidence", "bic", "laplace_log_evidence", "argmax"};
  for (std::size_t i = 0; i < e.degrees.size(); ++i)
    t.add_row({fmt_int(e.degrees[i]), fmt_double(med_exact[i]), fmt_double(med_bic[i]),
               fmt_double(med_lap[i]), fmt_int(i == argmax ? 1 : 0)});
  write_file(out_path(opt, "evidence_curve.csv"), t.serialize());

  if (opt.svg) {
    Series ev{"log evidence", Vector(n_deg), Vector(n_deg)};
    Series bi{"bic", Vector(n_deg), Vector(n_deg)};
    for (int i = 0; i < n_deg; ++i) {
      ev.x[i] = e.degrees[static_cast<std::size_t>(i)];
      ev.y[i] = med_exact[static_cast<std::size_t>(i)];
      bi.x[i] = e.degrees[static_cast<std::size_t>(i)];
      bi.y[i] = med_bic[static_cast<std::size_t>(i)];
    }
    PlotSpec ps;
    ps.title = "Log evidence vs polynomial degree";
    ps.xlabel = "degree";
    ps.ylabel = "median log score";
    write_file(out_path(opt, "evidence_curve.svg"), render_line_plot({ev, bi}, ps));
  }
}

void run_deaton(const RunConfig& cfg, const CliOptions& opt) {
  if (!cfg.deaton) throw ConfigError("deaton requires a 'deaton' section in the config");
  const DeatonSection& d = *cfg.deaton;

  Vector x, y;
  if (d.dataset) {
    std::tie(x, y) = load_xy_csv(*d.dataset);
  } else {
    const Dataset ds = generate(need_generator(cfg, "deaton"), need_seed(cfg, "deaton"));
    x = ds.x;
    y = ds.y;
  }

  const DesignMatrix dm = data_orthonormal_design(x, d.degree);
  const Vector theta_hat = ols(dm, y);
  const auto [s, dof] = residual_stats(dm, y);
  CoefficientStats stats;
  stats.theta_hat = theta_hat;
  stats.s = s;
  stats.d = dof;
  stats.N = static_cast<int>(x.size());

  const GammaPriorSchedule schedule = d.gamma ? *d.gamma : default_schedule(d.degree);
  const PavaFit fit = deaton_fit(stats, schedule, d.weights);
  const Vector shrunk = shrinkage_posterior_means(stats, fit);

  CsvTable t;
  t.header = {"index", "theta_hat", "v_unconstrained", "v_isotonic", "z", "shrunk_coefficient"};
  for (int i = 0; i <= d.degree; ++i)
    t.add_row({fmt_int(i), fmt_double(theta_hat[i]), fmt_double(fit.v_unconstrained[i]),
               fmt_double(fit.v_isotonic[i]), fmt_double(fit.z[i]), fmt_double(shrunk[i])});
  std::string blocks;
  for (const auto& [lo, hi] : fit.pool_blocks) {
    if (!blocks.empty()) blocks += ';';
    blocks += (lo == hi) ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
  }
  t.footer = {"# sigma2_hat," + fmt_double(fit.sigma2_hat), "# s," + fmt_double(stats.s),
              "# d," + fmt_int(stats.d), "# pool_blocks," + blocks};
  write_file(out_path(opt, "deaton_fit.csv"), t.serialize());

  if (opt.verify) {
    // The shrinkage means must coincide with the exact conjugate posterior
    // mean under the induced prior c_i = sigma2 (1 - z_i)/z_i. z_i = 1 maps
    // to c_i = 0; clamp to a tiny positive variance for the cross-check.
    Vector c(d.degree + 1);
    for (int i = 0; i <= d.degree; ++i)
      c[i] = std::max(fit.sigma2_hat * (1.0 - fit.z[i]) / fit.z[i], 1e-14);
    const GaussianLinearModel m{dm, c, fit.sigma2_hat};
    const Vector post = posterior(m, y).mean;
    for (int i = 0; i <= d.degree; ++i)
      if (!(std::abs(post[i] - shrunk[i]) <= 1e-10))
        throw Error("deaton --verify: shrinkage and conjugate posterior means disagree at index " +
                    std::to_string(i) + " (" + fmt_double(shrunk[i]) + " vs " +
                    fmt_double(post[i]) + ")");
  }
}

void run_occam(const RunConfig& cfg, const CliOptions& opt) {
  if (!cfg.occam) throw ConfigError("occam requires an 'occam' section in the config");
  const OccamSection& o = *cfg.occam;

  struct Row {
    std::string name;
    DiscreteEvidence ev;
  };
  std::vector<Row> rows;
  for (const OccamHypothesis& h : o.hypotheses) {
    if (h.kind == OccamHypothesis::Kind::arithmetic) {
      const DiscreteHypothesis hyp = arithmetic_hypothesis(h.lo, h.hi);
      rows.push_back({hyp.name, discrete_evidence(hyp, o.data)});
    } else {
      rows.push_back({"cubic[num<=" + std::to_string(h.max_numerator) +
                          ";den<=" + std::to_string(h.max_denominator) + "]",
                      cubic_evidence(o.data, h.max_numerator, h.max_denominator)});
    }
  }

  double total = 0.0;
  for (const Row& r : rows) total += r.ev.evidence;

  CsvTable t;
  t.header = {"name", "count", "grid_size", "evidence", "posterior", "bayes_factor_vs_first"};
  for (const Row& r : rows) {
    const double post = total > 0.0 ? r.ev.evidence / total : 0.0;
    const double bf = r.ev.evidence / rows.front().ev.evidence;  // IEEE inf/nan when ev0 = 0
    t.add_row({r.name, fmt_int(r.ev.count), fmt_int(r.ev.grid_size), fmt_double(r.ev.evidence),
               fmt_double(post), fmt_double(bf)});
  }
  write_file(out_path(opt, "occam.csv"), t.serialize());

  if (opt.verify) {
    for (std::size_t i = 0; i < o.hypotheses.size(); ++i) {
      const OccamHypothesis& h = o.hypotheses[i];
      if (h.kind == OccamHypothesis::Kind::arithmetic) {
        // Closed-form recount: the first two terms pin (n0, n) uniquely.
        const long long n0 = o.data[0], n = o.data[1] - o.data[0];
        bool match = n0 >= h.lo && n0 <= h.hi && n >= h.lo && n <= h.hi;
        for (std::size_t k = 0; match && k < o.data.size(); ++k)
          match = o.data[k] == n0 + static_cast<long long>(k) * n;
        if ((match ? 1 : 0) != rows[i].ev.count)
          throw Error("occam --verify: arithmetic recount disagrees with enumeration");
      } else if (cubic_grid_size(h.max_numerator, h.max_denominator) <= 5000000) {
        const DiscreteEvidence enumerated =
            discrete_evidence(cubic_hypothesis_enumerated(h.max_numerator, h.max_denominator),
                              o.data);
        if (enumerated.count != rows[i].ev.count)
          throw Error("occam --verify: cubic closed count disagrees with enumeration");
      }
    }
  }
}

}  // namespace ddlab
