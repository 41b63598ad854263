#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddlab/commands.hpp"
#include "ddlab/errors.hpp"

// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.

namespace {

void add_common(CLI::App* sub, ddlab::CliOptions& opt, bool with_svg) {
  sub->add_option("-c,--config", opt.config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out,--out-dir", opt.out_dir, "output directory (created if missing)");
  sub->add_flag("--verify", opt.verify, "run internal cross-checks and fail loudly");
  if (with_svg) sub->add_flag("--svg", opt.svg, "also write an SVG plot");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddlab: Bayesian model selection and double-descent experiments"};
  app.require_subcommand(1);

  ddlab::CliOptions opt;
  using Runner = std::function<void(const ddlab::RunConfig&, const ddlab::CliOptions&)>;
  Runner runner;

  struct SubSpec {
    const char* name;
    const char* help;
    bool svg;
    void (*fn)(const ddlab::RunConfig&, const ddlab::CliOptions&);
  };
  const SubSpec subs[] = {
      {"gen", "generate a synthetic dataset (dataset.csv + dataset.json)", false, ddlab::run_gen},
      {"sweep", "double-descent risk sweep over complexities (risk_curve.csv)", true,
       ddlab::run_sweep},
      {"evidence", "evidence/BIC/Laplace curve over degrees (evidence_curve.csv)", true,
       ddlab::run_evidence},
      {"deaton", "empirical-Bayes isotonic shrinkage fit (deaton_fit.csv)", false,
       ddlab::run_deaton},
      {"occam", "exact-counting evidence for discrete hypotheses (occam.csv)", false,
       ddlab::run_occam},
  };
  for (const SubSpec& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, opt, s.svg);
    sub->callback([&runner, fn = s.fn] { runner = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0 through CLI11; real parse errors map to 2.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const ddlab::RunConfig cfg = ddlab::parse_config_file(opt.config_path);
    runner(cfg, opt);
  } catch (const ddlab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}
