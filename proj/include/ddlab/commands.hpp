#pragma once

#include <string>

#include "ddlab/config.hpp"

// One function per CLI subcommand. Each reads only its config sections,
// writes fixed-name CSV (and optional SVG) artifacts into out_dir, and
// throws: ConfigError for bad input (exit 2), other errors for numerical
// failures (exit 3). All output is byte-deterministic for a given config.

namespace ddlab {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool svg = false;
  bool verify = false;
};

void run_gen(const RunConfig& cfg, const CliOptions& opt);      // dataset.csv, dataset.json
void run_sweep(const RunConfig& cfg, const CliOptions& opt);    // risk_curve.csv [.svg]
void run_evidence(const RunConfig& cfg, const CliOptions& opt); // evidence_curve.csv [.svg]
void run_deaton(const RunConfig& cfg, const CliOptions& opt);   // deaton_fit.csv
void run_occam(const RunConfig& cfg, const CliOptions& opt);    // occam.csv

}  // namespace ddlab
