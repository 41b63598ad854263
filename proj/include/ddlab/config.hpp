#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddlab/ebayes.hpp"
#include "ddlab/risklab.hpp"

// JSON run configuration (schema version 1, documented field-by-field in
// docs/config.md). Flags only choose the command and paths; everything that
// affects numbers lives in the config file, so runs are archivable and
// reproducible from one document. Unknown keys are rejected.

namespace ddlab {

struct SweepSection {
  std::vector<int> complexities;
  int replicates = 100;
  int test_points = 512;
  double min_norm_tol = 1e-10;
  PriorSchedule prior{PriorSchedule::Kind::young_decay, 1.0};
};

struct EvidenceSection {
  std::vector<int> degrees;
  PriorSchedule prior{PriorSchedule::Kind::constant, 1.0};
  std::vector<std::uint64_t> seeds;    // empty => the top-level seed
  std::optional<std::string> dataset;  // CSV with x,y columns instead of generating
};

struct DeatonSection {
  int degree = 0;
  std::optional<GammaPriorSchedule> gamma;  // default: default_schedule(degree)
  PavaWeights weights = PavaWeights::unit;
  std::optional<std::string> dataset;
};

struct OccamHypothesis {
  enum class Kind { arithmetic, cubic } kind = Kind::arithmetic;
  long long lo = -50, hi = 50;                        // arithmetic grid
  long long max_numerator = 50, max_denominator = 4;  // cubic grid
};

struct OccamSection {
  std::vector<long long> data;
  std::vector<OccamHypothesis> hypotheses;  // default: arithmetic + cubic
};

struct RunConfig {
  int version = 1;
  std::optional<std::uint64_t> seed;
  std::optional<GeneratorSpec> generator;
  std::optional<SweepSection> sweep;
  std::optional<EvidenceSection> evidence;
  std::optional<DeatonSection> deaton;
  std::optional<OccamSection> occam;
};

// Throws ConfigError with line/field diagnostics.
RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization (sorted keys, all fields of present sections
// materialized); parse_config_text inverts it losslessly.
std::string config_to_json_text(const RunConfig& cfg);

// Sidecar document for generated datasets: seed + fully resolved spec.
std::string dataset_sidecar_json(const GeneratorSpec& resolved_spec, std::uint64_t seed);

}  // namespace ddlab
