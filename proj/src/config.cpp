#include "ddlab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ddlab/errors.hpp"

namespace ddlab {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError("config error at " + where + ": " + msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) fail(where, "unknown key '" + it.key() + "'");
  }
}

const json& require_object(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  return v;
}

double get_double(const json& obj, const std::string& where, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

long long get_int(const json& obj, const std::string& where, const char* key, long long dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<long long>();
}

std::uint64_t as_uint64(const json& v, const std::string& where) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    fail(where, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Vector as_number_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  Vector out(static_cast<int>(v.size()));
  for (int i = 0; i < out.size(); ++i) {
    const json& e = v[static_cast<std::size_t>(i)];
    if (!e.is_number()) fail(where + "[" + std::to_string(i) + "]", "expected a number");
    out[i] = e.get<double>();
  }
  return out;
}

PriorSchedule parse_prior(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"kind", "tau2"});
  PriorSchedule p;
  std::string kind = get_string(v, where, "kind", "constant");
  if (kind == "constant") p.kind = PriorSchedule::Kind::constant;
  else if (kind == "young_decay") p.kind = PriorSchedule::Kind::young_decay;
  else fail(where + ".kind", "expected \"constant\" or \"young_decay\", got \"" + kind + "\"");
  p.tau2 = get_double(v, where, "tau2", 1.0);
  if (!(p.tau2 > 0.0)) fail(where + ".tau2", "must be positive");
  return p;
}

GeneratorSpec parse_generator(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"true_degree", "coefficients", "noise_sd", "n", "x_design", "domain"});
  GeneratorSpec g;
  g.true_degree = static_cast<int>(get_int(v, where, "true_degree", 10));
  if (g.true_degree < 0) fail(where + ".true_degree", "must be >= 0");
  if (v.contains("coefficients"))
    g.true_coefficients = as_number_array(v.at("coefficients"), where + ".coefficients");
  if (g.true_coefficients.size() != 0 && g.true_coefficients.size() != g.true_degree + 1)
    fail(where + ".coefficients", "expected true_degree + 1 = " +
                                      std::to_string(g.true_degree + 1) + " entries, got " +
                                      std::to_string(g.true_coefficients.size()));
  g.noise_sd = get_double(v, where, "noise_sd", 0.3);
  if (!(g.noise_sd > 0.0)) fail(where + ".noise_sd", "must be positive");
  g.N = static_cast<int>(get_int(v, where, "n", 20));
  if (g.N < 2) fail(where + ".n", "must be >= 2");
  std::string xd = get_string(v, where, "x_design", "equispaced");
  if (xd == "equispaced") g.x_design = XDesign::equispaced;
  else if (xd == "uniform_random") g.x_design = XDesign::uniform_random;
  else fail(where + ".x_design", "expected \"equispaced\" or \"uniform_random\", got \"" + xd + "\"");
  if (v.contains("domain")) {
    Vector d = as_number_array(v.at("domain"), where + ".domain");
    if (d.size() != 2) fail(where + ".domain", "expected [a, b]");
    g.a = d[0];
    g.b = d[1];
  }
  if (!(g.a < g.b)) fail(where + ".domain", "requires a < b");
  return g;
}

SweepSection parse_sweep(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"complexities", "replicates", "test_points", "min_norm_tol", "prior"});
  SweepSection s;
  if (!v.contains("complexities")) fail(where, "missing required key 'complexities'");
  {
    const json& c = v.at("complexities");
    if (!c.is_array() || c.empty()) fail(where + ".complexities", "expected a non-empty array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string at = where + ".complexities[" + std::to_string(i) + "]";
      if (!c[i].is_number_integer()) fail(at, "expected an integer");
      long long ci = c[i].get<long long>();
      if (ci < 1 || ci > 100000) fail(at, "must be in [1, 100000]");
      if (!s.complexities.empty() && ci <= s.complexities.back())
        fail(at, "complexities must be strictly increasing");
      s.complexities.push_back(static_cast<int>(ci));
    }
  }
  s.replicates = static_cast<int>(get_int(v, where, "replicates", 100));
  if (s.replicates < 2) fail(where + ".replicates", "must be >= 2");
  s.test_points = static_cast<int>(get_int(v, where, "test_points", 512));
  if (s.test_points < 2) fail(where + ".test_points", "must be >= 2");
  s.min_norm_tol = get_double(v, where, "min_norm_tol", 1e-10);
  if (!(s.min_norm_tol > 0.0)) fail(where + ".min_norm_tol", "must be positive");
  if (v.contains("prior")) s.prior = parse_prior(v.at("prior"), where + ".prior");
  return s;
}

EvidenceSection parse_evidence(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"degrees", "prior", "seeds", "dataset"});
  EvidenceSection e;
  if (!v.contains("degrees")) fail(where, "missing required key 'degrees'");
  {
    const json& d = v.at("degrees");
    if (!d.is_array() || d.empty()) fail(where + ".degrees", "expected a non-empty array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string at = where + ".degrees[" + std::to_string(i) + "]";
      if (!d[i].is_number_integer()) fail(at, "expected an integer");
      long long di = d[i].get<long long>();
      if (di < 0 || di > 100000) fail(at, "must be in [0, 100000]");
      if (!e.degrees.empty() && di <= e.degrees.back())
        fail(at, "degrees must be strictly increasing");
      e.degrees.push_back(static_cast<int>(di));
    }
  }
  if (v.contains("prior")) e.prior = parse_prior(v.at("prior"), where + ".prior");
  if (v.contains("seeds")) {
    const json& s = v.at("seeds");
    if (!s.is_array() || s.empty()) fail(where + ".seeds", "expected a non-empty array");
    for (std::size_t i = 0; i < s.size(); ++i)
      e.seeds.push_back(as_uint64(s[i], where + ".seeds[" + std::to_string(i) + "]"));
  }
  if (v.contains("dataset")) e.dataset = get_string(v, where, "dataset", "");
  return e;
}

DeatonSection parse_deaton(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"degree", "gamma", "weights", "dataset"});
  DeatonSection d;
  d.degree = static_cast<int>(get_int(v, where, "degree", 0));
  if (d.degree < 0) fail(where + ".degree", "must be >= 0");
  if (v.contains("gamma")) {
    const json& g = require_object(v.at("gamma"), where + ".gamma");
    check_keys(g, where + ".gamma", {"shapes", "scales"});
    if (!g.contains("shapes") || !g.contains("scales"))
      fail(where + ".gamma", "requires both 'shapes' and 'scales'");
    GammaPriorSchedule sched;
    sched.shapes = as_number_array(g.at("shapes"), where + ".gamma.shapes");
    sched.scales = as_number_array(g.at("scales"), where + ".gamma.scales");
    const int want = d.degree + 2;
    if (sched.shapes.size() != want || sched.scales.size() != want)
      fail(where + ".gamma", "shapes and scales must each have degree + 2 = " +
                                 std::to_string(want) + " entries");
    for (int i = 0; i < want; ++i) {
      if (!(sched.shapes[i] > 0.5))
        fail(where + ".gamma.shapes[" + std::to_string(i) + "]", "must exceed 1/2");
      if (!(sched.scales[i] > 0.0))
        fail(where + ".gamma.scales[" + std::to_string(i) + "]", "must be positive");
    }
    d.gamma = std::move(sched);
  }
  std::string w = get_string(v, where, "weights", "unit");
  if (w == "unit") d.weights = PavaWeights::unit;
  else if (w == "curvature") d.weights = PavaWeights::curvature;
  else fail(where + ".weights", "expected \"unit\" or \"curvature\", got \"" + w + "\"");
  if (v.contains("dataset")) d.dataset = get_string(v, where, "dataset", "");
  return d;
}

OccamSection parse_occam(const json& v, const std::string& where) {
  require_object(v, where);
  check_keys(v, where, {"data", "hypotheses"});
  OccamSection o;
  if (!v.contains("data")) fail(where, "missing required key 'data'");
  {
    const json& d = v.at("data");
    if (!d.is_array() || d.size() < 2) fail(where + ".data", "expected an array of >= 2 integers");
    if (d.size() > 64) fail(where + ".data", "at most 64 terms supported");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string at = where + ".data[" + std::to_string(i) + "]";
      if (!d[i].is_number_integer()) fail(at, "expected an integer");
      long long x = d[i].get<long long>();
      if (x < -1000000000LL || x > 1000000000LL) fail(at, "must be in [-1e9, 1e9]");
      o.data.push_back(x);
    }
  }
  if (v.contains("hypotheses")) {
    const json& hs = v.at("hypotheses");
    if (!hs.is_array() || hs.empty()) fail(where + ".hypotheses", "expected a non-empty array");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string at = where + ".hypotheses[" + std::to_string(i) + "]";
      const json& h = require_object(hs[i], at);
      OccamHypothesis hyp;
      std::string kind = get_string(h, at, "kind", "");
      if (kind == "arithmetic") {
        check_keys(h, at, {"kind", "lo", "hi"});
        hyp.kind = OccamHypothesis::Kind::arithmetic;
        hyp.lo = get_int(h, at, "lo", -50);
        hyp.hi = get_int(h, at, "hi", 50);
        if (hyp.lo > hyp.hi) fail(at, "requires lo <= hi");
        if (hyp.hi - hyp.lo > 10000) fail(at, "grid side at most 10001 values");
      } else if (kind == "cubic") {
        check_keys(h, at, {"kind", "max_numerator", "max_denominator"});
        hyp.kind = OccamHypothesis::Kind::cubic;
        hyp.max_numerator = get_int(h, at, "max_numerator", 50);
        hyp.max_denominator = get_int(h, at, "max_denominator", 4);
        if (hyp.max_numerator < 0) fail(at + ".max_numerator", "must be >= 0");
        if (hyp.max_denominator < 1) fail(at + ".max_denominator", "must be >= 1");
        if (hyp.max_numerator > 5000 || hyp.max_denominator > 64)
          fail(at, "grid limits: max_numerator <= 5000, max_denominator <= 64");
      } else {
        fail(at + ".kind", "expected \"arithmetic\" or \"cubic\", got \"" + kind + "\"");
      }
      o.hypotheses.push_back(hyp);
    }
  } else {
    o.hypotheses.push_back(OccamHypothesis{});
    OccamHypothesis cubic;
    cubic.kind = OccamHypothesis::Kind::cubic;
    o.hypotheses.push_back(cubic);
  }
  return o;
}

// nlohmann reports byte offsets; turn them into line:column for humans.
std::string offset_to_line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') { ++line; col = 1; }
    else ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json prior_to_json(const PriorSchedule& p) {
  return json{{"kind", p.kind == PriorSchedule::Kind::constant ? "constant" : "young_decay"},
              {"tau2", p.tau2}};
}

json generator_to_json(const GeneratorSpec& g) {
  json v{{"true_degree", g.true_degree},
         {"noise_sd", g.noise_sd},
         {"n", g.N},
         {"x_design", g.x_design == XDesign::equispaced ? "equispaced" : "uniform_random"},
         {"domain", {g.a, g.b}}};
  if (g.true_coefficients.size() != 0) {
    json c = json::array();
    for (int i = 0; i < g.true_coefficients.size(); ++i) c.push_back(g.true_coefficients[i]);
    v["coefficients"] = std::move(c);
  }
  return v;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source_name + ": JSON parse error at " +
                      offset_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(source_name + ": top level must be a JSON object");
  check_keys(root, "$", {"version", "seed", "generator", "sweep", "evidence", "deaton", "occam"});
  if (!root.contains("version")) fail("$", "missing required key 'version'");
  if (!root.at("version").is_number_integer() || root.at("version").get<long long>() != 1)
    fail("$.version", "this tool reads schema version 1");

  RunConfig cfg;
  if (root.contains("seed")) cfg.seed = as_uint64(root.at("seed"), "$.seed");
  if (root.contains("generator")) cfg.generator = parse_generator(root.at("generator"), "$.generator");
  if (root.contains("sweep")) cfg.sweep = parse_sweep(root.at("sweep"), "$.sweep");
  if (root.contains("evidence")) cfg.evidence = parse_evidence(root.at("evidence"), "$.evidence");
  if (root.contains("deaton")) cfg.deaton = parse_deaton(root.at("deaton"), "$.deaton");
  if (root.contains("occam")) cfg.occam = parse_occam(root.at("occam"), "$.occam");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_to_json_text(const RunConfig& cfg) {
  json root;
  root["version"] = cfg.version;
  if (cfg.seed) root["seed"] = *cfg.seed;
  if (cfg.generator) root["generator"] = generator_to_json(*cfg.generator);
  if (cfg.sweep) {
    const SweepSection& s = *cfg.sweep;
    root["sweep"] = json{{"complexities", s.complexities},
                         {"replicates", s.replicates},
                         {"test_points", s.test_points},
                         {"min_norm_tol", s.min_norm_tol},
                         {"prior", prior_to_json(s.prior)}};
  }
  if (cfg.evidence) {
    const EvidenceSection& e = *cfg.evidence;
    json v{{"degrees", e.degrees}, {"prior", prior_to_json(e.prior)}};
    if (!e.seeds.empty()) v["seeds"] = e.seeds;
    if (e.dataset) v["dataset"] = *e.dataset;
    root["evidence"] = std::move(v);
  }
  if (cfg.deaton) {
    const DeatonSection& d = *cfg.deaton;
    json v{{"degree", d.degree},
           {"weights", d.weights == PavaWeights::unit ? "unit" : "curvature"}};
    if (d.gamma) {
      json shapes = json::array(), scales = json::array();
      for (int i = 0; i < d.gamma->shapes.size(); ++i) shapes.push_back(d.gamma->shapes[i]);
      for (int i = 0; i < d.gamma->scales.size(); ++i) scales.push_back(d.gamma->scales[i]);
      v["gamma"] = json{{"shapes", std::move(shapes)}, {"scales", std::move(scales)}};
    }
    if (d.dataset) v["dataset"] = *d.dataset;
    root["deaton"] = std::move(v);
  }
  if (cfg.occam) {
    const OccamSection& o = *cfg.occam;
    json hs = json::array();
    for (const OccamHypothesis& h : o.hypotheses) {
      if (h.kind == OccamHypothesis::Kind::arithmetic)
        hs.push_back(json{{"kind", "arithmetic"}, {"lo", h.lo}, {"hi", h.hi}});
      else
        hs.push_back(json{{"kind", "cubic"},
                          {"max_numerator", h.max_numerator},
                          {"max_denominator", h.max_denominator}});
    }
    root["occam"] = json{{"data", o.data}, {"hypotheses", std::move(hs)}};
  }
  return root.dump(2) + "\n";
}

std::string dataset_sidecar_json(const GeneratorSpec& resolved_spec, std::uint64_t seed) {
  json root{{"version", 1}, {"seed", seed}, {"generator", generator_to_json(resolved_spec)}};
  return root.dump(2) + "\n";
}

}  // namespace ddlab
