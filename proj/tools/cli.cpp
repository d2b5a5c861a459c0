#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <Eigen/Core>

#include "spectral_sdp/errors.hpp"
#include "spectral_sdp/multirate.hpp"
#include "spectral_sdp/sampling.hpp"
#include "spectral_sdp/trig_ops.hpp"

#ifndef SPECTRAL_SDP_VERSION
#define SPECTRAL_SDP_VERSION "0.0.0"
#endif

namespace spectral_sdp::cli {
namespace {

using Clock = std::chrono::steady_clock;

// Independent streams derived from the one experiment seed.
constexpr std::uint64_t kSpikeStream = 0;
constexpr std::uint64_t kSelectionStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_fail(where.empty() ? "config" : where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_fail(at(where, key), "unknown field");
    }
  }
}

double get_number(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail(at(where, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_fail(at(where, key), "expected a finite number");
  return d;
}

std::int64_t get_integer(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_fail(at(where, key), "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_fail(at(where, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) config_fail(at(where, key), "expected a string");
  return v.get<std::string>();
}

Rational get_rational(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) config_fail(at(where, key), "expected an exact \"num/den\" string");
  try {
    return Rational::parse(v.get<std::string>());
  } catch (const InvalidInput& e) {
    config_fail(at(where, key), e.what());
  }
}

Scenario parse_scenario(const std::string& s, const std::string& where) {
  if (s == "full") return Scenario::kFull;
  if (s == "selection") return Scenario::kSelection;
  if (s == "random-selection") return Scenario::kRandomSelection;
  if (s == "multirate") return Scenario::kMultirate;
  config_fail(where, "unknown scenario \"" + s + "\" (full, selection, random-selection, multirate)");
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (text.empty() || text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) config_fail(where, "seed must be a nonnegative integer, got \"" + text + "\"");
  return v;
}

void apply_set(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_fail("--set " + assignment, "expected key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::string pointer;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) config_fail("--set " + assignment, "empty path component");
    pointer += "/" + part;
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  doc[json::json_pointer(pointer)] = value;
}

SpikeSpectrum parse_spikes(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) config_fail(where, "expected a nonempty array of spikes");
  std::vector<std::pair<double, Complex>> spikes;
  for (std::size_t r = 0; r < arr.size(); ++r) {
    const std::string w = where + "[" + std::to_string(r) + "]";
    check_keys(arr[r], w, {"freq", "amp"});
    if (!arr[r].contains("freq") || !arr[r].contains("amp")) config_fail(w, "needs freq and amp");
    spikes.emplace_back(get_number(arr[r], w, "freq"), complex_from_json(arr[r].at("amp"), w + ".amp"));
  }
  SpikeSpectrum out;
  for (const auto& [f, a] : spikes) {
    out.freqs.push_back(f);
    out.amps.push_back(a);
  }
  try {
    out.validate();
  } catch (const InvalidInput& e) {
    config_fail(where, e.what());
  }
  return out;
}

// Random spikes on [0, f) with reduced separation >= min_sep.
SpikeSpectrum random_spikes(std::size_t count, double f, double min_sep, std::uint64_t seed) {
  GaussianStream g(seed);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> nu;
    for (std::size_t r = 0; r < count; ++r) nu.push_back(g.uniform());
    std::sort(nu.begin(), nu.end());
    if (count > 1 && torus_separation(nu) < min_sep) continue;
    SpikeSpectrum out;
    for (double v : nu) {
      out.freqs.push_back(v * f);
      out.amps.push_back(std::polar(0.5 + g.uniform(), kTwoPi * g.uniform()));
    }
    return out;
  }
  throw ConfigError("signal.random: cannot place " + std::to_string(count) + " spikes with separation " + num(min_sep));
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

void require_sampling(const ExperimentConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::kFull:
      if (cfg.n < 1) config_fail("sampling.n", "required (>= 1) for scenario full");
      break;
    case Scenario::kSelection:
      if (cfg.n < 1) config_fail("sampling.n", "required (>= 1) for scenario selection");
      if (cfg.indices.empty()) config_fail("sampling.indices", "required for scenario selection");
      break;
    case Scenario::kRandomSelection:
      if (cfg.n < 1) config_fail("sampling.n", "required (>= 1) for scenario random-selection");
      if (!(cfg.p > 0.0 && cfg.p <= 1.0)) config_fail("sampling.p", "required in (0, 1] for scenario random-selection");
      break;
    case Scenario::kMultirate:
      if (cfg.system.grids.empty()) config_fail("sampling.grids", "required for scenario multirate");
      break;
  }
}

std::optional<CommonGrid> config_common_grid(const ExperimentConfig& cfg) {
  if (cfg.scenario != Scenario::kMultirate) return std::nullopt;
  CommonGridSearch search = find_common_grid(cfg.system);
  if (!search.grid) throw ConfigError("sampling.grids: no common supporting grid: " + search.violated_condition);
  return search.grid;
}

json versions() {
  json v;
  v["spectral_sdp"] = SPECTRAL_SDP_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

json provenance(const ExperimentConfig& cfg) {
  json p;
  p["config_hash"] = hex64(fnv1a64(cfg.effective.dump()));
  p["seed"] = cfg.seed;
  p["generator"] = std::string(kRandomGeneratorName);
  p["versions"] = versions();
  return p;
}

json spikes_to_json(const SpikeSpectrum& s) {
  json arr = json::array();
  for (std::size_t r = 0; r < s.s(); ++r) arr.push_back({{"freq", s.freqs[r]}, {"amp", complex_to_json(s.amps[r])}});
  return arr;
}

json grids_to_json(const MultirateSystem& system) {
  json arr = json::array();
  for (const auto& g : system.grids) {
    arr.push_back({{"f", g.f.to_string()}, {"gamma", g.gamma.to_string()}, {"n", g.n}});
  }
  return arr;
}

std::vector<fs::path> default_inputs(const ExperimentConfig& cfg, bool selected) {
  std::vector<fs::path> out;
  if (cfg.scenario == Scenario::kMultirate) {
    const fs::path stem = fs::path(cfg.outputs.samples).stem();
    const fs::path ext = fs::path(cfg.outputs.samples).extension();
    for (std::size_t j = 0; j < cfg.system.grids.size(); ++j) {
      out.push_back(cfg.outputs.dir / (stem.string() + "_" + std::to_string(j) + ext.string()));
    }
  } else if (selected && cfg.scenario != Scenario::kFull) {
    out.push_back(cfg.outputs.dir / cfg.outputs.selected);
  } else {
    out.push_back(cfg.outputs.dir / cfg.outputs.samples);
  }
  return out;
}

void require_contiguous(const SampleFile& file, std::int64_t n, const fs::path& path) {
  if (static_cast<std::int64_t>(file.indices.size()) != n) {
    throw IoError(path.string() + ": expected " + std::to_string(n) + " samples, found " +
                  std::to_string(file.indices.size()));
  }
  for (std::int64_t k = 0; k < n; ++k) {
    if (file.indices[static_cast<std::size_t>(k)] != k) {
      throw IoError(path.string() + ": expected indices 0.." + std::to_string(n - 1) + " in order");
    }
  }
}

EstimateOptions estimate_options(const ExperimentConfig& cfg) {
  EstimateOptions opt;
  opt.f = cfg.f.to_double();
  const SolverConfig& s = cfg.solver;
  opt.solver.rho = s.rho;
  opt.solver.max_iter = s.max_iter;
  opt.solver.tol_primal = s.tol_primal;
  opt.solver.tol_dual = s.tol_dual;
  opt.solver.auto_normalize = s.auto_normalize;
  opt.solver.gamma = s.gamma;
  if (s.ast) {
    if (s.tau) {
      opt.solver.tau = s.tau;
    } else if (s.sigma) {
      opt.solver.sigma = s.sigma;
    } else if (cfg.noise_sigma > 0.0) {
      opt.solver.sigma = cfg.noise_sigma;
    } else {
      config_fail("solver.mode", "ast needs solver.tau, solver.sigma or noise.sigma > 0");
    }
  }
  opt.peak_tol = s.peak_tol;
  opt.grid_factor = s.grid_factor;
  return opt;
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kFull:
      return "full";
    case Scenario::kSelection:
      return "selection";
    case Scenario::kRandomSelection:
      return "random-selection";
    case Scenario::kMultirate:
      return "multirate";
  }
  return "?";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read error");
  return ss.str();
}

json parse_json(const std::string& text, const fs::path& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line/column.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ConfigError(origin.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos)));
  }
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": cannot create directory: " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError(tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path.string() + ": cannot replace: " + ec.message());
  }
}

json complex_to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"re", "im"});
  if (!j.contains("re") || !j.contains("im")) config_fail(where, "expected {\"re\": x, \"im\": y}");
  return {get_number(j, where, "re"), get_number(j, where, "im")};
}

std::string format_samples(const std::vector<std::int64_t>& indices, const ComplexVector& values) {
  std::string out = "index,re,im\n";
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const Complex z = values[static_cast<Eigen::Index>(t)];
    out += std::to_string(indices[t]) + "," + num(z.real()) + "," + num(z.imag()) + "\n";
  }
  return out;
}

SampleFile read_samples(const fs::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(in, line)) {
    lineno = 1;
    fail("empty file, expected header index,re,im");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,re,im") fail("expected header index,re,im");
  std::vector<std::int64_t> idx;
  std::vector<Complex> vals;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() != 3) fail("expected 3 fields, found " + std::to_string(fields.size()));
    try {
      std::size_t u0 = 0;
      std::size_t u1 = 0;
      std::size_t u2 = 0;
      const long long k = std::stoll(fields[0], &u0);
      const double re = std::stod(fields[1], &u1);
      const double im = std::stod(fields[2], &u2);
      if (u0 != fields[0].size() || u1 != fields[1].size() || u2 != fields[2].size()) throw std::invalid_argument("");
      if (!std::isfinite(re) || !std::isfinite(im)) fail("non-finite sample");
      if (!idx.empty() && k <= idx.back()) fail("indices must be strictly increasing");
      if (k < 0) fail("negative index");
      idx.push_back(k);
      vals.emplace_back(re, im);
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
  if (idx.empty()) fail("no samples");
  SampleFile out;
  out.indices = std::move(idx);
  out.values = Eigen::Map<const ComplexVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return out;
}

MultirateSystem parse_system(const json& doc) {
  const json* grids = nullptr;
  std::string where = "grids";
  if (doc.contains("grids")) {
    grids = &doc.at("grids");
  } else if (doc.contains("sampling") && doc.at("sampling").is_object() && doc.at("sampling").contains("grids")) {
    grids = &doc.at("sampling").at("grids");
    where = "sampling.grids";
  } else {
    config_fail("grids", "missing (expected \"grids\" or \"sampling.grids\")");
  }
  if (!grids->is_array() || grids->empty()) config_fail(where, "expected a nonempty array");
  MultirateSystem sys;
  for (std::size_t j = 0; j < grids->size(); ++j) {
    const std::string w = where + "[" + std::to_string(j) + "]";
    const json& g = (*grids)[j];
    check_keys(g, w, {"f", "gamma", "n"});
    if (!g.contains("f") || !g.contains("n")) config_fail(w, "needs f and n");
    Grid grid;
    grid.f = get_rational(g, w, "f");
    grid.gamma = g.contains("gamma") ? get_rational(g, w, "gamma") : Rational(0);
    grid.n = get_integer(g, w, "n");
    try {
      grid.validate();
    } catch (const InvalidInput& e) {
      config_fail(w, e.what());
    }
    sys.grids.push_back(grid);
  }
  return sys;
}

ExperimentConfig load_config(const fs::path& path, const Overrides& overrides) {
  const json doc = parse_json(read_file(path), path);
  return parse_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."), overrides);
}

ExperimentConfig parse_config(json doc, const fs::path& base_dir, const Overrides& overrides) {
  for (const auto& s : overrides.set) apply_set(doc, s);
  check_keys(doc, "", {"schema", "scenario", "seed", "signal", "sampling", "noise", "solver", "outputs", "inputs",
                       "bench", "description"});
  if (!doc.contains("schema")) config_fail("schema", "missing (expected 1)");
  if (!doc.at("schema").is_number_integer() || doc.at("schema").get<int>() != kSchemaVersion) {
    config_fail("schema", "unsupported version (expected 1)");
  }
  ExperimentConfig cfg;

  // Seed precedence: flag > environment > config > default.
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      config_fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
    cfg.seed_source = "config";
  }
  if (const char* env = std::getenv("SPECTRAL_SDP_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = parse_seed(env, "SPECTRAL_SDP_SEED");
    cfg.seed_source = "env";
  }
  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    cfg.seed_source = "flag";
  }
  doc["seed"] = cfg.seed;

  cfg.scenario = parse_scenario(doc.contains("scenario") ? get_string(doc, "", "scenario") : "full", "scenario");

  if (doc.contains("sampling")) {
    const json& s = doc.at("sampling");
    check_keys(s, "sampling", {"f", "n", "indices", "p", "grids"});
    if (s.contains("f")) cfg.f = get_rational(s, "sampling", "f");
    if (cfg.f <= Rational(0)) config_fail("sampling.f", "must be positive");
    if (s.contains("n")) {
      cfg.n = get_integer(s, "sampling", "n");
      if (cfg.n < 1) config_fail("sampling.n", "must be >= 1");
    }
    if (s.contains("indices")) {
      const json& arr = s.at("indices");
      if (!arr.is_array()) config_fail("sampling.indices", "expected an array of integers");
      for (std::size_t t = 0; t < arr.size(); ++t) {
        if (!arr[t].is_number_integer()) config_fail("sampling.indices[" + std::to_string(t) + "]", "expected an integer");
        cfg.indices.push_back(arr[t].get<std::int64_t>());
      }
      try {
        SelectionPattern::make(cfg.indices, std::max<std::int64_t>(cfg.n, 1));
      } catch (const InvalidInput& e) {
        config_fail("sampling.indices", e.what());
      }
    }
    if (s.contains("p")) cfg.p = get_number(s, "sampling", "p");
    if (s.contains("grids")) cfg.system = parse_system(doc);
  }

  if (doc.contains("noise")) {
    const json& nz = doc.at("noise");
    check_keys(nz, "noise", {"sigma"});
    if (nz.contains("sigma")) cfg.noise_sigma = get_number(nz, "noise", "sigma");
    if (cfg.noise_sigma < 0.0) config_fail("noise.sigma", "must be >= 0");
  }

  SolverConfig& sv = cfg.solver;
  sv.ast = cfg.noise_sigma > 0.0;
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver", {"mode", "tau", "sigma", "gamma", "rho", "max_iter", "tol_primal", "tol_dual",
                             "auto_normalize", "peak_tol", "grid_factor"});
    if (s.contains("mode")) {
      const std::string mode = get_string(s, "solver", "mode");
      if (mode != "ast" && mode != "noiseless") config_fail("solver.mode", "expected \"ast\" or \"noiseless\"");
      sv.ast = mode == "ast";
    }
    if (s.contains("tau")) {
      sv.tau = get_number(s, "solver", "tau");
      if (*sv.tau < 0.0) config_fail("solver.tau", "must be >= 0");
      if (!s.contains("mode")) sv.ast = true;
    }
    if (s.contains("sigma")) {
      sv.sigma = get_number(s, "solver", "sigma");
      if (*sv.sigma < 0.0) config_fail("solver.sigma", "must be >= 0");
      if (!s.contains("mode")) sv.ast = true;
    }
    if (s.contains("gamma")) {
      sv.gamma = get_number(s, "solver", "gamma");
      if (!(sv.gamma > 1.0)) config_fail("solver.gamma", "must exceed 1");
    }
    if (s.contains("rho")) {
      sv.rho = get_number(s, "solver", "rho");
      if (!(*sv.rho > 0.0)) config_fail("solver.rho", "must be > 0");
    }
    if (s.contains("max_iter")) {
      const std::int64_t it = get_integer(s, "solver", "max_iter");
      if (it < 1 || it > 100'000'000) config_fail("solver.max_iter", "must lie in [1, 1e8]");
      sv.max_iter = static_cast<int>(it);
    }
    if (s.contains("tol_primal")) sv.tol_primal = get_number(s, "solver", "tol_primal");
    if (s.contains("tol_dual")) sv.tol_dual = get_number(s, "solver", "tol_dual");
    if (!(sv.tol_primal > 0.0)) config_fail("solver.tol_primal", "must be > 0");
    if (!(sv.tol_dual > 0.0)) config_fail("solver.tol_dual", "must be > 0");
    if (s.contains("auto_normalize")) sv.auto_normalize = get_bool(s, "solver", "auto_normalize");
    if (s.contains("peak_tol")) {
      sv.peak_tol = get_number(s, "solver", "peak_tol");
      if (!(sv.peak_tol > 0.0 && sv.peak_tol < 1.0)) config_fail("solver.peak_tol", "must lie in (0, 1)");
    }
    if (s.contains("grid_factor")) {
      sv.grid_factor = get_integer(s, "solver", "grid_factor");
      if (sv.grid_factor < 8) config_fail("solver.grid_factor", "must be >= 8");
    }
  }

  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    check_keys(o, "outputs", {"dir", "samples", "selected", "truth", "result", "plot", "peaks", "bench"});
    if (o.contains("dir")) cfg.outputs.dir = get_string(o, "outputs", "dir");
    if (o.contains("samples")) cfg.outputs.samples = get_string(o, "outputs", "samples");
    if (o.contains("selected")) cfg.outputs.selected = get_string(o, "outputs", "selected");
    if (o.contains("truth")) cfg.outputs.truth = get_string(o, "outputs", "truth");
    if (o.contains("result")) cfg.outputs.result = get_string(o, "outputs", "result");
    if (o.contains("plot")) cfg.outputs.plot = get_string(o, "outputs", "plot");
    if (o.contains("peaks")) cfg.outputs.peaks = get_string(o, "outputs", "peaks");
    if (o.contains("bench")) cfg.outputs.bench = get_string(o, "outputs", "bench");
  }
  cfg.outputs.dir = overrides.out_dir ? *overrides.out_dir : resolve(base_dir, cfg.outputs.dir);

  if (doc.contains("inputs")) {
    const json& in = doc.at("inputs");
    check_keys(in, "inputs", {"samples"});
    if (in.contains("samples")) {
      const json& arr = in.at("samples");
      if (!arr.is_array()) config_fail("inputs.samples", "expected an array of paths");
      for (std::size_t t = 0; t < arr.size(); ++t) {
        if (!arr[t].is_string()) config_fail("inputs.samples[" + std::to_string(t) + "]", "expected a path string");
        cfg.inputs.push_back(resolve(base_dir, arr[t].get<std::string>()));
      }
    }
  }

  if (doc.contains("bench")) {
    const json& b = doc.at("bench");
    check_keys(b, "bench", {"m", "spikes", "jobs"});
    if (b.contains("m")) {
      const json& arr = b.at("m");
      if (!arr.is_array() || arr.empty()) config_fail("bench.m", "expected a nonempty array of sizes");
      cfg.bench.m.clear();
      for (std::size_t t = 0; t < arr.size(); ++t) {
        if (!arr[t].is_number_integer() || arr[t].get<std::int64_t>() < 2) {
          config_fail("bench.m[" + std::to_string(t) + "]", "expected an integer >= 2");
        }
        cfg.bench.m.push_back(arr[t].get<std::int64_t>());
      }
    }
    if (b.contains("spikes")) {
      const std::int64_t s = get_integer(b, "bench", "spikes");
      if (s < 1) config_fail("bench.spikes", "must be >= 1");
      cfg.bench.spikes = static_cast<std::size_t>(s);
    }
    if (b.contains("jobs")) {
      const std::int64_t j = get_integer(b, "bench", "jobs");
      if (j < 1) config_fail("bench.jobs", "must be >= 1");
      cfg.bench.jobs = static_cast<int>(j);
    }
  }

  if (doc.contains("signal")) {
    const json& sig = doc.at("signal");
    check_keys(sig, "signal", {"spikes", "random"});
    if (sig.contains("spikes") == sig.contains("random")) {
      config_fail("signal", "give exactly one of \"spikes\" or \"random\"");
    }
    if (sig.contains("spikes")) {
      cfg.spectrum = parse_spikes(sig.at("spikes"), "signal.spikes");
    } else {
      const json& r = sig.at("random");
      check_keys(r, "signal.random", {"count", "min_separation"});
      if (!r.contains("count")) config_fail("signal.random.count", "missing");
      const std::int64_t count = get_integer(r, "signal.random", "count");
      if (count < 1) config_fail("signal.random.count", "must be >= 1");
      require_sampling(cfg);
      double f_ref = cfg.f.to_double();
      std::int64_t n_ref = cfg.n;
      if (cfg.scenario == Scenario::kMultirate) {
        const auto cg = config_common_grid(cfg);
        f_ref = cg->f0.to_double();
        n_ref = cg->n0;
      }
      const double sep = r.contains("min_separation") ? get_number(r, "signal.random", "min_separation")
                                                      : 4.0 / static_cast<double>(std::max<std::int64_t>(n_ref - 1, 1));
      cfg.spectrum = random_spikes(static_cast<std::size_t>(count), f_ref, sep, cfg.seed + kSpikeStream);
    }
  }

  cfg.effective = std::move(doc);
  return cfg;
}

Synthesis synthesize(const ExperimentConfig& cfg) {
  require_sampling(cfg);
  if (cfg.spectrum.s() == 0) config_fail("signal", "required for synth");
  Synthesis out;
  const std::vector<fs::path> paths = default_inputs(cfg, false);
  if (cfg.scenario == Scenario::kMultirate) {
    for (std::size_t j = 0; j < cfg.system.grids.size(); ++j) {
      ComplexVector y = synthesize_grid(cfg.spectrum, cfg.system.grids[j]);
      // One noise substream per grid.
      y = add_noise(y, {cfg.noise_sigma, cfg.seed + kNoiseStream + 0x100 * j});
      std::vector<std::int64_t> idx(static_cast<std::size_t>(y.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<std::int64_t>(k);
      out.files.emplace_back(paths[j], format_samples(idx, y));
    }
  } else {
    ComplexVector y = synthesize_uniform(cfg.spectrum, cfg.f.to_double(), cfg.n);
    y = add_noise(y, {cfg.noise_sigma, cfg.seed + kNoiseStream});
    std::vector<std::int64_t> idx(static_cast<std::size_t>(cfg.n));
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<std::int64_t>(k);
    out.files.emplace_back(paths[0], format_samples(idx, y));
  }
  out.files.emplace_back(cfg.outputs.dir / cfg.outputs.truth, truth_sidecar(cfg).dump(2) + "\n");
  return out;
}

json truth_sidecar(const ExperimentConfig& cfg) {
  json t;
  t["schema"] = kSchemaVersion;
  t["kind"] = "truth";
  t["scenario"] = std::string(scenario_name(cfg.scenario));
  if (cfg.scenario == Scenario::kMultirate) {
    t["grids"] = grids_to_json(cfg.system);
  } else {
    t["rate"] = cfg.f.to_string();
    t["n"] = cfg.n;
  }
  t["spikes"] = spikes_to_json(cfg.spectrum);
  t["noise"] = {{"sigma", cfg.noise_sigma}};
  t["provenance"] = provenance(cfg);
  return t;
}

SampleFile select_samples(const ExperimentConfig& cfg, const SampleFile& uniform) {
  require_sampling(cfg);
  if (cfg.scenario == Scenario::kMultirate) {
    throw ConfigError("scenario: sample applies to selection scenarios; multirate grids are sampled by synth");
  }
  SelectionPattern pattern;
  switch (cfg.scenario) {
    case Scenario::kFull:
      pattern = SelectionPattern::full(cfg.n);
      break;
    case Scenario::kSelection:
      pattern = SelectionPattern::make(cfg.indices, cfg.n);
      break;
    default:
      pattern = random_selection(cfg.n, cfg.p, cfg.seed + kSelectionStream);
      break;
  }
  if (static_cast<std::int64_t>(uniform.indices.size()) != cfg.n) {
    throw IoError("uniform samples: expected " + std::to_string(cfg.n) + " samples, found " +
                  std::to_string(uniform.indices.size()));
  }
  SampleFile out;
  out.indices = pattern.indices;
  out.values = apply_subsampling(selection_matrix(pattern), uniform.values);
  return out;
}

json grid_report(const MultirateSystem& system, const CommonGridLimits& limits) {
  json r;
  r["schema"] = kSchemaVersion;
  r["kind"] = "grid-report";
  r["grids"] = grids_to_json(system);
  const CommonGridSearch search = find_common_grid(system, limits);
  r["m_tilde"] = system.total_samples();
  if (!search.grid) {
    r["exists"] = false;
    r["violated_condition"] = search.violated_condition;
    return r;
  }
  const CommonGrid& cg = *search.grid;
  const ComplexityReport rep = complexity_report(system, cg);
  r["exists"] = true;
  r["f0"] = cg.f0.to_string();
  r["gamma0"] = cg.gamma0.to_string();
  r["n0"] = cg.n0;
  json exp = json::array();
  for (const auto& e : cg.expansions) exp.push_back({{"l", e.l}, {"a", e.a}});
  r["expansions"] = exp;
  r["observation_set"] = cg.observation_set.indices;
  r["m"] = rep.m;
  r["ratio"] = rep.ratio;
  r["ratio_exact"] = Rational(rep.m, rep.n0).to_string();
  json dup = json::array();
  for (std::size_t t = 0; t < cg.duplicate_groups.size(); ++t) {
    const auto& group = cg.duplicate_groups[t];
    if (group.size() < 2) continue;
    json origins = json::array();
    for (const auto& o : group) origins.push_back({{"grid", o.grid}, {"k", o.k}});
    dup.push_back({{"index", cg.observation_set.indices[t]}, {"samples", origins}});
  }
  r["duplicates"] = dup;
  return r;
}

EstimateOutput run_estimate(const ExperimentConfig& cfg) {
  require_sampling(cfg);
  const std::vector<fs::path> inputs = cfg.inputs.empty() ? default_inputs(cfg, true) : cfg.inputs;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw IoError(p.string() + ": input file not found");
  }
  const EstimateOptions opt = estimate_options(cfg);
  const auto t0 = Clock::now();
  EstimateResult res;
  Rational rate = cfg.f;
  Rational gamma0(0);
  if (cfg.scenario == Scenario::kMultirate) {
    if (inputs.size() != cfg.system.grids.size()) {
      throw ConfigError("inputs.samples: expected " + std::to_string(cfg.system.grids.size()) + " files, got " +
                        std::to_string(inputs.size()));
    }
    std::vector<ComplexVector> per_grid;
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      SampleFile file = read_samples(inputs[j]);
      require_contiguous(file, cfg.system.grids[j].n, inputs[j]);
      per_grid.push_back(std::move(file.values));
    }
    const auto cg = config_common_grid(cfg);
    res = estimate_multirate(per_grid, cfg.system, opt);
    rate = cg->f0;
    gamma0 = cg->gamma0;
  } else {
    if (inputs.size() != 1) config_fail("inputs.samples", "expected exactly one sample file");
    SampleFile file = read_samples(inputs[0]);
    SelectionPattern pattern;
    if (cfg.scenario == Scenario::kFull) {
      require_contiguous(file, cfg.n, inputs[0]);
      pattern = SelectionPattern::full(cfg.n);
    } else {
      try {
        pattern = SelectionPattern::make(file.indices, cfg.n);
      } catch (const InvalidInput& e) {
        throw IoError(inputs[0].string() + ": " + e.what());
      }
    }
    res = estimate(file.values, pattern, opt);
  }
  const double solve_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  const SpectrumEstimate& est = res.estimate;
  const double f = rate.to_double();

  EstimateOutput out;
  out.converged = res.report.converged;
  json rec;
  rec["schema"] = kSchemaVersion;
  rec["kind"] = "estimate";
  rec["scenario"] = std::string(scenario_name(cfg.scenario));
  json e;
  e["rate"] = rate.to_string();
  e["freqs_hz"] = est.freqs;
  json amps = json::array();
  for (const auto& a : est.amps) amps.push_back(complex_to_json(a));
  e["amps"] = amps;
  e["peak_moduli"] = est.diagnostics.peak_moduli;
  rec["estimate"] = e;
  json q = json::array();
  for (Eigen::Index k = 0; k < est.dual_poly.size(); ++k) q.push_back(complex_to_json(est.dual_poly[k]));
  rec["dual_poly"] = q;
  rec["frame"] = {{"rate", rate.to_string()},
                  {"shift_samples", res.shift},
                  {"gamma0", gamma0.to_string()},
                  {"ambient", res.pattern.ambient},
                  {"observation_set", res.pattern.indices}};
  json d;
  d["converged"] = res.report.converged;
  d["unreliable"] = est.diagnostics.unreliable;
  d["iterations"] = res.report.iterations;
  d["residuals"] = {{"primal", res.report.final_residuals.primal},
                    {"constraint", res.report.final_residuals.constraint},
                    {"dual", res.report.final_residuals.dual}};
  d["dual_objective"] = res.report.dual_objective;
  d["sup_norm"] = est.diagnostics.sup_norm;
  d["sup_margin"] = 1.0 - est.diagnostics.sup_norm;
  d["fit_residual"] = est.diagnostics.residual;
  d["newton_fallback"] = est.diagnostics.newton_fallback;
  d["m"] = res.pattern.m();
  const AssembleOptions& so = opt.solver;
  d["tau"] = so.tau ? *so.tau : (so.sigma ? tau_from_noise(*so.sigma, res.pattern.m(), so.gamma) : 0.0);
  rec["diagnostics"] = d;
  if (res.common) rec["common_grid"] = grid_report(cfg.system, {});
  rec["config"] = cfg.effective;
  rec["provenance"] = provenance(cfg);
  rec["timing"] = {{"solve_ms", solve_ms}};
  out.record = std::move(rec);

  const Eigen::Index n = est.dual_poly.size();
  const Eigen::Index pts = std::max<Eigen::Index>(8, cfg.solver.grid_factor) * n;
  const RealVector mod = modulus_on_grid(est.dual_poly, pts);
  std::string plot = "nu\tfreq_hz\tmodulus\n";
  for (Eigen::Index t = 0; t < pts; ++t) {
    const double nu = static_cast<double>(t) / static_cast<double>(pts);
    plot += num(nu) + "\t" + num(nu * f) + "\t" + num(mod[t]) + "\n";
  }
  out.plot_tsv = std::move(plot);
  std::string peaks = "freq_hz\tnu\tmodulus\tamp_re\tamp_im\n";
  for (std::size_t r = 0; r < est.freqs.size(); ++r) {
    peaks += num(est.freqs[r]) + "\t" + num(est.freqs[r] / f) + "\t" + num(est.diagnostics.peak_moduli[r]) + "\t" +
             num(est.amps[r].real()) + "\t" + num(est.amps[r].imag()) + "\n";
  }
  out.peaks_tsv = std::move(peaks);
  return out;
}

std::vector<BenchRow> run_bench(const ExperimentConfig& cfg) {
  const auto& ms = cfg.bench.m;
  std::vector<BenchRow> rows(ms.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    for (std::size_t i = next++; i < ms.size(); i = next++) {
      try {
        const std::int64_t m = ms[i];
        const std::size_t s = std::min<std::size_t>(cfg.bench.spikes, static_cast<std::size_t>(m / 4 + 1));
        const SpikeSpectrum spec =
            random_spikes(s, 1.0, 4.0 / static_cast<double>(m - 1), cfg.seed + static_cast<std::uint64_t>(m));
        const ComplexVector y = synthesize_uniform(spec, 1.0, m);
        EstimateOptions opt = estimate_options(cfg);
        AssembledProblem prob = assemble_problem(y, SelectionPattern::full(m), opt.solver);
        const auto t0 = Clock::now();
        const SolveReport rep = solve(prob.spec);
        const double total = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        rows[i] = {m, 1000.0 * total / std::max(rep.iterations, 1), total, rep.iterations};
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.bench.jobs, static_cast<int>(ms.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows) {
  std::string out = "m,iter_time_us,total_ms,iterations\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%lld,%.3f,%.3f,%d\n", static_cast<long long>(r.m), r.iter_time_us, r.total_ms,
                  r.iterations);
    out += buf;
  }
  return out;
}

json run_verify(const json& result, const json& truth, double tol) {
  try {
    if (result.value("kind", "") != "estimate") throw ConfigError("result: not an estimate record");
    if (truth.value("kind", "") != "truth") throw ConfigError("truth: not a truth sidecar");
    const json& frame = result.at("frame");
    const Rational rate = Rational::parse(frame.at("rate").get<std::string>());
    const Rational gamma0 = Rational::parse(frame.at("gamma0").get<std::string>());
    const auto k0 = frame.at("shift_samples").get<std::int64_t>();
    const json& qj = result.at("dual_poly");
    ComplexVector q(static_cast<Eigen::Index>(qj.size()));
    for (std::size_t k = 0; k < qj.size(); ++k) {
      q[static_cast<Eigen::Index>(k)] = complex_from_json(qj[k], "dual_poly[" + std::to_string(k) + "]");
    }
    SpikeSpectrum spec = parse_spikes(truth.at("spikes"), "truth.spikes");
    const double f = rate.to_double();
    // Amplitudes as seen by the solve: shifted by k0 samples and by -gamma0.
    const double lag = static_cast<double>(k0) - gamma0.to_double();
    for (std::size_t r = 0; r < spec.s(); ++r) spec.amps[r] *= std::polar(1.0, kTwoPi * lag * spec.freqs[r] / f);
    const CertificateReport rep = verify_certificate(q, spec, f, tol);
    json out;
    out["schema"] = kSchemaVersion;
    out["kind"] = "certificate";
    out["is_certificate"] = rep.is_certificate;
    out["interp_errors"] = rep.interp_errors;
    out["strict_margin"] = rep.strict_margin;
    out["tol"] = tol;
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
}

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const InvariantViolation& e) {
    message = std::string("internal invariant violated: ") + e.what();
    return kInvariant;
  } catch (const NumericalError& e) {
    message = std::string("numerical failure: ") + e.what();
    return kNonConvergence;
  } catch (const InvalidInput& e) {
    message = e.what();
    return kUsage;
  } catch (const CapacityError& e) {
    message = std::string("too large: ") + e.what();
    return kUsage;
  } catch (const json::exception& e) {
    message = std::string("malformed JSON value: ") + e.what();
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    message = e.what();
    return kUsage;
  } catch (const std::exception& e) {
    message = std::string("internal error: ") + e.what();
    return kInvariant;
  }
}

}  // namespace spectral_sdp::cli
