#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectral_sdp/errors.hpp"
#include "spectral_sdp/grid.hpp"
#include "spectral_sdp/localization.hpp"
#include "spectral_sdp/signal_model.hpp"

namespace spectral_sdp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNonConvergence = 2,
  kInvariant = 3,
};

/// Malformed config, system or sample file. The message carries the field
/// path or line number.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class IoError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Scenario { kFull, kSelection, kRandomSelection, kMultirate };

std::string_view scenario_name(Scenario s);

struct SolverConfig {
  bool ast = false;
  std::optional<double> tau;
  std::optional<double> sigma;
  double gamma = 1.5;
  std::optional<double> rho;
  int max_iter = 20000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  bool auto_normalize = true;
  double peak_tol = 1e-3;
  Eigen::Index grid_factor = 8;
};

struct OutputConfig {
  fs::path dir = ".";
  std::string samples = "samples.csv";  // multirate: samples_<j>.csv
  std::string selected = "selected.csv";
  std::string truth = "truth.json";
  std::string result = "result.json";
  std::string plot = "plot.tsv";
  std::string peaks = "peaks.tsv";
  std::string bench = "bench.csv";
};

struct BenchConfig {
  std::vector<std::int64_t> m{50, 100, 200};
  std::size_t spikes = 3;
  int jobs = 1;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kFull;
  std::uint64_t seed = 0;
  std::string seed_source = "default";  // flag, env, config or default

  SpikeSpectrum spectrum;

  // full / selection / random-selection
  Rational f = Rational(1);
  std::int64_t n = 0;
  std::vector<std::int64_t> indices;  // selection
  double p = 0.0;                     // random-selection

  MultirateSystem system;  // multirate

  double noise_sigma = 0.0;
  SolverConfig solver;
  OutputConfig outputs;
  std::vector<fs::path> inputs;  // sample files for estimate / sample
  BenchConfig bench;

  json effective;  // config after overrides, hashed into provenance
};

/// Command-line overrides, applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_dir;
  std::vector<std::string> set;  // "a.b.c=<json or string>"
};

/// Reads and validates a config. Relative paths in the file resolve against
/// its directory. Seed precedence: flag > SPECTRAL_SDP_SEED > config > 0.
ExperimentConfig load_config(const fs::path& path, const Overrides& overrides = {});
ExperimentConfig parse_config(json doc, const fs::path& base_dir, const Overrides& overrides = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Reads a whole file; throws IoError naming the path.
std::string read_file(const fs::path& path);
/// Parses JSON, reporting line and column on failure.
json parse_json(const std::string& text, const fs::path& origin);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const fs::path& path, const std::string& content);

struct SampleFile {
  std::vector<std::int64_t> indices;
  ComplexVector values;
};

/// CSV with header "index,re,im".
std::string format_samples(const std::vector<std::int64_t>& indices, const ComplexVector& values);
SampleFile read_samples(const fs::path& path);

json complex_to_json(Complex z);
Complex complex_from_json(const json& j, const std::string& where);

/// Per-grid (multirate) or single uniform sample vectors with truth sidecar.
struct Synthesis {
  std::vector<std::pair<fs::path, std::string>> files;  // path, content
};

Synthesis synthesize(const ExperimentConfig& cfg);
json truth_sidecar(const ExperimentConfig& cfg);

/// Applies the configured selection to the uniform samples.
SampleFile select_samples(const ExperimentConfig& cfg, const SampleFile& uniform);

json grid_report(const MultirateSystem& system, const CommonGridLimits& limits);
MultirateSystem parse_system(const json& doc);

struct EstimateOutput {
  json record;
  std::string plot_tsv;
  std::string peaks_tsv;
  bool converged = true;
};

EstimateOutput run_estimate(const ExperimentConfig& cfg);

struct BenchRow {
  std::int64_t m = 0;
  double iter_time_us = 0.0;
  double total_ms = 0.0;
  int iterations = 0;
};

std::vector<BenchRow> run_bench(const ExperimentConfig& cfg);
std::string format_bench(const std::vector<BenchRow>& rows);

/// Certificate check of a result record's dual polynomial against a truth
/// sidecar, in the frame the solve ran in.
json run_verify(const json& result, const json& truth, double tol = 1e-4);

/// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::string& message);

}  // namespace spectral_sdp::cli
