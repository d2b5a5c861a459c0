#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

using namespace spectral_sdp::cli;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> set;
  bool quiet = false;

  Overrides overrides() const {
    Overrides o;
    o.seed = seed;
    if (!out_dir.empty()) o.out_dir = fs::absolute(out_dir);
    o.set = set;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the seed (beats SPECTRAL_SDP_SEED and the config)");
  cmd->add_option("-o,--out", c.out_dir, "Output directory (overrides outputs.dir)");
  cmd->add_option("--set", c.set, "Override a config field, e.g. --set solver.rho=2")->expected(1);
  cmd->add_flag("-q,--quiet", c.quiet, "No progress on stderr");
}

void note(const Common& c, const std::string& msg) {
  if (!c.quiet) std::cerr << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-grid spectral estimation from subsampled and multirate data via reduced SDP"};
  app.set_version_flag("--version", std::string(SPECTRAL_SDP_VERSION));
  app.require_subcommand(1);

  Common synth_opts;
  auto* synth = app.add_subcommand("synth", "Synthesize uniform or per-grid samples and a truth sidecar");
  add_common(synth, synth_opts);

  Common sample_opts;
  std::string sample_input;
  auto* sample = app.add_subcommand("sample", "Apply the configured selection to uniform samples");
  add_common(sample, sample_opts);
  sample->add_option("-i,--input", sample_input, "Uniform samples CSV (default: outputs.dir/outputs.samples)");

  std::string grid_file;
  std::string grid_out;
  std::int64_t max_n0 = spectral_sdp::CommonGridLimits{}.max_n0;
  auto* check_grid = app.add_subcommand("check-grid", "Find the common supporting grid of a multirate system");
  check_grid->add_option("system", grid_file, "System JSON with \"grids\" or \"sampling.grids\"")
      ->required()
      ->check(CLI::ExistingFile);
  check_grid->add_option("--out", grid_out, "Also write the report here");
  check_grid->add_option("--max-n0", max_n0, "Largest acceptable common grid length")->check(CLI::PositiveNumber);

  Common est_opts;
  std::vector<std::string> est_inputs;
  auto* est = app.add_subcommand("estimate", "Recover frequencies and amplitudes");
  add_common(est, est_opts);
  est->add_option("-i,--input", est_inputs, "Sample CSV(s); one per grid for multirate");

  Common bench_opts;
  auto* bench = app.add_subcommand("bench", "Time full-observation solves over a range of m");
  add_common(bench, bench_opts);
  std::optional<int> jobs;
  bench->add_option("-j,--jobs", jobs, "Worker threads (overrides bench.jobs)")->check(CLI::PositiveNumber);

  std::string result_path;
  std::string truth_path;
  double tol = 1e-4;
  auto* verify = app.add_subcommand("verify", "Check the dual polynomial of a result against the truth");
  verify->add_option("--result", result_path, "result.json")->required()->check(CLI::ExistingFile);
  verify->add_option("--truth", truth_path, "truth.json")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", tol, "Interpolation tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      const ExperimentConfig cfg = load_config(synth_opts.config, synth_opts.overrides());
      const Synthesis out = synthesize(cfg);
      for (const auto& [path, content] : out.files) {
        write_atomic(path, content);
        note(synth_opts, "wrote " + path.string());
      }
      return kOk;
    }
    if (*sample) {
      const ExperimentConfig cfg = load_config(sample_opts.config, sample_opts.overrides());
      const fs::path in = !sample_input.empty()          ? fs::path(sample_input)
                          : !cfg.inputs.empty()          ? cfg.inputs.front()
                                                         : cfg.outputs.dir / cfg.outputs.samples;
      if (!fs::exists(in)) throw IoError(in.string() + ": input file not found");
      const SampleFile sel = select_samples(cfg, read_samples(in));
      const fs::path path = cfg.outputs.dir / cfg.outputs.selected;
      write_atomic(path, format_samples(sel.indices, sel.values));
      note(sample_opts, "wrote " + path.string() + " (" + std::to_string(sel.indices.size()) + " samples)");
      return kOk;
    }
    if (*check_grid) {
      const json doc = parse_json(read_file(grid_file), grid_file);
      const json report = grid_report(parse_system(doc), {max_n0});
      const std::string text = report.dump(2) + "\n";
      std::cout << text;
      if (!grid_out.empty()) write_atomic(grid_out, text);
      return kOk;
    }
    if (*est) {
      ExperimentConfig cfg = load_config(est_opts.config, est_opts.overrides());
      if (!est_inputs.empty()) {
        cfg.inputs.clear();
        for (const auto& p : est_inputs) cfg.inputs.push_back(fs::absolute(p));
      }
      const EstimateOutput out = run_estimate(cfg);
      write_atomic(cfg.outputs.dir / cfg.outputs.result, out.record.dump(2) + "\n");
      write_atomic(cfg.outputs.dir / cfg.outputs.plot, out.plot_tsv);
      write_atomic(cfg.outputs.dir / cfg.outputs.peaks, out.peaks_tsv);
      const auto& freqs = out.record["estimate"]["freqs_hz"];
      note(est_opts, "found " + std::to_string(freqs.size()) + " spikes; wrote " +
                         (cfg.outputs.dir / cfg.outputs.result).string());
      if (!out.converged) {
        std::cerr << "error: solver did not converge within "
                  << out.record["diagnostics"]["iterations"].get<int>()
                  << " iterations; the result is marked unreliable\n";
        return kNonConvergence;
      }
      return kOk;
    }
    if (*bench) {
      ExperimentConfig cfg = load_config(bench_opts.config, bench_opts.overrides());
      if (jobs) cfg.bench.jobs = *jobs;
      const std::string csv = format_bench(run_bench(cfg));
      const fs::path path = cfg.outputs.dir / cfg.outputs.bench;
      write_atomic(path, csv);
      if (!bench_opts.quiet) std::cout << csv;
      return kOk;
    }
    if (*verify) {
      const json result = parse_json(read_file(result_path), result_path);
      const json truth = parse_json(read_file(truth_path), truth_path);
      const json report = run_verify(result, truth, tol);
      std::cout << report.dump(2) << "\n";
      return report["is_certificate"].get<bool>() ? kOk : kNonConvergence;
    }
  } catch (...) {
    std::string message;
    const int code = exit_code_for_current_exception(message);
    std::cerr << "error: " << message << "\n";
    return code;
  }
  return kUsage;
}
