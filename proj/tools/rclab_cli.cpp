#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"
#include "rclab/harness/experiment.hpp"

using namespace rclab;
using namespace rclab::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_seed = true) {
  if (with_seed) cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Output directory (default: $RCLAB_OUTPUT_DIR/<name>, else ./rclab_out/<name>)");
  cmd->add_option("--threads", f.threads, "Worker threads for sweeps and spectrum rows")
      ->check(CLI::Range(1u, 1024u));
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    require(b != std::string::npos, "--values: empty entry in '" + text + "'");
    out.push_back(parse_double(item.substr(b, e - b + 1)));
  }
  require(!out.empty(), "--values: no values given");
  return out;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

Config load_with_seed(const std::string& path, const CommonFlags& f) {
  Config c = Config::load(path);
  if (f.seed) c.set("seed", static_cast<std::int64_t>(*f.seed));
  return c;
}

int cmd_run(const std::string& path, const CommonFlags& f) {
  const ExperimentConfig e = resolve_experiment(load_with_seed(path, f));
  const RunReport r = run_experiment(e);
  const auto dir = output_directory(f.out, e.output_dir, stem(path));
  write_run(r, dir);
  std::cout << report_header() << '\n' << report_row(r) << '\n' << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_sweep(const std::string& path, const std::optional<std::string>& axis,
              const std::optional<std::string>& values, const CommonFlags& f) {
  const Config c = load_with_seed(path, f);
  std::optional<std::vector<double>> v;
  if (values) v = parse_values(*values);
  const SweepSpec spec = resolve_sweep(c, axis, v);
  const SweepResult r = run_sweep(c, spec, f.threads);
  std::optional<std::string> from_config;
  if (const Value* o = c.find("output_dir"); o && std::holds_alternative<std::string>(*o))
    from_config = std::get<std::string>(*o);
  const auto dir = output_directory(f.out, from_config, stem(path) + "_sweep");
  write_sweep(r, dir);
  std::cout << sweep_csv(r) << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_spectra(const std::string& path, const CommonFlags& f) {
  const SpectraSpec s = resolve_spectra(Config::load(path));
  const SpectraResult r = run_spectra(s, f.threads);
  const auto dir = output_directory(f.out, s.output_dir, stem(path));
  write_spectra(r, dir);
  std::cout << cascade_csv(r) << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_bench(const CommonFlags& f) {
  const auto dir = output_directory(f.out, std::nullopt, "bench");
  const auto rows = run_bench(dir, f.threads, f.seed);
  for (const auto& r : rows)
    std::cout << r.name << ' ' << r.metric << " = " << format_double(r.value) << '\n';
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rclab: reservoir-computing experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, spectra_flags, bench_flags;
  std::string run_cfg, sweep_cfg, spectra_cfg;
  std::optional<std::string> axis, values;

  auto* run = app.add_subcommand("run", "Train and evaluate one config");
  run->add_option("config", run_cfg, "Config file")->required();
  add_common(run, run_flags);

  auto* sweep = app.add_subcommand("sweep", "Run a config once per value of one parameter");
  sweep->add_option("config", sweep_cfg, "Config file")->required();
  sweep->add_option("--axis", axis, "Dotted parameter path, e.g. reservoir.kappa (default: sweep.axis)");
  sweep->add_option("--values", values, "Comma-separated values (default: sweep.values)");
  add_common(sweep, sweep_flags);

  auto* spectra = app.add_subcommand("spectra", "Bubble spectrum map over a pressure grid");
  spectra->add_option("config", spectra_cfg, "Config file")->required();
  add_common(spectra, spectra_flags, false);

  auto* bench = app.add_subcommand("bench", "Run every shipped config");
  add_common(bench, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_cfg, run_flags);
    if (*sweep) return cmd_sweep(sweep_cfg, axis, values, sweep_flags);
    if (*spectra) return cmd_spectra(spectra_cfg, spectra_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
