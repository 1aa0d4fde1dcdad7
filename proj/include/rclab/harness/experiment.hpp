#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rclab/esn.hpp"
#include "rclab/harness/config.hpp"
#include "rclab/physical/bubble.hpp"
#include "rclab/physical/whisker.hpp"
#include "rclab/pipeline.hpp"
#include "rclab/quantum/cavity.hpp"
#include "rclab/quantum/oscillator.hpp"
#include "rclab/quantum/spin.hpp"

namespace rclab::harness {

// derive_seed stream ids for the stochastic stages of a run.
inline constexpr std::uint64_t kTaskStream = 1;
inline constexpr std::uint64_t kReservoirStream = 2;
inline constexpr std::uint64_t kShotStream = 3;

struct TaskSpec {
  std::string kind = "narma";  // narma | sine_phase | memory | delayed_parity
  Index length = 2000;
  int order = 10;              // narma
  int delay = 1;               // memory, delayed_parity
  double freq = 0.05;          // sine_phase
  std::vector<double> phases{0.0, 1.5707963267948966};
  Index segment_length = 50;
  double dt = 1.0;
  // minmax: affine map of the input onto [0, 1] fitted on washout + train
  // samples (later samples are clipped). Needed by amplitude-encoded qubits.
  std::string rescale = "none";
};

TaskData make_task(const TaskSpec& spec, std::uint64_t seed);

struct SpinSpec {
  quantum::SpinQrcParams params;
  Index multiplex = 1;  // > 1: spatial multiplexing over independently seeded copies
};

struct KerrSpec {
  quantum::KerrParams params;
  bool classical = false;
};

struct BubbleClusterSpec {
  Index n_bubbles = 5;
  double r0 = 2e-6;
  double spread = 0.1;
  double extent = 300e-6;  // side of the cube the bubbles are scattered in, m
  physical::BubbleClusterParams cluster;  // drive and coupling fields; geometry is drawn per seed
  physical::BubbleParams drive;
};

using ReservoirSpec = std::variant<EsnParams, SpinSpec, KerrSpec, quantum::CoupledKerrParams, quantum::CavityQrcParams,
                                   BubbleClusterSpec, physical::WhiskerParams>;

std::string reservoir_kind(const ReservoirSpec& spec);

struct ExperimentConfig {
  ReservoirSpec reservoir;
  TaskSpec task;
  double train_fraction = 0.7;
  double test_fraction = 0.3;
  std::optional<Index> washout;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  std::optional<std::string> output_dir;
  Config resolved;  // every field with defaults expanded
};

ExperimentConfig resolve_experiment(const Config& config);

std::unique_ptr<Reservoir> make_reservoir(const ExperimentConfig& config);

// Washout | train | test, with train and test taken as fractions of the
// post-washout length.
SplitPlan experiment_split(const ExperimentConfig& config);

// The task a run sees: generated from the task stream, with the input
// rescaled when task.rescale asks for it.
TaskData experiment_task(const ExperimentConfig& config);

struct SplitMetrics {
  double nmse = 0.0;
  double rmse = 0.0;
  std::optional<double> accuracy;  // delayed_parity and sine_phase only
};

struct RunReport {
  std::string reservoir;
  std::string task;
  std::uint64_t seed = 0;
  Index feature_width = 0;
  Index steps = 0;
  SplitPlan split;
  double beta = 0.0;
  SplitMetrics train;
  SplitMetrics test;
  double wall_time_s = 0.0;
  Config resolved;
  TimeSeries train_target, test_target;
  TimeSeries train_prediction, test_prediction;
};

/// Generates the task, drives the reservoir, fits the ridge readout on the
/// train span and scores both spans. Module errors are rethrown with the
/// config origin and reservoir/task kinds prefixed, keeping their type.
RunReport run_experiment(const ExperimentConfig& config);

std::string report_header();
std::string report_row(const RunReport& report);

// report.csv, predictions.csv and config.toml (resolved) in `dir`.
void write_run(const RunReport& report, const std::filesystem::path& dir);

struct SweepSpec {
  std::string axis;            // dotted key of a numeric leaf, e.g. reservoir.kappa
  std::vector<double> values;
  std::string seed_policy = "same";  // same | offset (seed + index in sorted order)
};

// Reads the optional [sweep] table; CLI values override it when given.
SweepSpec resolve_sweep(const Config& config, std::optional<std::string> axis = {},
                        std::optional<std::vector<double>> values = {});

struct SweepResult {
  SweepSpec spec;
  std::vector<double> values;      // sorted
  std::vector<RunReport> reports;  // one per value, same order
  // cavity_qrc along reservoir.g_z is delegated to quantum::zeno_sweep.
  std::optional<std::vector<quantum::ZenoRow>> zeno;
  Config resolved;
};

SweepResult run_sweep(const Config& config, const SweepSpec& spec, unsigned threads = 1);
std::string sweep_csv(const SweepResult& result);
// sweep.csv and config.toml (template plus [sweep] table).
void write_sweep(const SweepResult& result, const std::filesystem::path& dir);

struct SpectraSpec {
  physical::BubbleParams bubble;
  std::vector<double> pressures;  // Pa
  Index cycles = 256;
  double max_order = 8.0;
  double threshold_db = -40.0;
  bool image = true;
  physical::BubbleIntegration integration;
  std::optional<std::string> output_dir;
  Config resolved;
};

// Default grid: 2.5 kPa to 500 kPa in 2.5 kPa steps (200 rows).
std::vector<double> default_pressure_grid();
SpectraSpec resolve_spectra(const Config& config);

struct SpectraResult {
  physical::SpectrumMap map;
  physical::CascadeSummary summary;
  double wall_time_s = 0.0;
  Config resolved;
  bool image = true;
  double threshold_db = -40.0;
};

SpectraResult run_spectra(const SpectraSpec& spec, unsigned threads = 1);
std::string cascade_csv(const SpectraResult& result);
// spectrum.csv, cascade.csv, config.toml and (if enabled) spectrum.pgm.
void write_spectra(const SpectraResult& result, const std::filesystem::path& dir);

enum class Command { Run, Sweep, Spectra };
// spectra when a [spectra] table is present, sweep when sweep.axis is set,
// run otherwise.
Command infer_command(const Config& config);

struct BenchEntry {
  std::string name;
  std::string text;  // config file contents
};
// The configs shipped in configs/, compiled into the library.
const std::vector<BenchEntry>& bench_suite();

struct BenchRow {
  std::string name;
  Command command;
  std::string metric;
  double value = 0.0;
  double wall_time_s = 0.0;
};

/// Runs every bench config into dir/<name>/ and writes dir/bench.csv.
std::vector<BenchRow> run_bench(const std::filesystem::path& dir, unsigned threads = 1,
                                std::optional<std::uint64_t> seed = {});

// Output directory: explicit flag, else the config's output_dir, else
// $RCLAB_OUTPUT_DIR (default ./rclab_out) joined with `name`.
std::filesystem::path output_directory(const std::optional<std::string>& flag,
                                       const std::optional<std::string>& from_config, const std::string& name);

}  // namespace rclab::harness
