#include "rclab/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"
#include "rclab/parallel.hpp"
#include "rclab/random.hpp"

namespace rclab::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::optional<Index> integer_or_auto(ConfigReader& r, const std::string& key) {
  const std::optional<double> v = r.number_or_auto(key);
  if (!v) return std::nullopt;
  require(std::floor(*v) == *v, r.source().origin() + ": '" + key + "' must be an integer or \"auto\"");
  return r.integer(key);
}

void ignore_table(ConfigReader& r, const Config& c, const std::string& table) {
  for (const auto& [key, v] : c.entries())
    if (key.rfind(table + ".", 0) == 0) r.ignore(key);
}

EsnParams read_esn(ConfigReader& r) {
  EsnParams p;
  p.nx = r.integer("reservoir.nx", p.nx);
  p.alpha = r.number("reservoir.alpha", p.alpha);
  p.spectral_radius = r.number("reservoir.spectral_radius", p.spectral_radius);
  p.input_scale = r.number("reservoir.input_scale", p.input_scale);
  p.density = r.number("reservoir.density", p.density);
  p.validate();
  return p;
}

SpinSpec read_spin(ConfigReader& r) {
  SpinSpec s;
  auto& p = s.params;
  p.n_qubits = r.integer("reservoir.n_qubits", p.n_qubits);
  p.coupling = r.number("reservoir.coupling", p.coupling);
  p.field = r.number("reservoir.field", p.field);
  p.couplings = r.choice("reservoir.couplings", {"random", "uniform"}, "random") == "random"
                    ? quantum::CouplingMode::Random
                    : quantum::CouplingMode::Uniform;
  p.pair_sum = r.choice("reservoir.pair_sum", {"unordered", "ordered"}, "unordered") == "unordered"
                   ? quantum::PairSum::Unordered
                   : quantum::PairSum::Ordered;
  p.dt = r.number("reservoir.dt", p.dt);
  p.virtual_nodes = r.integer("reservoir.virtual_nodes", p.virtual_nodes);
  p.local_fields = r.list("reservoir.local_fields", std::vector<double>{});
  p.input_qubit = r.integer("reservoir.input_qubit", p.input_qubit);
  p.observables.sigma_x = r.boolean("reservoir.sigma_x", false);
  p.observables.zz = r.boolean("reservoir.zz", false);
  s.multiplex = r.integer("reservoir.multiplex", 1);
  require(s.multiplex >= 1, "spin: multiplex must be >= 1");
  p.validate();
  return s;
}

void read_kerr_fields(ConfigReader& r, const std::string& prefix, quantum::KerrParams& p) {
  p.K = r.number(prefix + "K", p.K);
  p.kappa = r.number(prefix + "kappa", p.kappa);
  p.n_max = r.integer(prefix + "n_max", p.n_max);
  p.leakage_tol = r.number(prefix + "leakage_tol", p.leakage_tol);
}

KerrSpec read_kerr(ConfigReader& r) {
  KerrSpec s;
  auto& p = s.params;
  s.classical = r.choice("reservoir.model", {"quantum", "classical"}, "quantum") == "classical";
  read_kerr_fields(r, "reservoir.", p);
  p.gain = r.number("reservoir.gain", p.gain);
  p.dt = r.number("reservoir.dt", p.dt);
  p.steps_per_input = r.integer("reservoir.steps_per_input", p.steps_per_input);
  p.include_populations = r.boolean("reservoir.include_populations", p.include_populations);
  p.classical_variant = r.choice("reservoir.classical_variant", {"as_printed", "conventional"}, "as_printed") ==
                                "as_printed"
                            ? quantum::ClassicalVariant::AsPrinted
                            : quantum::ClassicalVariant::Conventional;
  p.validate();
  return s;
}

quantum::CoupledKerrParams read_coupled(ConfigReader& r) {
  quantum::CoupledKerrParams p;
  read_kerr_fields(r, "reservoir.a.", p.a);
  read_kerr_fields(r, "reservoir.b.", p.b);
  p.drive_freqs.first = r.number("reservoir.a.detuning", p.drive_freqs.first);
  p.drive_freqs.second = r.number("reservoir.b.detuning", p.drive_freqs.second);
  p.drive_amps.first = r.number("reservoir.a.drive", p.drive_amps.first);
  p.drive_amps.second = r.number("reservoir.b.drive", p.drive_amps.second);
  p.coupling = r.number("reservoir.coupling", p.coupling);
  p.dt = r.number("reservoir.dt", p.dt);
  p.steps_per_input = r.integer("reservoir.steps_per_input", p.steps_per_input);
  p.validate();
  return p;
}

quantum::CavityQrcParams read_cavity(ConfigReader& r) {
  quantum::CavityQrcParams p;
  p.g = r.number("reservoir.g", p.g);
  p.g_z = r.number("reservoir.g_z", p.g_z);
  p.kappa = r.number("reservoir.kappa", p.kappa);
  p.n_max = r.integer("reservoir.n_max", p.n_max);
  p.beta_scale = r.number("reservoir.beta_scale", p.beta_scale);
  p.dt = r.number("reservoir.dt", p.dt);
  p.steps_per_input = r.integer("reservoir.steps_per_input", p.steps_per_input);
  p.coupling = r.choice("reservoir.coupling", {"printed", "jaynes_cummings"}, "printed") == "printed"
                   ? quantum::CavityCoupling::Printed
                   : quantum::CavityCoupling::JaynesCummings;
  const std::string m = r.choice("reservoir.measurement", {"ensemble", "shots", "rewind"}, "ensemble");
  p.measurement = m == "ensemble" ? quantum::MeasurementMode::Ensemble
                  : m == "shots"  ? quantum::MeasurementMode::Shots
                                  : quantum::MeasurementMode::Rewind;
  p.shots = r.integer("reservoir.shots", p.shots);
  p.rewind_window = r.integer("reservoir.rewind_window", p.rewind_window);
  p.leakage_tol = r.number("reservoir.leakage_tol", p.leakage_tol);
  p.validate();
  return p;
}

physical::BubbleParams read_bubble(ConfigReader& r, const std::string& prefix) {
  physical::BubbleParams p;
  p.R0 = r.number(prefix + "R0", p.R0);
  p.f_drive = r.number(prefix + "f_drive", p.f_drive);
  p.density = r.number(prefix + "density", p.density);
  p.viscosity = r.number(prefix + "viscosity", p.viscosity);
  p.surface_tension = r.number(prefix + "surface_tension", p.surface_tension);
  p.ambient_pressure = r.number(prefix + "ambient_pressure", p.ambient_pressure);
  p.polytropic = r.number(prefix + "polytropic", p.polytropic);
  p.sound_speed = r.number(prefix + "sound_speed", p.sound_speed);
  p.validate();
  return p;
}

physical::BubbleIntegration read_integration(ConfigReader& r, const std::string& prefix) {
  physical::BubbleIntegration g;
  g.samples_per_cycle = r.integer(prefix + "samples_per_cycle", g.samples_per_cycle);
  g.rel_tol = r.number(prefix + "rel_tol", g.rel_tol);
  require(g.samples_per_cycle >= 64, "bubble: samples_per_cycle must be >= 64");
  require(g.rel_tol > 0.0, "bubble: rel_tol must be > 0");
  return g;
}

BubbleClusterSpec read_cluster(ConfigReader& r) {
  BubbleClusterSpec s;
  s.n_bubbles = r.integer("reservoir.n_bubbles", s.n_bubbles);
  s.r0 = r.number("reservoir.r0", s.r0);
  s.spread = r.number("reservoir.spread", s.spread);
  s.extent = r.number("reservoir.extent", s.extent);
  s.cluster.coupling = r.boolean("reservoir.coupling", s.cluster.coupling);
  s.cluster.bias_pressure = r.number("reservoir.bias_pressure", s.cluster.bias_pressure);
  s.cluster.input_gain = r.number("reservoir.input_gain", s.cluster.input_gain);
  s.cluster.cycles_per_input = r.integer("reservoir.cycles_per_input", s.cluster.cycles_per_input);
  s.drive = read_bubble(r, "reservoir.");
  require(s.n_bubbles >= 1, "bubble_cluster: n_bubbles must be >= 1");
  require(s.spread >= 0.0 && s.spread < 1.0, "bubble_cluster: spread must lie in [0, 1)");
  require(s.extent > 0.0, "bubble_cluster: extent must be > 0");
  return s;
}

physical::WhiskerParams read_whisker(ConfigReader& r) {
  physical::WhiskerParams p;
  p.n_masses = r.integer("reservoir.n_masses", p.n_masses);
  p.base_stiffness = r.number("reservoir.base_stiffness", p.base_stiffness);
  p.taper = r.number("reservoir.taper", p.taper);
  p.mass = r.number("reservoir.mass", p.mass);
  p.mass_taper = r.number("reservoir.mass_taper", p.mass_taper);
  p.cubic = r.number("reservoir.cubic", p.cubic);
  p.damping = r.number("reservoir.damping", p.damping);
  p.dt = r.number("reservoir.dt", p.dt);
  p.steps_per_input = r.integer("reservoir.steps_per_input", p.steps_per_input);
  const auto d = physical::WhiskerParams::default_probes(p.n_masses);
  const std::vector<double> probes = r.list("reservoir.probes", std::vector<double>{
                                                                    static_cast<double>(d[0]),
                                                                    static_cast<double>(d[1]),
                                                                    static_cast<double>(d[2])});
  require(probes.size() == 3, "whisker: probes must list exactly 3 indices");
  for (int j = 0; j < 3; ++j) {
    require(std::floor(probes[j]) == probes[j], "whisker: probes must be integers");
    p.probes[j] = static_cast<Index>(probes[j]);
  }
  p.instability_bound = r.number("reservoir.instability_bound", p.instability_bound);
  p.validate();
  return p;
}

TaskSpec read_task(ConfigReader& r, const std::string& reservoir) {
  TaskSpec t;
  t.kind = r.choice("task.kind", {"narma", "sine_phase", "memory", "delayed_parity"});
  const Index default_length = t.kind == "narma" ? 2000 : 1000;
  t.length = r.integer("task.length", default_length);
  if (t.kind == "narma") t.order = static_cast<int>(r.integer("task.order", t.order));
  if (t.kind == "memory" || t.kind == "delayed_parity") t.delay = static_cast<int>(r.integer("task.delay", t.delay));
  if (t.kind == "sine_phase") {
    t.freq = r.number("task.freq", t.freq);
    t.phases = r.list("task.phases", t.phases);
    t.segment_length = r.integer("task.segment_length", t.segment_length);
    t.dt = r.number("task.dt", t.dt);
  }
  t.rescale = r.choice("task.rescale", {"none", "minmax"}, reservoir == "spin_qrc" ? "minmax" : "none");
  require(t.length >= 20, "task: length must be >= 20");
  return t;
}

TimeSeries minmax_rescale(const TimeSeries& input, Index fit_steps) {
  Eigen::MatrixXd v = input.values();
  for (Index c = 0; c < v.rows(); ++c) {
    const double lo = v.row(c).head(fit_steps).minCoeff(), hi = v.row(c).head(fit_steps).maxCoeff();
    const double span = hi - lo;
    if (span > 0.0)
      v.row(c) = ((v.row(c).array() - lo) / span).cwiseMax(0.0).cwiseMin(1.0).matrix();
    else
      v.row(c).setConstant(0.5);
  }
  return TimeSeries(std::move(v), input.dt());
}

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(context + ": " + e.what());
  }
}

std::vector<double> task_labels(const TaskSpec& t) {
  if (t.kind == "delayed_parity") return {0.0, 1.0};
  if (t.kind == "sine_phase") return t.phases;
  return {};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

TaskData make_task(const TaskSpec& t, std::uint64_t seed) {
  if (t.kind == "narma") return gen_narma(t.order, t.length, seed);
  if (t.kind == "memory") return gen_memory_task(t.length, t.delay, seed);
  if (t.kind == "delayed_parity") return gen_delayed_parity_task(t.length, t.delay, seed);
  if (t.kind == "sine_phase") return gen_sine_phase_task(t.freq, t.phases, t.length, seed, t.dt, t.segment_length);
  throw ConfigError("unknown task kind '" + t.kind + "'");
}

std::string reservoir_kind(const ReservoirSpec& spec) {
  static const char* names[] = {"esn", "spin_qrc", "kerr", "coupled_kerr", "cavity_qrc", "bubble_cluster", "whisker"};
  return names[spec.index()];
}

ExperimentConfig resolve_experiment(const Config& config) {
  ConfigReader r(config);
  ExperimentConfig e;
  const std::int64_t version = r.integer("schema_version", kSchemaVersion);
  require(version == kSchemaVersion, config.origin() + ": unsupported schema_version " + std::to_string(version) +
                                         " (expected " + std::to_string(kSchemaVersion) + ")");
  e.seed = r.seed("seed", 0);
  if (config.has("output_dir")) e.output_dir = r.string("output_dir");
  const std::string kind = r.choice("reservoir.kind", {"esn", "spin_qrc", "kerr", "coupled_kerr", "cavity_qrc",
                                                       "bubble_cluster", "whisker"});
  if (kind == "esn") e.reservoir = read_esn(r);
  if (kind == "spin_qrc") e.reservoir = read_spin(r);
  if (kind == "kerr") e.reservoir = read_kerr(r);
  if (kind == "coupled_kerr") e.reservoir = read_coupled(r);
  if (kind == "cavity_qrc") e.reservoir = read_cavity(r);
  if (kind == "bubble_cluster") e.reservoir = read_cluster(r);
  if (kind == "whisker") e.reservoir = read_whisker(r);
  e.task = read_task(r, kind);
  e.train_fraction = r.number("split.train", e.train_fraction);
  e.test_fraction = r.number("split.test", e.test_fraction);
  require(e.train_fraction > 0.0 && e.test_fraction > 0.0 && e.train_fraction + e.test_fraction <= 1.0 + 1e-12,
          config.origin() + ": split fractions must be positive and sum to at most 1");
  e.washout = integer_or_auto(r, "split.washout");
  e.beta = r.number_or_auto("readout.beta");
  require(!e.beta || *e.beta >= 0.0, config.origin() + ": readout.beta must be >= 0");
  ignore_table(r, config, "sweep");
  r.finish();
  e.resolved = r.resolved();
  experiment_split(e);
  return e;
}

SplitPlan experiment_split(const ExperimentConfig& e) {
  const Index steps = e.task.length;
  SplitPlan s;
  s.washout = e.washout.value_or(default_washout(steps));
  require(s.washout >= 0 && s.washout < steps, "split: washout must lie in [0, length)");
  const auto usable = static_cast<double>(steps - s.washout);
  s.train = static_cast<Index>(std::floor(e.train_fraction * usable));
  s.test = static_cast<Index>(std::floor(e.test_fraction * usable + 1e-9));
  s.test = std::min(s.test, steps - s.washout - s.train);
  require(s.train >= 2 && s.test >= 2, "split: train and test spans need at least 2 steps each");
  return s;
}

std::unique_ptr<Reservoir> make_reservoir(const ExperimentConfig& e) {
  const std::uint64_t rs = derive_seed(e.seed, kReservoirStream);
  return std::visit(
      [&](const auto& spec) -> std::unique_ptr<Reservoir> {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, EsnParams>) {
          EsnParams p = spec;
          p.seed = rs;
          p.nu = 1;
          return std::make_unique<EsnReservoir>(p);
        } else if constexpr (std::is_same_v<T, SpinSpec>) {
          quantum::SpinQrcParams p = spec.params;
          p.seed = rs;
          if (spec.multiplex == 1) return std::make_unique<quantum::SpinReservoir>(p);
          std::vector<std::unique_ptr<Reservoir>> members;
          for (Index i = 0; i < spec.multiplex; ++i) {
            p.seed = i == 0 ? rs : derive_seed(rs, static_cast<std::uint64_t>(i));
            members.push_back(std::make_unique<quantum::SpinReservoir>(p));
          }
          return std::make_unique<quantum::SpatialMultiplexReservoir>(std::move(members));
        } else if constexpr (std::is_same_v<T, KerrSpec>) {
          if (spec.classical) return std::make_unique<quantum::ClassicalKerrReservoir>(spec.params);
          return std::make_unique<quantum::KerrReservoir>(spec.params);
        } else if constexpr (std::is_same_v<T, quantum::CoupledKerrParams>) {
          return quantum::build_coupled_pair(spec);
        } else if constexpr (std::is_same_v<T, quantum::CavityQrcParams>) {
          quantum::CavityQrcParams p = spec;
          p.seed = derive_seed(e.seed, kShotStream);
          return std::make_unique<quantum::CavityReservoir>(p);
        } else if constexpr (std::is_same_v<T, BubbleClusterSpec>) {
          physical::BubbleClusterParams c =
              physical::BubbleClusterParams::random(spec.n_bubbles, spec.r0, spec.spread, spec.extent, rs);
          c.coupling = spec.cluster.coupling;
          c.bias_pressure = spec.cluster.bias_pressure;
          c.input_gain = spec.cluster.input_gain;
          c.cycles_per_input = spec.cluster.cycles_per_input;
          return physical::build_bubble_cluster_reservoir(c, spec.drive);
        } else {
          return physical::build_whisker_reservoir(spec);
        }
      },
      e.reservoir);
}

TaskData experiment_task(const ExperimentConfig& e) {
  TaskData task = make_task(e.task, derive_seed(e.seed, kTaskStream));
  if (e.task.rescale == "minmax") {
    const SplitPlan split = experiment_split(e);
    task.input = minmax_rescale(task.input, split.washout + split.train);
  }
  return task;
}

RunReport run_experiment(const ExperimentConfig& e) {
  const auto t0 = Clock::now();
  const std::string kind = reservoir_kind(e.reservoir);
  const std::string context = e.resolved.origin() + " [reservoir=" + kind + ", task=" + e.task.kind + "]";
  return with_context(context, [&] {
    const TaskData task = experiment_task(e);
    const SplitPlan split = experiment_split(e);
    const TimeSeries& input = task.input;
    std::unique_ptr<Reservoir> res = make_reservoir(e);
    const Eigen::MatrixXd features = drive(*res, input);
    if (!features.allFinite()) throw NumericError("reservoir produced non-finite features");
    Evaluation ev = fit_readout(input, features, task.target, split, e.beta);

    RunReport rep;
    rep.reservoir = kind;
    rep.task = e.task.kind;
    rep.seed = e.seed;
    rep.feature_width = res->feature_width();
    rep.steps = input.steps();
    rep.split = split;
    rep.beta = ev.beta;
    rep.train_target = task.target.slice(split.washout, split.train);
    rep.test_target = task.target.slice(split.washout + split.train, split.test);
    rep.train = {ev.train_nmse, rmse(ev.train_prediction, rep.train_target).value, std::nullopt};
    rep.test = {ev.test_nmse, rmse(ev.test_prediction, rep.test_target).value, std::nullopt};
    if (const auto labels = task_labels(e.task); !labels.empty()) {
      rep.train.accuracy = classification_accuracy(ev.train_prediction, rep.train_target, labels).value;
      rep.test.accuracy = classification_accuracy(ev.test_prediction, rep.test_target, labels).value;
    }
    if (!std::isfinite(rep.train.nmse) || !std::isfinite(rep.test.nmse))
      throw NumericError("readout produced non-finite errors");
    rep.train_prediction = std::move(ev.train_prediction);
    rep.test_prediction = std::move(ev.test_prediction);
    rep.resolved = e.resolved;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  });
}

std::string report_header() {
  return "reservoir,task,seed,feature_width,steps,washout,train_steps,test_steps,beta,train_nmse,test_nmse,"
         "train_rmse,test_rmse,train_accuracy,test_accuracy,wall_time_s";
}

std::string report_row(const RunReport& r) {
  std::ostringstream os;
  os << r.reservoir << ',' << r.task << ',' << r.seed << ',' << r.feature_width << ',' << r.steps << ','
     << r.split.washout << ',' << r.split.train << ',' << r.split.test << ',' << format_double(r.beta) << ','
     << format_double(r.train.nmse) << ',' << format_double(r.test.nmse) << ',' << format_double(r.train.rmse) << ','
     << format_double(r.test.rmse) << ',' << opt_number(r.train.accuracy) << ',' << opt_number(r.test.accuracy)
     << ',' << format_double(r.wall_time_s);
  return os.str();
}

void write_run(const RunReport& r, const std::filesystem::path& dir) {
  make_dir(dir);
  write_file(dir / "report.csv", report_header() + "\n" + report_row(r) + "\n");
  std::ostringstream p;
  const Index ny = r.train_target.channels();
  p << "step,split";
  for (Index c = 0; c < ny; ++c) p << (ny == 1 ? ",target" : ",target_" + std::to_string(c));
  for (Index c = 0; c < ny; ++c) p << (ny == 1 ? ",prediction" : ",prediction_" + std::to_string(c));
  p << '\n';
  auto rows = [&](const TimeSeries& y, const TimeSeries& yhat, Index first, const char* name) {
    for (Index n = 0; n < y.steps(); ++n) {
      p << first + n << ',' << name;
      for (Index c = 0; c < ny; ++c) p << ',' << format_double(y.values()(c, n));
      for (Index c = 0; c < ny; ++c) p << ',' << format_double(yhat.values()(c, n));
      p << '\n';
    }
  };
  rows(r.train_target, r.train_prediction, r.split.washout, "train");
  rows(r.test_target, r.test_prediction, r.split.washout + r.split.train, "test");
  write_file(dir / "predictions.csv", p.str());
  write_file(dir / "config.toml", r.resolved.serialize());
}

// ---------------------------------------------------------------------------

SweepSpec resolve_sweep(const Config& config, std::optional<std::string> axis,
                        std::optional<std::vector<double>> values) {
  SweepSpec s;
  auto get = [&](const std::string& key) { return config.find(key); };
  if (axis) {
    s.axis = *axis;
  } else if (const Value* v = get("sweep.axis"); v && std::holds_alternative<std::string>(*v)) {
    s.axis = std::get<std::string>(*v);
  }
  if (values) {
    s.values = *values;
  } else if (const Value* v = get("sweep.values"); v && std::holds_alternative<std::vector<double>>(*v)) {
    s.values = std::get<std::vector<double>>(*v);
  }
  if (const Value* v = get("sweep.seed_policy")) {
    require(std::holds_alternative<std::string>(*v), config.origin() + ": sweep.seed_policy must be a string");
    s.seed_policy = std::get<std::string>(*v);
  }
  for (const auto& [key, v] : config.entries())
    if (key.rfind("sweep.", 0) == 0)
      require(key == "sweep.axis" || key == "sweep.values" || key == "sweep.seed_policy",
              config.origin() + ": unknown key(s): " + key);
  require(!s.axis.empty(), config.origin() + ": sweep needs an axis (--axis or sweep.axis)");
  require(!s.values.empty(), config.origin() + ": sweep needs at least one value (--values or sweep.values)");
  require(s.seed_policy == "same" || s.seed_policy == "offset",
          config.origin() + ": sweep.seed_policy must be \"same\" or \"offset\"");
  for (double v : s.values) require(std::isfinite(v), config.origin() + ": sweep values must be finite");
  return s;
}

SweepResult run_sweep(const Config& config, const SweepSpec& spec, unsigned threads) {
  Config base = config;
  for (const auto& key : {"sweep.axis", "sweep.values", "sweep.seed_policy"}) base.erase(key);
  const ExperimentConfig templ = resolve_experiment(base);
  const Value* leaf = templ.resolved.find(spec.axis);
  require(leaf && (std::holds_alternative<double>(*leaf) || std::holds_alternative<std::int64_t>(*leaf)),
          config.origin() + ": sweep axis '" + spec.axis + "' does not resolve to a numeric parameter");
  const bool integral = std::holds_alternative<std::int64_t>(*leaf);

  SweepResult out;
  out.spec = spec;
  out.values = spec.values;
  std::stable_sort(out.values.begin(), out.values.end());
  if (integral)
    for (double v : out.values)
      require(std::floor(v) == v, config.origin() + ": sweep axis '" + spec.axis + "' takes integer values");
  out.resolved = templ.resolved;
  out.resolved.set("sweep.axis", spec.axis);
  out.resolved.set("sweep.values", out.values);
  out.resolved.set("sweep.seed_policy", spec.seed_policy);

  const auto* cavity = std::get_if<quantum::CavityQrcParams>(&templ.reservoir);
  if (cavity && spec.axis == "reservoir.g_z" && out.values.size() >= 2 && spec.seed_policy == "same" &&
      !templ.beta && templ.task.rescale == "none") {
    const std::string context = config.origin() + " [reservoir=cavity_qrc, task=" + templ.task.kind + "]";
    out.zeno = with_context(context, [&] {
      quantum::CavityQrcParams p = *cavity;
      p.seed = derive_seed(templ.seed, kShotStream);
      const TaskData task = make_task(templ.task, derive_seed(templ.seed, kTaskStream));
      return quantum::zeno_sweep(p, out.values, task, experiment_split(templ), threads);
    });
    return out;
  }

  std::vector<ExperimentConfig> points;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    Config c = base;
    if (integral)
      c.set(spec.axis, static_cast<std::int64_t>(out.values[i]));
    else
      c.set(spec.axis, out.values[i]);
    if (spec.seed_policy == "offset") c.set("seed", static_cast<std::int64_t>(templ.seed + i));
    points.push_back(resolve_experiment(c));
  }
  out.reports.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) { out.reports[i] = run_experiment(points[i]); });
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  if (r.zeno) {
    quantum::write_zeno_csv(os, *r.zeno);
    return os.str();
  }
  os << "value," << report_header() << '\n';
  for (std::size_t i = 0; i < r.reports.size(); ++i)
    os << format_double(r.values[i]) << ',' << report_row(r.reports[i]) << '\n';
  return os.str();
}

void write_sweep(const SweepResult& r, const std::filesystem::path& dir) {
  make_dir(dir);
  write_file(dir / "sweep.csv", sweep_csv(r));
  write_file(dir / "config.toml", r.resolved.serialize());
}

// ---------------------------------------------------------------------------

std::vector<double> default_pressure_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 200; ++i) g.push_back(2500.0 * i);
  return g;
}

SpectraSpec resolve_spectra(const Config& config) {
  ConfigReader r(config);
  SpectraSpec s;
  const std::int64_t version = r.integer("schema_version", kSchemaVersion);
  require(version == kSchemaVersion, config.origin() + ": unsupported schema_version " + std::to_string(version));
  if (config.has("output_dir")) s.output_dir = r.string("output_dir");
  r.ignore("seed");  // spectra are deterministic
  s.bubble = read_bubble(r, "bubble.");
  s.integration = read_integration(r, "bubble.");
  if (config.has("spectra.pressures")) {
    s.pressures = r.list("spectra.pressures");
  } else {
    const double lo = r.number("spectra.pressure_min", 2500.0), hi = r.number("spectra.pressure_max", 500e3);
    const std::int64_t n = r.integer("spectra.points", 200);
    require(n >= 2 && hi > lo && lo >= 0.0, config.origin() + ": spectra grid needs points >= 2 and max > min >= 0");
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::int64_t i = 0; i < n; ++i) s.pressures.push_back(i + 1 == n ? hi : lo + step * static_cast<double>(i));
  }
  require(s.pressures.size() >= 2, config.origin() + ": spectra needs at least two pressures");
  s.cycles = r.integer("spectra.cycles", s.cycles);
  s.max_order = r.number("spectra.max_order", s.max_order);
  s.threshold_db = r.number("spectra.threshold_db", s.threshold_db);
  s.image = r.boolean("spectra.image", s.image);
  r.finish();
  s.resolved = r.resolved();
  return s;
}

SpectraResult run_spectra(const SpectraSpec& s, unsigned threads) {
  const auto t0 = Clock::now();
  physical::SpectrumOptions opts;
  opts.max_order = s.max_order;
  opts.integration = s.integration;
  opts.threads = threads;
  SpectraResult out;
  out.map = with_context(s.resolved.origin() + " [spectra]",
                         [&] { return physical::bubble_spectrum_map(s.bubble, s.pressures, s.cycles, opts); });
  out.summary = physical::summarize_cascade(out.map, s.threshold_db);
  out.wall_time_s = seconds_since(t0);
  out.resolved = s.resolved;
  out.image = s.image;
  out.threshold_db = s.threshold_db;
  return out;
}

std::string cascade_csv(const SpectraResult& r) {
  const auto& s = r.summary;
  auto kpa = [&](Index row) {
    return row < 0 ? std::string() : format_double(r.map.pressures[static_cast<std::size_t>(row)] / 1e3);
  };
  std::ostringstream os;
  os << "ordered,onset_pressure_kPa,first_subharmonic_kPa,first_comb_kPa,onset_stable,rows,threshold_db,"
        "wall_time_s\n";
  os << (s.ordered ? "true" : "false") << ',' << (s.onset_pressure > 0 ? format_double(s.onset_pressure / 1e3) : "")
     << ',' << kpa(s.first_subharmonic) << ',' << kpa(s.first_comb) << ',' << (s.onset_stable ? "true" : "false")
     << ',' << r.map.db.rows() << ',' << format_double(r.threshold_db) << ',' << format_double(r.wall_time_s) << '\n';
  return os.str();
}

void write_spectra(const SpectraResult& r, const std::filesystem::path& dir) {
  make_dir(dir);
  std::ostringstream csv;
  r.map.write_csv(csv);
  write_file(dir / "spectrum.csv", csv.str());
  write_file(dir / "cascade.csv", cascade_csv(r));
  if (r.image) {
    std::ostringstream img;
    r.map.write_pgm(img);
    write_file(dir / "spectrum.pgm", img.str());
  }
  write_file(dir / "config.toml", r.resolved.serialize());
}

// ---------------------------------------------------------------------------

Command infer_command(const Config& config) {
  if (config.has_table("spectra")) return Command::Spectra;
  if (config.has("sweep.axis")) return Command::Sweep;
  return Command::Run;
}

std::vector<BenchRow> run_bench(const std::filesystem::path& dir, unsigned threads,
                                std::optional<std::uint64_t> seed) {
  make_dir(dir);
  std::vector<BenchRow> rows;
  for (const BenchEntry& entry : bench_suite()) {
    Config c = Config::parse(entry.text, "configs/" + entry.name + ".toml");
    const Command cmd = infer_command(c);
    if (seed && cmd != Command::Spectra) c.set("seed", static_cast<std::int64_t>(*seed));
    const std::filesystem::path out = dir / entry.name;
    if (cmd == Command::Run) {
      const RunReport rep = run_experiment(resolve_experiment(c));
      write_run(rep, out);
      rows.push_back({entry.name, cmd, "test_nmse", rep.test.nmse, rep.wall_time_s});
      if (rep.test.accuracy) rows.push_back({entry.name, cmd, "test_accuracy", *rep.test.accuracy, 0.0});
    } else if (cmd == Command::Sweep) {
      const auto t0 = Clock::now();
      const SweepResult res = run_sweep(c, resolve_sweep(c), threads);
      write_sweep(res, out);
      const double wall = seconds_since(t0);
      for (std::size_t i = 0; i < res.values.size(); ++i) {
        const double nm = res.zeno ? (*res.zeno)[i].test_nmse : res.reports[i].test.nmse;
        rows.push_back({entry.name, cmd, "test_nmse@" + format_double(res.values[i]), nm, i == 0 ? wall : 0.0});
      }
    } else {
      const SpectraResult res = run_spectra(resolve_spectra(c), threads);
      write_spectra(res, out);
      rows.push_back({entry.name, cmd, "cascade_ordered", res.summary.ordered ? 1.0 : 0.0, res.wall_time_s});
      rows.push_back({entry.name, cmd, "onset_pressure_kPa", res.summary.onset_pressure / 1e3, 0.0});
    }
  }
  std::ostringstream os;
  os << "name,command,metric,value,wall_time_s\n";
  static const char* names[] = {"run", "sweep", "spectra"};
  for (const auto& r : rows)
    os << r.name << ',' << names[static_cast<int>(r.command)] << ',' << r.metric << ',' << format_double(r.value)
       << ',' << format_double(r.wall_time_s) << '\n';
  write_file(dir / "bench.csv", os.str());
  return rows;
}

std::filesystem::path output_directory(const std::optional<std::string>& flag,
                                       const std::optional<std::string>& from_config, const std::string& name) {
  if (flag && !flag->empty()) return *flag;
  if (from_config && !from_config->empty()) return *from_config;
  const char* env = std::getenv("RCLAB_OUTPUT_DIR");
  const std::filesystem::path root = (env && *env) ? env : "rclab_out";
  return root / name;
}

}  // namespace rclab::harness
