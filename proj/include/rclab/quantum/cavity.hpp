#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "rclab/pipeline.hpp"
#include "rclab/quantum/kernel.hpp"
#include "rclab/random.hpp"
#include "rclab/reservoir.hpp"

namespace rclab::quantum {

// Printed: g a^+a sigma_- sigma_+ (= g n |g><g|). JaynesCummings: g(a sigma_+ + a^+ sigma_-).
enum class CavityCoupling { Printed, JaynesCummings };

// Ensemble: exact P(n, sigma). Shots: empirical frequencies of M projective
// samples. Rewind: each step restarts from the initial state and replays the
// last `rewind_window` inputs.
enum class MeasurementMode { Ensemble, Shots, Rewind };

struct CavityQrcParams {
  double g = 1.0;
  double g_z = 0.3;
  double kappa = 1.0;
  Index n_max = 20;  // highest photon number kept; Hilbert dim 2 (n_max + 1)
  double beta_scale = 1.0;
  double dt = 0.02;
  Index steps_per_input = 50;
  CavityCoupling coupling = CavityCoupling::Printed;
  MeasurementMode measurement = MeasurementMode::Ensemble;
  Index shots = 1000;
  Index rewind_window = 10;
  std::uint64_t seed = 0;  // shot-noise stream
  double leakage_tol = 1e-6;

  void validate() const;
  Index dim() const { return 2 * (n_max + 1); }
};

// Space ordering cavity (x) atom, basis index 2 n + sigma with sigma = 0 for
// |g> and 1 for |e>.
ComplexMatrix build_cavity_hamiltonian(const CavityQrcParams& p, double beta);

struct CavityStepResult {
  DensityMatrix rho;
  Eigen::VectorXd features;  // P(n, sigma) at index 2 n + sigma
};

// Holds beta = beta_scale u for steps_per_input RK4 steps of the master
// equation with C = sqrt(kappa) a, then emits the exact populations.
CavityStepResult cavity_step(const DensityMatrix& rho, double u, const CavityQrcParams& p);

// Multinomial sample of `shots` outcomes from `probabilities`, returned as
// frequencies.
Eigen::VectorXd sample_frequencies(const Eigen::VectorXd& probabilities, Index shots, Xoshiro256& rng);

class CavityReservoir final : public Reservoir {
 public:
  explicit CavityReservoir(const CavityQrcParams& params);

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return features_; }
  Index input_width() const override { return 1; }
  Index feature_width() const override { return params_.dim(); }
  std::string name() const override { return "cavity_qrc"; }

  const DensityMatrix& state() const { return rho_; }
  void set_state(const DensityMatrix& rho);
  const CavityQrcParams& params() const { return params_; }

 private:
  DensityMatrix initial_state() const;
  void advance(DensityMatrix& rho, double u);

  CavityQrcParams params_;
  ComplexMatrix h_static_;
  ComplexMatrix h_drive_;  // d H / d beta
  LindbladIntegrator lindblad_;
  DensityMatrix rho_;
  Eigen::VectorXd features_;
  Xoshiro256 rng_;
  std::deque<double> history_;
};

struct ZenoRow {
  double g_z = 0.0;
  double train_nmse = 0.0;
  double test_nmse = 0.0;
  std::uint64_t seed = 0;
};

// One trained readout per g_z value on the same task; rows in input order.
std::vector<ZenoRow> zeno_sweep(const CavityQrcParams& p, const std::vector<double>& g_z_values,
                                const TaskData& task, const SplitPlan& split, unsigned threads = 1);

void write_zeno_csv(std::ostream& os, const std::vector<ZenoRow>& rows);

}  // namespace rclab::quantum
