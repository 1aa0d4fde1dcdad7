#pragma once

#include <memory>
#include <utility>

#include "rclab/quantum/kernel.hpp"
#include "rclab/reservoir.hpp"

namespace rclab::quantum {

// as_printed: da/dt = -iK(a - 2a*) - kappa/2 a - i gain u
// conventional: da/dt = -iK|a|^2 a - kappa/2 a - i gain u
enum class ClassicalVariant { AsPrinted, Conventional };

struct KerrParams {
  double K = 0.05;
  double kappa = 0.2;
  double gain = 0.1;            // input coupling
  Index n_max = 20;             // Fock cutoff: number of retained levels |0>..|n_max-1>
  double dt = 0.02;             // integration step
  Index steps_per_input = 500;  // integration steps each input sample is held for
  bool include_populations = false;
  double leakage_tol = 1e-6;   // bound on the top-level population
  ClassicalVariant classical_variant = ClassicalVariant::AsPrinted;

  void validate() const;
};

struct ClassicalOscState {
  Complex a{0.0, 0.0};
};

ClassicalOscState classical_kerr_step(const ClassicalOscState& state, double u, const KerrParams& p);
Eigen::Vector3d classical_observe(const ClassicalOscState& state);  // (Re a, Im a, |a|^2)

ComplexMatrix kerr_hamiltonian(const KerrParams& p, double u);

struct KerrStepResult {
  DensityMatrix rho;
  Eigen::VectorXd features;
};

// One Lindblad step of length p.dt with H = K n^2 + gain u (a + a^+), C = sqrt(kappa) a.
// Features: <X>, <P>, <n>, then P(0..n_max-1) when include_populations is set.
KerrStepResult quantum_kerr_step(const DensityMatrix& rho, double u, const KerrParams& p);

Eigen::VectorXd kerr_features(const DensityMatrix& rho, bool include_populations);

// Throws NumericError when the top Fock level of a bosonic factor holds more
// than tol. `modes` lists the factors to check; empty means all of them.
void check_leakage(const DensityMatrix& rho, double tol, const std::vector<Index>& modes = {});

class ClassicalKerrReservoir final : public Reservoir {
 public:
  explicit ClassicalKerrReservoir(const KerrParams& params);

  void reset() override { state_ = {}; }
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return classical_observe(state_); }
  Index input_width() const override { return 1; }
  Index feature_width() const override { return 3; }
  std::string name() const override { return "classical_kerr"; }

  const ClassicalOscState& state() const { return state_; }
  void set_state(const ClassicalOscState& s) { state_ = s; }

 private:
  KerrParams params_;
  ClassicalOscState state_;
};

class KerrReservoir final : public Reservoir {
 public:
  explicit KerrReservoir(const KerrParams& params);

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return kerr_features(rho_, params_.include_populations); }
  Index input_width() const override { return 1; }
  Index feature_width() const override { return 3 + (params_.include_populations ? params_.n_max : 0); }
  std::string name() const override { return "kerr_qrc"; }

  const DensityMatrix& state() const { return rho_; }
  void set_state(const DensityMatrix& rho);
  const KerrParams& params() const { return params_; }

 private:
  KerrParams params_;
  ComplexMatrix h_kerr_;
  ComplexMatrix h_drive_;
  LindbladIntegrator lindblad_;
  DensityMatrix rho_;
};

struct CoupledKerrParams {
  KerrParams a;
  KerrParams b;
  double coupling = 0.5;                       // g (a^+ b + a b^+)
  std::pair<double, double> drive_freqs{0.0, 0.0};  // rotating-frame detunings
  std::pair<double, double> drive_amps{0.1, 0.1};   // epsilon_a, epsilon_b
  double dt = 0.02;
  Index steps_per_input = 25;

  CoupledKerrParams();
  void validate() const;
};

ComplexMatrix coupled_pair_hamiltonian(const CoupledKerrParams& p, double u);

/// Two coupled Kerr modes; the feature vector is the joint Fock population
/// grid P(n_a, n_b), row-major in n_a.
class CoupledKerrReservoir final : public Reservoir {
 public:
  explicit CoupledKerrReservoir(const CoupledKerrParams& params);

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return rho_.populations(); }
  Index input_width() const override { return 1; }
  Index feature_width() const override { return params_.a.n_max * params_.b.n_max; }
  std::string name() const override { return "coupled_kerr_qrc"; }

  // Advances the current state by `duration` with a fixed input, without
  // re-injecting anything.
  void evolve(double u, double duration);

  const DensityMatrix& state() const { return rho_; }
  void set_state(const DensityMatrix& rho);
  const CoupledKerrParams& params() const { return params_; }

 private:
  CoupledKerrParams params_;
  ComplexMatrix h_static_;
  ComplexMatrix h_drive_;
  LindbladIntegrator lindblad_;
  DensityMatrix rho_;
};

std::unique_ptr<Reservoir> build_coupled_pair(const CoupledKerrParams& p);

}  // namespace rclab::quantum
