#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rclab/quantum/kernel.hpp"
#include "rclab/reservoir.hpp"

namespace rclab::quantum {

enum class CouplingMode { Uniform, Random };
// Unordered sums each pair i < j once; Ordered sums i != j, doubling every bond.
enum class PairSum { Unordered, Ordered };

struct SpinObservables {
  bool sigma_x = false;
  bool zz = false;  // <sigma_z^i sigma_z^j>, i < j
};

struct SpinQrcParams {
  Index n_qubits = 4;
  double coupling = 1.0;          // J; random mode draws J_ij uniform in [-J/2, J/2]
  double field = 1.0;             // h
  CouplingMode couplings = CouplingMode::Random;
  PairSum pair_sum = PairSum::Unordered;
  std::uint64_t seed = 0;
  double dt = 10.0;               // evolution interval after each injection
  Index virtual_nodes = 4;        // V sub-intervals of dt / V
  std::vector<double> local_fields;  // optional per-site h_i, overrides `field`
  Index input_qubit = 0;
  SpinObservables observables;

  void validate() const;
  Index features_per_node() const;
};

ComplexMatrix build_ising_hamiltonian(const SpinQrcParams& p);

// |psi> = sqrt(1 - s)|0> + sqrt(s)|1>, s in [0, 1].
ComplexMatrix encode_input(double s);

struct InjectionResult {
  DensityMatrix state;
  Eigen::VectorXd features;
};

// Replaces the input qubit by the encoded input, then evolves V sub-intervals
// of dt / V, recording <sigma_z^i> for all qubits (plus the opted-in
// observables) after each.
InjectionResult inject_and_evolve(const DensityMatrix& state, double s, const ComplexMatrix& h, double dt,
                                  Index virtual_nodes, Index input_qubit = 0, SpinObservables observables = {});

// Observable vector of an N-qubit state: sigma_z per site, then sigma_x per
// site, then zz correlations for i < j in lexicographic order.
Eigen::VectorXd spin_observables(const DensityMatrix& rho, SpinObservables observables = {});

class SpinReservoir final : public Reservoir {
 public:
  explicit SpinReservoir(const SpinQrcParams& params);

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return features_; }
  Index input_width() const override { return 1; }
  Index feature_width() const override { return params_.virtual_nodes * params_.features_per_node(); }
  std::string name() const override { return "spin_qrc"; }

  const DensityMatrix& state() const { return state_; }
  void set_state(const DensityMatrix& rho);
  const ComplexMatrix& hamiltonian() const { return h_; }
  const SpinQrcParams& params() const { return params_; }

 private:
  SpinQrcParams params_;
  ComplexMatrix h_;
  ComplexMatrix sub_unitary_;
  DensityMatrix state_;
  Eigen::VectorXd features_;
};

/// Several reservoirs fed the same input; features concatenated in member order.
class SpatialMultiplexReservoir final : public Reservoir {
 public:
  explicit SpatialMultiplexReservoir(std::vector<std::unique_ptr<Reservoir>> members);

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override;
  Index input_width() const override { return members_.front()->input_width(); }
  Index feature_width() const override;
  std::string name() const override { return "spatial_multiplex"; }

 private:
  std::vector<std::unique_ptr<Reservoir>> members_;
};

// Drives each reservoir on the same input; returns steps x (sum of widths).
Eigen::MatrixXd spatial_multiplex(std::vector<SpinReservoir>& reservoirs, const TimeSeries& input);

}  // namespace rclab::quantum
