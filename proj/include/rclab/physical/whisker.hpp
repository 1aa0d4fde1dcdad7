#pragma once

#include <array>
#include <memory>

#include <Eigen/Dense>

#include "rclab/reservoir.hpp"

namespace rclab::physical {

/// Tapered mass-spring chain clamped to a moving base. Spring i joins mass
/// i - 1 (the base for i = 0) to mass i with force k_i (d + cubic d^3),
/// k_i = base_stiffness taper^i. Masses taper as mass taper_mass^i and feel a
/// viscous drag damping m_i v_i. Dimensionless units.
struct WhiskerParams {
  Index n_masses = 10;
  double base_stiffness = 1.0;
  double taper = 0.8;
  double mass = 1.0;
  double mass_taper = 0.6;
  double cubic = 0.5;
  double damping = 0.1;
  double dt = 0.0125;
  Index steps_per_input = 20;         // RK4 steps per input sample
  std::array<Index, 3> probes{1, 5, 9};
  double instability_bound = 1e3;     // |x| beyond this is treated as a blow-up

  void validate() const;
  // {1, n / 2, n - 1} for a chain of n masses.
  static std::array<Index, 3> default_probes(Index n);
};

Eigen::VectorXd whisker_stiffness(const WhiskerParams& p);
Eigen::VectorXd whisker_masses(const WhiskerParams& p);
// Angular frequencies of the linearized chain (cubic = 0), ascending.
Eigen::VectorXd whisker_modal_frequencies(const WhiskerParams& p);
// Time for every mode to decay by 1e-6: ln(1e6) / (damping / 2).
double whisker_memory_horizon(const WhiskerParams& p);

// Fraction of the (mean-removed, Hann-windowed) power spectrum of a signal
// sampled every sample_dt that lies above angular frequency omega_cut.
double spectral_energy_fraction_above(const Eigen::VectorXd& signal, double sample_dt, double omega_cut);

class WhiskerReservoir final : public Reservoir {
 public:
  explicit WhiskerReservoir(const WhiskerParams& params);

  void reset() override;
  // Holds the base at displacement u[0] for steps_per_input steps.
  void step(const Eigen::VectorXd& u) override;
  // Displacement then velocity at each probe.
  Eigen::VectorXd observe() const override;
  Index input_width() const override { return 1; }
  Index feature_width() const override { return 6; }
  std::string name() const override { return "whisker"; }

  const Eigen::VectorXd& positions() const { return x_; }
  const Eigen::VectorXd& velocities() const { return v_; }
  const WhiskerParams& params() const { return params_; }

 private:
  Eigen::VectorXd acceleration(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double base) const;

  WhiskerParams params_;
  Eigen::VectorXd k_, m_;
  Eigen::VectorXd x_, v_;
};

std::unique_ptr<Reservoir> build_whisker_reservoir(const WhiskerParams& p);

}  // namespace rclab::physical
