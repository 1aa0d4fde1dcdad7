#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rclab/reservoir.hpp"
#include "rclab/timeseries.hpp"

namespace rclab::physical {

/// Gas bubble in a liquid (SI units). Defaults: air in water, R0 = 2 um, driven
/// near twice its linear resonance.
struct BubbleParams {
  double R0 = 2e-6;
  double f_drive = 4.0e6;
  double density = 998.0;
  double viscosity = 1.0e-3;
  double surface_tension = 0.0725;
  double ambient_pressure = 101325.0;
  double polytropic = 1.4;
  double sound_speed = 1481.0;

  void validate() const;
};

// Millimetre air bubble (R0 = 1 mm) driven at twice its ~3.3 kHz resonance.
BubbleParams macro_bubble_preset();

// Reference values of the nonlinearity parameter B/A.
struct AcousticMedium {
  std::string name;
  double beta_BA;
};
inline const AcousticMedium kWater{"water", 3.5};
inline const AcousticMedium kAir{"air", 0.7};
inline const AcousticMedium kBubblyWater{"bubbly water", 5000.0};

struct RadialState {
  double R;
  double Rdot;
};

// Keller-Miksis radial acceleration under far-field pressure
// p_inf(t) = p0 + p_a(t) + p_extra, with d p_a / dt = p_a_dot.
double keller_miksis_acceleration(const BubbleParams& p, const RadialState& s, double p_a, double p_a_dot);

// Coefficients of the linearized equation m r'' + b r' + k r = forcing.
struct LinearizedBubble {
  double m, b, k;
  double natural_frequency() const;  // sqrt(k/m) / 2pi, Hz
};
LinearizedBubble linearize(const BubbleParams& p);
// |r| / P for steady drive p_a = P sin(2 pi f t), including the compressible
// forcing term.
double linear_response_magnitude(const BubbleParams& p, double f);

struct BubbleIntegration {
  Index samples_per_cycle = 64;
  double rel_tol = 1e-9;      // step-doubling error tolerance on R / R0
  Index min_substeps = 8;     // RK4 steps per sample before refinement
  Index max_halvings = 16;
};

/// R(t) and Rdot(t) under p_a(t) = -P sin(2 pi f t), starting at rest at R0.
/// Rows: R, Rdot, R''; samples_per_cycle samples per drive cycle.
TimeSeries bubble_radius_trajectory(const BubbleParams& p, double peak_pressure, Index cycles,
                                    const BubbleIntegration& integ = {});

// Scattered-pressure proxy d^2V/dt^2 = 4 pi (2 R Rdot^2 + R^2 R'').
Eigen::VectorXd volume_acceleration(const TimeSeries& trajectory);

enum class SpectrumClass { HarmonicsOnly, Subharmonic, Comb, Other };
std::string to_string(SpectrumClass c);

struct SpectrumMap {
  std::vector<double> pressures;  // Pa
  Eigen::VectorXd bins;           // f / f_a
  Eigen::MatrixXd db;             // pressures x bins, each row's maximum at 0 dB
  Index bins_per_harmonic = 0;

  // Peak level (dB) in a +-1 bin window around f/f_a = q.
  double level_at(Index row, double q) const;
  // Half-integer orders q = 0.5, 1.5, ... below max_order with level > threshold.
  std::vector<double> half_integer_peaks(Index row, double threshold_db = -40.0, double max_order = 8.0) const;
  SpectrumClass classify(Index row, double threshold_db = -40.0) const;

  void write_csv(std::ostream& os) const;
  // Binary grayscale PGM (P5), one pixel row per pressure, dB clipped to [floor, 0].
  void write_pgm(std::ostream& os, double floor_db = -80.0) const;
};

struct SpectrumOptions {
  double max_order = 8.0;      // highest f/f_a kept in the map
  BubbleIntegration integration;
  unsigned threads = 1;
};

/// One row per pressure: discard the first half of the run, Hann-window the
/// volume acceleration, FFT, and express |X| in dB of the row maximum.
SpectrumMap bubble_spectrum_map(const BubbleParams& p, const std::vector<double>& pressures, Index cycles,
                                const SpectrumOptions& opts = {});

// Spectrum row (dB re max) of a uniformly sampled signal with an integer
// number of drive cycles; bin k is f/f_a = k / cycles.
Eigen::VectorXd spectrum_db(const Eigen::VectorXd& signal, Index cycles, Index max_bin);

// Rows below the onset are all harmonics-only, no harmonics-only row follows
// it, and the first Subharmonic row precedes the first Comb row.
struct CascadeSummary {
  bool ordered = false;
  Index first_subharmonic = -1;       // first row with both 1/2 and 3/2 above threshold
  Index first_comb = -1;
  double onset_pressure = 0.0;        // Pa, first row with f/2 above threshold
  bool onset_stable = false;          // f/2 stays above threshold for the next two rows
};
CascadeSummary summarize_cascade(const SpectrumMap& map, double threshold_db = -40.0);

// ---------------------------------------------------------------------------

struct BubbleClusterParams {
  std::vector<double> radii;                  // R0 per bubble
  std::vector<std::array<double, 3>> positions;  // m
  bool coupling = true;
  double bias_pressure = 60e3;                // Pa, drive amplitude at u = 0
  double input_gain = 60e3;                   // Pa per unit input
  Index cycles_per_input = 2;

  void validate() const;
  // n bubbles with radii R0 (1 +- spread) scattered in a cube of side `extent`,
  // rejecting overlapping draws.
  static BubbleClusterParams random(Index n, double r0, double spread, double extent, std::uint64_t seed);
};

/// Coupled Keller-Miksis bubbles; each sees the others' radiated pressure
/// rho (R_j^2 R_j'' + 2 R_j Rdot_j^2) / d_ij. Input u sets the drive amplitude
/// bias + gain u for cycles_per_input cycles; features per bubble are
/// (R - R0) / R0 and Rdot / (R0 omega).
class BubbleClusterReservoir final : public Reservoir {
 public:
  BubbleClusterReservoir(BubbleClusterParams cluster, BubbleParams drive, BubbleIntegration integ = {});

  void reset() override;
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override;
  Index input_width() const override { return 1; }
  Index feature_width() const override { return 2 * static_cast<Index>(cluster_.radii.size()); }
  std::string name() const override { return "bubble_cluster"; }

  // Accelerations of all bubbles for the given state and drive.
  Eigen::VectorXd accelerations(const Eigen::VectorXd& r, const Eigen::VectorXd& rdot, double p_a,
                                double p_a_dot) const;
  const Eigen::VectorXd& radius() const { return r_; }
  const Eigen::VectorXd& velocity() const { return rdot_; }

 private:
  BubbleClusterParams cluster_;
  BubbleParams drive_;
  BubbleIntegration integ_;
  Eigen::MatrixXd inv_distance_;
  Eigen::VectorXd r_, rdot_;
  double t_ = 0.0;
};

std::unique_ptr<Reservoir> build_bubble_cluster_reservoir(const BubbleClusterParams& p, const BubbleParams& drive);

}  // namespace rclab::physical
