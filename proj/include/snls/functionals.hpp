#pragma once

// Scalar functionals of fields and trajectories.  Spatial integrals use the
// normalized measure on the torus (so Parseval reads int |u|^2 = sum |u^(n)|^2).

#include <span>
#include <vector>

#include "snls/torus.hpp"

namespace snls {

// M(u) = 1/2 int |u|^2
double mass(const SpectralField& f);

// dispersion: gradient symbol omega(n), the one generating apply_semigroup,
//   so the energy is conserved by the deterministic flow (coordinates span
//   [0, 2 pi alpha_j) per axis).
// unit_period: physical gradient on [0, alpha_j), symbol (2 pi)^2 omega(n).
enum class GradientConvention { dispersion, unit_period };

double gradient_energy(const SpectralField& f, GradientConvention conv = GradientConvention::dispersion);
// sign * coupling / (2k+2) int |u|^{2k+2}, exact padded quadrature.
double potential_energy(const SpectralField& f, const NonlinearitySpec& nl);
double energy(const SpectralField& f, const NonlinearitySpec& nl,
              GradientConvention conv = GradientConvention::dispersion);

double sobolev_norm(const SpectralField& f, double s);
double fl_norm(const SpectralField& f, double s, double r);

// Time-stamped fields on one torus.
class Trajectory {
 public:
  explicit Trajectory(TorusSpec spec) : spec_(spec) {}

  void append(double t, SpectralField field);
  void reserve(std::size_t n);

  const TorusSpec& spec() const { return spec_; }
  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  std::span<const double> times() const { return times_; }
  std::span<const SpectralField> fields() const { return fields_; }
  const SpectralField& operator[](std::size_t i) const { return fields_[i]; }
  const SpectralField& back() const { return fields_.back(); }

  // Uniform stride within 1e-12 relative.
  bool is_uniform() const;
  double stride() const;

 private:
  TorusSpec spec_;
  std::vector<double> times_;
  std::vector<SpectralField> fields_;
};

// sharp: multiply by the indicator of the sampled window; valid for 0 <= b < 1/2.
// none: treat the samples as the whole space-time function; any real b.
enum class XsbWindow { sharp, none };

// Discrete time-frequency grid for L samples at stride dt zero-padded to
// padded_length >= pad*L: nu_m = m / (padded_length dt) for the centred
// index m, weight frequency tau_m = 2 pi nu_m, measure dnu.
struct TimeFrequencyGrid {
  std::size_t samples = 0;
  std::size_t padded_length = 0;
  double dt = 0.0;
  double dnu = 0.0;
  std::vector<double> tau;
};

TimeFrequencyGrid time_frequency_grid(std::size_t samples, double dt, int time_pad = 4);

// X^{s,b} norm in interaction representation: Fourier transform in t of
// S(-t)u(t), weights <n>^s <tau>^b, l^2_n L^2_tau.  The trajectory window is
// [t_0, t_0 + L dt), each sample weighted by dt.
double xsb_norm(const Trajectory& traj, double s, double b, XsbWindow window = XsbWindow::sharp,
                int time_pad = 4);
// Same on the first `count` samples.  `stride` gives the sample spacing when
// the prefix has a single sample (otherwise derived from the times).
double xsb_norm_prefix(const Trajectory& traj, std::size_t count, double s, double b,
                       XsbWindow window = XsbWindow::sharp, int time_pad = 4, double stride = 0.0);

}  // namespace snls
