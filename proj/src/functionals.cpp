#include "snls/functionals.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "snls/error.hpp"

namespace snls {

double mass(const SpectralField& f) {
  double acc = 0.0;
  for (cplx c : f.coeffs()) acc += std::norm(c);
  return 0.5 * acc;
}

double gradient_energy(const SpectralField& f, GradientConvention conv) {
  const TorusSpec& spec = f.spec();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += spec.dispersion(i) * std::norm(f[i]);
  const double scale = conv == GradientConvention::unit_period ? 4.0 * std::numbers::pi * std::numbers::pi : 1.0;
  return 0.5 * scale * acc;
}

double potential_energy(const SpectralField& f, const NonlinearitySpec& nl) {
  nl.validate();
  // |u|^{2k+2} has modes up to (2k+2)N; pad k+1 resolves its mean exactly.
  const PhysicalField g = to_physical(f, nl.k + 1);
  double acc = 0.0;
  for (cplx u : g.values) acc += std::pow(std::norm(u), nl.k + 1);
  acc /= static_cast<double>(g.point_count());
  return nl.signed_coupling() * acc / (2.0 * nl.k + 2.0);
}

double energy(const SpectralField& f, const NonlinearitySpec& nl, GradientConvention conv) {
  return gradient_energy(f, conv) + potential_energy(f, nl);
}

double sobolev_norm(const SpectralField& f, double s) {
  const TorusSpec& spec = f.spec();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::pow(spec.bracket(i), 2.0 * s) * std::norm(f[i]);
  return std::sqrt(acc);
}

double fl_norm(const SpectralField& f, double s, double r) {
  require(r >= 1.0, "Fourier-Lebesgue exponent r must be >= 1");
  const TorusSpec& spec = f.spec();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::pow(std::pow(spec.bracket(i), s) * std::abs(f[i]), r);
  return std::pow(acc, 1.0 / r);
}

// ---------------------------------------------------------------------------

void Trajectory::append(double t, SpectralField field) {
  require(field.spec() == spec_, "trajectory fields must share one torus");
  require(std::isfinite(t), "trajectory time must be finite");
  require(times_.empty() || t > times_.back(), "trajectory times must be strictly increasing");
  times_.push_back(t);
  fields_.push_back(std::move(field));
}

void Trajectory::reserve(std::size_t n) {
  times_.reserve(n);
  fields_.reserve(n);
}

double Trajectory::stride() const {
  require(times_.size() >= 2, "trajectory stride needs at least two samples");
  return (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
}

bool Trajectory::is_uniform() const {
  if (times_.size() < 3) return true;
  const double h = stride();
  for (std::size_t i = 1; i < times_.size(); ++i) {
    const double expected = times_.front() + static_cast<double>(i) * h;
    if (std::abs(times_[i] - expected) > 1e-12 * std::max(1.0, std::abs(times_[i]))) return false;
  }
  return true;
}

TimeFrequencyGrid time_frequency_grid(std::size_t samples, double dt, int time_pad) {
  require(samples >= 1, "time-frequency grid needs at least one sample");
  require(dt > 0.0 && std::isfinite(dt), "time-frequency grid needs dt > 0");
  require(time_pad >= 4, "time zero-padding factor must be >= 4");
  TimeFrequencyGrid g;
  g.samples = samples;
  g.dt = dt;
  g.padded_length = fft::friendly_size(static_cast<std::size_t>(time_pad) * samples);
  g.dnu = 1.0 / (static_cast<double>(g.padded_length) * dt);
  g.tau.resize(g.padded_length);
  const auto len = static_cast<long long>(g.padded_length);
  for (long long m = 0; m < len; ++m) {
    const long long centred = m < (len + 1) / 2 ? m : m - len;
    g.tau[m] = 2.0 * std::numbers::pi * static_cast<double>(centred) * g.dnu;
  }
  return g;
}

double xsb_norm_prefix(const Trajectory& traj, std::size_t count, double s, double b, XsbWindow window,
                       int time_pad, double stride) {
  require(count >= 1 && count <= traj.size(), "X^{s,b} norm needs a non-empty prefix");
  if (window == XsbWindow::sharp)
    require(b >= 0.0 && b < 0.5, "sharp time window requires 0 <= b < 1/2");
  require(std::isfinite(s) && std::isfinite(b), "X^{s,b} exponents must be finite");

  const auto times = traj.times();
  double dt = 1.0;
  if (count >= 2) {
    dt = (times[count - 1] - times[0]) / static_cast<double>(count - 1);
    for (std::size_t j = 1; j < count; ++j)
      require(std::abs(times[j] - times[0] - static_cast<double>(j) * dt) <= 1e-12 * std::max(1.0, std::abs(times[j])),
              "X^{s,b} norm needs a uniform trajectory");
  } else if (stride > 0.0) {
    dt = stride;
  } else if (traj.size() >= 2) {
    dt = traj.stride();
  }

  const TimeFrequencyGrid grid = time_frequency_grid(count, dt, time_pad);
  std::vector<double> weight(grid.padded_length);
  for (std::size_t m = 0; m < weight.size(); ++m) weight[m] = std::pow(1.0 + grid.tau[m] * grid.tau[m], b);

  const TorusSpec& spec = traj.spec();
  std::vector<cplx> line(grid.padded_length);
  double total = 0.0;
  for (std::size_t n = 0; n < spec.mode_count(); ++n) {
    bool any = false;
    for (std::size_t j = 0; j < count; ++j) any = any || traj[j][n] != 0.0;
    if (!any) continue;
    const double w = spec.dispersion(n);
    std::fill(line.begin(), line.end(), cplx(0.0));
    for (std::size_t j = 0; j < count; ++j) line[j] = std::polar(1.0, -times[j] * w) * traj[j][n];
    fft::transform_1d(line, fft::Direction::forward);
    double acc = 0.0;
    for (std::size_t m = 0; m < line.size(); ++m) acc += weight[m] * std::norm(line[m]);
    total += std::pow(spec.bracket(n), 2.0 * s) * acc;
  }
  return std::sqrt(total * dt * dt * grid.dnu);
}

double xsb_norm(const Trajectory& traj, double s, double b, XsbWindow window, int time_pad) {
  require(!traj.empty(), "X^{s,b} norm of an empty trajectory");
  require(traj.is_uniform(), "X^{s,b} norm needs a uniform trajectory");
  return xsb_norm_prefix(traj, traj.size(), s, b, window, time_pad);
}

}  // namespace snls
