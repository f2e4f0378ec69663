#include "snls/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft.hpp"
#include "snls/error.hpp"

namespace snls {

TorusSpec::TorusSpec(int dim, int cutoff, std::vector<double> periods) : dim_(dim), cutoff_(cutoff) {
  require(dim >= 1 && dim <= kMaxDim, "torus dimension must be 1, 2 or 3");
  require(cutoff >= 0, "frequency cutoff must be non-negative");
  if (!periods.empty()) {
    require(static_cast<int>(periods.size()) == dim, "one period per axis required");
    for (int j = 0; j < dim; ++j) {
      require(std::isfinite(periods[j]) && periods[j] > 0.0, "torus periods must be positive");
      periods_[j] = periods[j];
    }
  }
  count_ = 1;
  for (int j = 0; j < dim; ++j) count_ *= static_cast<std::size_t>(axis_modes());
}

ModeIndex TorusSpec::mode(std::size_t idx) const {
  ModeIndex n{0, 0, 0};
  const auto m = static_cast<std::size_t>(axis_modes());
  for (int j = dim_ - 1; j >= 0; --j) {
    n[j] = static_cast<int>(idx % m) - cutoff_;
    idx /= m;
  }
  return n;
}

std::size_t TorusSpec::index(const ModeIndex& n) const {
  require(contains(n), "mode outside the truncated cube");
  std::size_t idx = 0;
  for (int j = 0; j < dim_; ++j) idx = idx * axis_modes() + static_cast<std::size_t>(n[j] + cutoff_);
  return idx;
}

bool TorusSpec::contains(const ModeIndex& n) const {
  for (int j = 0; j < dim_; ++j)
    if (std::abs(n[j]) > cutoff_) return false;
  for (int j = dim_; j < kMaxDim; ++j)
    if (n[j] != 0) return false;
  return true;
}

double TorusSpec::dispersion(std::size_t idx) const {
  const ModeIndex n = mode(idx);
  double w = 0.0;
  for (int j = 0; j < dim_; ++j) {
    const double q = n[j] / periods_[j];
    w += q * q;
  }
  return w;
}

double TorusSpec::lattice_norm_sq(std::size_t idx) const {
  const ModeIndex n = mode(idx);
  double s = 0.0;
  for (int j = 0; j < dim_; ++j) s += static_cast<double>(n[j]) * n[j];
  return s;
}

double TorusSpec::bracket(std::size_t idx) const { return std::sqrt(1.0 + dispersion(idx)); }

double TorusSpec::volume() const {
  double v = 1.0;
  for (int j = 0; j < dim_; ++j) v *= periods_[j];
  return v;
}

TorusSpec TorusSpec::with_cutoff(int cutoff) const {
  return TorusSpec(dim_, cutoff, std::vector<double>(periods_.begin(), periods_.begin() + dim_));
}

bool operator==(const TorusSpec& a, const TorusSpec& b) {
  if (a.dim_ != b.dim_ || a.cutoff_ != b.cutoff_) return false;
  for (int j = 0; j < a.dim_; ++j)
    if (a.periods_[j] != b.periods_[j]) return false;
  return true;
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(TorusSpec spec) : spec_(spec), coeffs_(spec.mode_count()) {}

SpectralField::SpectralField(TorusSpec spec, std::vector<cplx> coeffs)
    : spec_(spec), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == spec_.mode_count(), "coefficient count must equal (2N+1)^d");
  require(is_finite(), "spectral coefficients must be finite");
}

SpectralField SpectralField::single_mode(TorusSpec spec, const ModeIndex& n, cplx amplitude) {
  SpectralField f(spec);
  f.coeffs_[spec.index(n)] = amplitude;
  return f;
}

SpectralField SpectralField::constant(TorusSpec spec, cplx value) {
  SpectralField f(spec);
  f.coeffs_[spec.zero_index()] = value;
  return f;
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require(spec_ == other.spec_, "fields live on different tori");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require(spec_ == other.spec_, "fields live on different tori");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

SpectralField SpectralField::resized(int cutoff) const {
  const TorusSpec target = spec_.with_cutoff(cutoff);
  SpectralField out(target);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const ModeIndex n = spec_.mode(i);
    if (target.contains(n)) out.coeffs_[target.index(n)] = coeffs_[i];
  }
  return out;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx scale, SpectralField a) { return a *= scale; }

double relative_distance(const SpectralField& a, const SpectralField& b) {
  require(a.spec() == b.spec(), "fields live on different tori");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num) / std::max(std::sqrt(den), std::numeric_limits<double>::min());
}

double max_abs_difference(const SpectralField& a, const SpectralField& b) {
  require(a.spec() == b.spec(), "fields live on different tori");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------

void NonlinearitySpec::validate() const {
  require(k >= 1, "nonlinearity power k must be >= 1");
  require(std::isfinite(coupling) && coupling >= 0.0, "nonlinearity coupling must be finite and >= 0");
}

NonlinearitySpec NonlinearitySpec::scaled(double factor) const {
  NonlinearitySpec out = *this;
  out.coupling = coupling * factor;
  return out;
}

int dealias_pad(int k) { return (2 * k + 2 + 1) / 2; }

namespace {

// Linear grid offset of every mode on a cube of `extent` points per axis.
std::vector<std::size_t> grid_offsets(const TorusSpec& spec, int extent) {
  std::vector<std::size_t> out(spec.mode_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const ModeIndex n = spec.mode(i);
    std::size_t g = 0;
    for (int j = 0; j < spec.dim(); ++j) g = g * extent + static_cast<std::size_t>((n[j] + extent) % extent);
    out[i] = g;
  }
  return out;
}

std::size_t grid_points(int dim, int extent) {
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(extent);
  return total;
}

std::vector<cplx> synthesize(const SpectralField& f, int pad) {
  const TorusSpec& spec = f.spec();
  const int extent = pad * spec.axis_modes();
  std::vector<cplx> grid(grid_points(spec.dim(), extent));
  const auto offsets = grid_offsets(spec, extent);
  for (std::size_t i = 0; i < offsets.size(); ++i) grid[offsets[i]] = f[i];
  fft::transform_cube(grid, spec.dim(), extent, fft::Direction::backward);
  return grid;
}

// Forward transform of grid (destroyed) and restriction to the cube.
SpectralField analyze(std::vector<cplx>& grid, const TorusSpec& spec, int pad) {
  const int extent = pad * spec.axis_modes();
  fft::transform_cube(grid, spec.dim(), extent, fft::Direction::forward);
  const double scale = 1.0 / static_cast<double>(grid.size());
  const auto offsets = grid_offsets(spec, extent);
  SpectralField out(spec);
  for (std::size_t i = 0; i < offsets.size(); ++i) out[i] = grid[offsets[i]] * scale;
  return out;
}

int nonlinear_pad(int k, Dealias dealias) { return dealias == Dealias::on ? dealias_pad(k) : 1; }

}  // namespace

PhysicalField to_physical(const SpectralField& f, int pad) {
  require(pad >= 1, "pad factor must be >= 1");
  require(f.is_finite(), "to_physical: non-finite coefficients");
  return PhysicalField{f.spec(), pad, synthesize(f, pad)};
}

SpectralField to_spectral(std::span<const cplx> grid, const TorusSpec& spec, int pad) {
  require(pad >= 1, "pad factor must be >= 1");
  require(grid.size() == grid_points(spec.dim(), pad * spec.axis_modes()),
          "to_spectral: grid size incompatible with torus and pad factor");
  std::vector<cplx> work(grid.begin(), grid.end());
  return analyze(work, spec, pad);
}

SpectralField to_spectral(const PhysicalField& g) { return to_spectral(g.values, g.spec, g.pad); }

SpectralField project_leq(const SpectralField& f, double radius) {
  require(radius >= 0.0, "projection radius must be non-negative");
  SpectralField out = f;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (f.spec().lattice_norm_sq(i) > r2) out[i] = 0.0;
  return out;
}

void apply_semigroup_inplace(SpectralField& f, double t) {
  require(std::isfinite(t), "semigroup time must be finite");
  if (t == 0.0) return;
  const TorusSpec& spec = f.spec();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(1.0, t * spec.dispersion(i));
}

SpectralField apply_semigroup(const SpectralField& f, double t) {
  SpectralField out = f;
  apply_semigroup_inplace(out, t);
  return out;
}

SpectralField nonlinear_term(const SpectralField& f, const NonlinearitySpec& nl, Dealias dealias) {
  nl.validate();
  const int pad = nonlinear_pad(nl.k, dealias);
  auto grid = synthesize(f, pad);
  const double g = nl.signed_coupling();
  for (auto& u : grid) u *= g * std::pow(std::norm(u), nl.k);
  return analyze(grid, f.spec(), pad);
}

SpectralField nonlinear_phase_flow(const SpectralField& f, const NonlinearitySpec& nl, double dt,
                                   Dealias dealias) {
  nl.validate();
  require(std::isfinite(dt), "phase-flow step must be finite");
  if (dt == 0.0 || nl.coupling == 0.0) return f;
  const int pad = nonlinear_pad(nl.k, dealias);
  auto grid = synthesize(f, pad);
  const double rate = nl.signed_coupling() * dt;
  for (auto& u : grid) u *= std::polar(1.0, rate * std::pow(std::norm(u), nl.k));
  return analyze(grid, f.spec(), pad);
}

}  // namespace snls
