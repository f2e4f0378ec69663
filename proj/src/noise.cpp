#include "snls/noise.hpp"

#include <algorithm>
#include <cmath>

#include "snls/error.hpp"

namespace snls {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SmoothingOperator SmoothingOperator::diagonal(TorusSpec spec, std::vector<double> multipliers) {
  require(multipliers.size() == spec.mode_count(), "diagonal operator needs one multiplier per mode");
  for (double m : multipliers) require(std::isfinite(m) && m >= 0.0, "multipliers must be finite and >= 0");
  SmoothingOperator op(Kind::diagonal, spec);
  op.multipliers_ = std::move(multipliers);
  return op;
}

SmoothingOperator SmoothingOperator::dense(TorusSpec spec, std::vector<cplx> matrix) {
  const std::size_t n = spec.mode_count();
  require(matrix.size() == n * n, "dense operator needs a (2N+1)^d square matrix");
  for (cplx c : matrix)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), "operator entries must be finite");
  SmoothingOperator op(Kind::dense, spec);
  op.matrix_ = std::move(matrix);
  return op;
}

SmoothingOperator SmoothingOperator::bracket_power(TorusSpec spec, double decay, double amplitude) {
  std::vector<double> m(spec.mode_count());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = amplitude * std::pow(spec.bracket(i), -decay);
  return diagonal(spec, std::move(m));
}

SmoothingOperator SmoothingOperator::ball_indicator(TorusSpec spec, double radius, double amplitude) {
  std::vector<double> m(spec.mode_count());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = spec.lattice_norm_sq(i) <= radius * radius ? amplitude : 0.0;
  return diagonal(spec, std::move(m));
}

SmoothingOperator SmoothingOperator::zero(TorusSpec spec) {
  return diagonal(spec, std::vector<double>(spec.mode_count(), 0.0));
}

cplx SmoothingOperator::entry(std::size_t n, std::size_t j) const {
  if (kind_ == Kind::diagonal) return n == j ? cplx(multipliers_[n]) : cplx(0.0);
  return matrix_[n * spec_.mode_count() + j];
}

double SmoothingOperator::row_energy(std::size_t n) const {
  if (kind_ == Kind::diagonal) return multipliers_[n] * multipliers_[n];
  const std::size_t count = spec_.mode_count();
  double acc = 0.0;
  for (std::size_t j = 0; j < count; ++j) acc += std::norm(matrix_[n * count + j]);
  return acc;
}

std::vector<cplx> SmoothingOperator::apply(std::span<const cplx> increments) const {
  const std::size_t count = spec_.mode_count();
  require(increments.size() == count, "increment vector does not match operator size");
  std::vector<cplx> out(count);
  if (kind_ == Kind::diagonal) {
    for (std::size_t n = 0; n < count; ++n) out[n] = multipliers_[n] * increments[n];
    return out;
  }
  for (std::size_t n = 0; n < count; ++n) {
    cplx acc = 0.0;
    const cplx* row = matrix_.data() + n * count;
    for (std::size_t j = 0; j < count; ++j) acc += row[j] * increments[j];
    out[n] = acc;
  }
  return out;
}

SmoothingOperator SmoothingOperator::to_dense() const {
  if (kind_ == Kind::dense) return *this;
  const std::size_t count = spec_.mode_count();
  std::vector<cplx> mat(count * count);
  for (std::size_t n = 0; n < count; ++n) mat[n * count + n] = multipliers_[n];
  return dense(spec_, std::move(mat));
}

SmoothingOperator SmoothingOperator::scaled(double factor) const {
  require(std::isfinite(factor) && factor >= 0.0, "operator scale must be finite and >= 0");
  SmoothingOperator out = *this;
  for (auto& m : out.multipliers_) m *= factor;
  for (auto& c : out.matrix_) c *= factor;
  return out;
}

bool SmoothingOperator::is_zero() const {
  return std::all_of(multipliers_.begin(), multipliers_.end(), [](double m) { return m == 0.0; }) &&
         std::all_of(matrix_.begin(), matrix_.end(), [](cplx c) { return c == 0.0; });
}

bool SmoothingOperator::maps_real_to_real(double tol) const {
  // Real f has f^(-n) = conj f^(n); phi preserves this iff
  // (phi e_{-j})^(-n) = conj (phi e_j)^(n).
  const std::size_t count = spec_.mode_count();
  if (kind_ == Kind::diagonal) {
    for (std::size_t n = 0; n < count; ++n)
      if (std::abs(multipliers_[n] - multipliers_[spec_.negated(n)]) > tol) return false;
    return true;
  }
  for (std::size_t n = 0; n < count; ++n)
    for (std::size_t j = 0; j < count; ++j)
      if (std::abs(entry(spec_.negated(n), spec_.negated(j)) - std::conj(entry(n, j))) > tol) return false;
  return true;
}

double hs_norm(const SmoothingOperator& op, double s) {
  const TorusSpec& spec = op.spec();
  double acc = 0.0;
  for (std::size_t n = 0; n < spec.mode_count(); ++n)
    acc += std::pow(spec.bracket(n), 2.0 * s) * op.row_energy(n);
  return std::sqrt(acc);
}

double flsr_norm(const SmoothingOperator& op, double s, double r) {
  require(r >= 1.0, "Fourier-Lebesgue exponent r must be >= 1");
  const TorusSpec& spec = op.spec();
  const std::size_t count = spec.mode_count();
  double acc = 0.0;
  if (op.kind() == SmoothingOperator::Kind::diagonal) {
    // Column j is the single mode m(j) e_j.
    for (std::size_t j = 0; j < count; ++j) {
      const double col = std::pow(spec.bracket(j), s) * op.multipliers()[j];
      acc += col * col;
    }
    return std::sqrt(acc);
  }
  for (std::size_t j = 0; j < count; ++j) {
    double col = 0.0;
    for (std::size_t n = 0; n < count; ++n) col += std::pow(std::pow(spec.bracket(n), s) * std::abs(op.entry(n, j)), r);
    acc += std::pow(col, 2.0 / r);
  }
  return std::sqrt(acc);
}

void NoiseSpec::validate() const {
  for (double m : op.multipliers()) require(std::isfinite(m), "noise operator must have finite Hilbert-Schmidt norm");
  require(std::isfinite(hs_norm(op, 0.0)), "noise operator must have finite Hilbert-Schmidt norm");
  if (real_valued())
    require(op.maps_real_to_real(), "Stratonovich-real noise needs an operator mapping real fields to real fields");
}

WienerState::WienerState(TorusSpec spec, std::uint64_t seed, bool real_valued, int refinement)
    : spec_(spec),
      seed_(seed),
      real_valued_(real_valued),
      refinement_(refinement),
      rng_(splitmix64(seed)),
      beta_(spec.mode_count()) {
  require(refinement >= 0 && refinement <= 20, "noise refinement must be in [0, 20]");
}

void WienerState::draw(double dt, std::vector<cplx>& acc) {
  const double sd = std::sqrt(dt);
  const std::size_t count = spec_.mode_count();
  if (!real_valued_) {
    for (std::size_t n = 0; n < count; ++n) {
      const double re = normal_(rng_);
      const double im = normal_(rng_);
      acc[n] += cplx(sd * re, sd * im);
    }
    return;
  }
  // Conjugate-symmetric increments; the zero mode is real with E|db|^2 = 2dt.
  const std::size_t zero = spec_.zero_index();
  for (std::size_t n = 0; n < zero; ++n) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    const cplx inc(sd * re, sd * im);
    acc[n] += inc;
    acc[spec_.negated(n)] += std::conj(inc);
  }
  acc[zero] += std::sqrt(2.0) * sd * normal_(rng_);
}

std::vector<cplx> WienerState::sample_increment(double dt) {
  require(std::isfinite(dt) && dt > 0.0, "Wiener increment needs dt > 0");
  std::vector<cplx> inc(spec_.mode_count());
  const int subs = 1 << refinement_;
  const double sub_dt = dt / subs;
  for (int i = 0; i < subs; ++i) draw(sub_dt, inc);
  for (std::size_t n = 0; n < inc.size(); ++n) beta_[n] += inc[n];
  time_ += dt;
  return inc;
}

SpectralField convolve_additive_step(const SpectralField& psi, const SmoothingOperator& op, WienerState& w,
                                     double dt) {
  require(std::isfinite(dt) && dt > 0.0, "stochastic convolution step needs dt > 0");
  require(psi.spec() == op.spec(), "operator and field live on different tori");
  SpectralField out = apply_semigroup(psi, dt);
  const auto inc = w.sample_increment(dt);
  const auto forced = op.apply(inc);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += forced[n];
  return out;
}

}  // namespace snls
