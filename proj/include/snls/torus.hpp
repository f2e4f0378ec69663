#pragma once

// Discrete torus geometry and the spectral representation of fields on it.
//
// Modes are the full cube n in Z^d with |n_j| <= N, stored row-major with
// n_j running over -N..N (axis 0 slowest).  Because the cube is symmetric
// the index of -n is always (count - 1 - index(n)).
//
// Frequency convention: the free propagator acts by e^{i t omega(n)} with
// omega(n) = sum_j (n_j / alpha_j)^2, i.e. the 2*pi factors are absorbed into
// the time unit.  Physical grids are uniform over one period per axis.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace snls {

using cplx = std::complex<double>;
using ModeIndex = std::array<int, 3>;

class TorusSpec {
 public:
  static constexpr int kMaxDim = 3;

  // periods empty -> all ones.
  TorusSpec(int dim, int cutoff, std::vector<double> periods = {});

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  double period(int axis) const { return periods_[axis]; }
  std::span<const double> periods() const { return {periods_.data(), static_cast<std::size_t>(dim_)}; }

  int axis_modes() const { return 2 * cutoff_ + 1; }
  std::size_t mode_count() const { return count_; }
  std::size_t zero_index() const { return (count_ - 1) / 2; }
  std::size_t negated(std::size_t idx) const { return count_ - 1 - idx; }

  ModeIndex mode(std::size_t idx) const;
  std::size_t index(const ModeIndex& n) const;
  bool contains(const ModeIndex& n) const;

  // omega(n) = sum_j (n_j/alpha_j)^2; also |n|^2 in the weight <n>.
  double dispersion(std::size_t idx) const;
  // sum_j n_j^2 on the integer lattice (Euclidean length used by project_leq).
  double lattice_norm_sq(std::size_t idx) const;
  // <n> = sqrt(1 + omega(n)).
  double bracket(std::size_t idx) const;
  double volume() const;

  // Same geometry with a different cutoff.
  TorusSpec with_cutoff(int cutoff) const;

  friend bool operator==(const TorusSpec& a, const TorusSpec& b);

 private:
  int dim_;
  int cutoff_;
  std::array<double, kMaxDim> periods_{1.0, 1.0, 1.0};
  std::size_t count_;
};

class SpectralField {
 public:
  explicit SpectralField(TorusSpec spec);
  SpectralField(TorusSpec spec, std::vector<cplx> coeffs);

  static SpectralField single_mode(TorusSpec spec, const ModeIndex& n, cplx amplitude = 1.0);
  static SpectralField constant(TorusSpec spec, cplx value);

  const TorusSpec& spec() const { return spec_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx operator[](std::size_t idx) const { return coeffs_[idx]; }
  cplx& operator[](std::size_t idx) { return coeffs_[idx]; }
  cplx at(const ModeIndex& n) const { return coeffs_[spec_.index(n)]; }

  bool is_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx scale);

  // Re-embed into another cutoff: modes outside the target cube are dropped,
  // new modes are zero.
  SpectralField resized(int cutoff) const;

 private:
  TorusSpec spec_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx scale, SpectralField a);

// Relative l2 distance ||a-b|| / max(||b||, tiny).
double relative_distance(const SpectralField& a, const SpectralField& b);
double max_abs_difference(const SpectralField& a, const SpectralField& b);

// Samples on a uniform grid of extent pad*(2N+1) per axis, row-major.
struct PhysicalField {
  TorusSpec spec;
  int pad = 1;
  std::vector<cplx> values;

  int extent() const { return pad * spec.axis_modes(); }
  std::size_t point_count() const { return values.size(); }
  // Coordinate of grid point i along an axis, in [0, alpha).
  double coordinate(int axis, int i) const { return spec.period(axis) * i / extent(); }
};

struct NonlinearitySpec {
  enum class Sign { defocusing, focusing };

  int k = 1;
  Sign sign = Sign::defocusing;
  // Multiplier on |u|^{2k}u; 0 switches the nonlinearity off.
  double coupling = 1.0;

  // +coupling for defocusing, -coupling for focusing.
  double signed_coupling() const { return sign == Sign::defocusing ? coupling : -coupling; }
  NonlinearitySpec scaled(double factor) const;
  void validate() const;
};

enum class Dealias { off, on };

// Zero-padding factor making the degree-(2k+1) product alias-free.
int dealias_pad(int k);

PhysicalField to_physical(const SpectralField& f, int pad = 1);
SpectralField to_spectral(const PhysicalField& g);
SpectralField to_spectral(std::span<const cplx> grid, const TorusSpec& spec, int pad);

// Zeroes every mode with Euclidean lattice length |n| > radius.
SpectralField project_leq(const SpectralField& f, double radius);

// S(t) = e^{-it Delta}: u^(n) -> e^{i t omega(n)} u^(n).
SpectralField apply_semigroup(const SpectralField& f, double t);
void apply_semigroup_inplace(SpectralField& f, double t);

// Spectral coefficients (|n_j| <= N) of signed_coupling * |u|^{2k} u.
SpectralField nonlinear_term(const SpectralField& f, const NonlinearitySpec& nl,
                             Dealias dealias = Dealias::on);

// Exact flow of u_t = i * signed_coupling * |u|^{2k} u over dt, evaluated
// pointwise on the (dealiased) grid and projected back to the cube.
SpectralField nonlinear_phase_flow(const SpectralField& f, const NonlinearitySpec& nl, double dt,
                                   Dealias dealias = Dealias::on);

}  // namespace snls
