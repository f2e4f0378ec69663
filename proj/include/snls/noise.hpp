#pragma once

// Smoothing operators phi, their Hilbert-Schmidt / Fourier-Lebesgue norms,
// and sampling of the truncated cylindrical Wiener process
// W(t) = sum_n beta_n(t) e_n.
//
// Normalization: Re beta_n and Im beta_n are independent standard Brownian
// motions, so E|beta_n(t)|^2 = 2t.  With M = 1/2 ||u||^2 this makes the Ito
// correction of the mass exactly ||phi||_HS^2 per unit time.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "snls/torus.hpp"

namespace snls {

class SmoothingOperator {
 public:
  enum class Kind { diagonal, dense };

  // phi e_n = m(n) e_n.
  static SmoothingOperator diagonal(TorusSpec spec, std::vector<double> multipliers);
  // Row-major matrix: entry(n, j) = (phi e_j)^(n).
  static SmoothingOperator dense(TorusSpec spec, std::vector<cplx> matrix);

  // m(n) = amplitude * <n>^{-decay}
  static SmoothingOperator bracket_power(TorusSpec spec, double decay, double amplitude = 1.0);
  // m(n) = amplitude on the Euclidean ball |n| <= radius, 0 elsewhere.
  static SmoothingOperator ball_indicator(TorusSpec spec, double radius, double amplitude = 1.0);
  static SmoothingOperator zero(TorusSpec spec);

  Kind kind() const { return kind_; }
  const TorusSpec& spec() const { return spec_; }
  std::span<const double> multipliers() const { return multipliers_; }
  std::span<const cplx> matrix() const { return matrix_; }

  cplx entry(std::size_t n, std::size_t j) const;
  // sum_j |(phi e_j)^(n)|^2
  double row_energy(std::size_t n) const;
  // (phi dW)^(n) = sum_j (phi e_j)^(n) dW_j
  std::vector<cplx> apply(std::span<const cplx> increments) const;

  SmoothingOperator to_dense() const;
  SmoothingOperator scaled(double factor) const;
  bool is_zero() const;
  // True when phi commutes with complex conjugation of physical fields.
  bool maps_real_to_real(double tol = 1e-14) const;

 private:
  SmoothingOperator(Kind kind, TorusSpec spec) : kind_(kind), spec_(spec) {}

  Kind kind_;
  TorusSpec spec_;
  std::vector<double> multipliers_;
  std::vector<cplx> matrix_;
};

// ||phi||_{L^2(L^2; H^s)} = sqrt(sum_j ||phi e_j||_{H^s}^2)
double hs_norm(const SmoothingOperator& op, double s);
// sqrt(sum_j ||phi e_j||_{FL^{s,r}}^2)
double flsr_norm(const SmoothingOperator& op, double s, double r);

enum class NoiseMode { additive_ito, multiplicative_ito, multiplicative_stratonovich_real };

struct NoiseSpec {
  NoiseMode mode;
  SmoothingOperator op;

  bool real_valued() const { return mode == NoiseMode::multiplicative_stratonovich_real; }
  void validate() const;
};

class WienerState {
 public:
  // refinement r: each increment over dt is the sum of 2^r sub-increments
  // over dt/2^r drawn in sequence, so a path with (dt, r+1) is coupled to
  // one with (dt/2, r) under the same seed.
  WienerState(TorusSpec spec, std::uint64_t seed, bool real_valued = false, int refinement = 0);

  // Independent increments dbeta_n over [t, t+dt]; advances the clock.
  std::vector<cplx> sample_increment(double dt);

  double time() const { return time_; }
  std::uint64_t seed() const { return seed_; }
  bool real_valued() const { return real_valued_; }
  int refinement() const { return refinement_; }
  std::span<const cplx> brownian() const { return beta_; }

 private:
  void draw(double dt, std::vector<cplx>& acc);

  TorusSpec spec_;
  std::uint64_t seed_;
  bool real_valued_;
  int refinement_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<cplx> beta_;
  double time_ = 0.0;
};

// Psi(t+dt) = S(dt) Psi(t) + phi dW over [t, t+dt].
SpectralField convolve_additive_step(const SpectralField& psi, const SmoothingOperator& op, WienerState& w,
                                     double dt);

}  // namespace snls
