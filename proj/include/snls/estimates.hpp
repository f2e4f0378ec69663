#pragma once

// Empirical constants of the harmonic-analysis inequalities used by the
// well-posedness theory.  Every estimator reports max/mean of a homogeneous
// ratio over random inputs; a bounded constant shows up as a max ratio that
// does not grow along an N-sweep.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "snls/functionals.hpp"
#include "snls/torus.hpp"

namespace snls {

struct RatioStats {
  double max = 0.0;
  double mean = 0.0;
  std::vector<double> ratios;
  // Variance exponent gamma used for each sample.
  std::vector<double> profiles;
  std::uint64_t seed = 0;

  std::size_t samples() const { return ratios.size(); }
  void add(double ratio, double gamma);
};

// Variance exponents {0, s, s+1}; sample i uses profiles[i % 3].
std::vector<double> amplitude_profiles(double s);

// Independent complex Gaussian coefficients with E|a_n|^2 = <n>^{-2 gamma}.
SpectralField random_field(const TorusSpec& spec, double gamma, std::mt19937_64& rng);

// u(t_j) = sum_n a_n e^{i (omega(n) + lambda_n) t_j} e_n on [0, T), lambda_n
// uniform in [-modulation, modulation], at time stride dt.
Trajectory random_spacetime_field(const TorusSpec& spec, double gamma, double modulation, double T, double dt,
                                  std::mt19937_64& rng);
// Stride resolving every frequency of a `degree`-fold product of such fields.
double resolving_stride(const TorusSpec& spec, double modulation, int degree);

// Free evolution S(t) f sampled on [0, T) with L samples.
Trajectory free_evolution(const SpectralField& f, double T, std::size_t samples);

// ---- periodic Strichartz --------------------------------------------------

double strichartz_exponent(int d, double p, double eps);
// ||S(t) f||_{L^p([0,T] x T^d)} / (N^{exponent} ||f||_{L^2}), space-time
// Gauss-Legendre quadrature in t and padded grid quadrature in x.
double strichartz_ratio_of(const SpectralField& f, double p, double T, double eps = 0.05);
double lp_spacetime_norm(const SpectralField& f, double p, double T);
// Random P_{<=N} f for each sample.  Requires p >= 2(d+2)/d.
RatioStats strichartz_ratio(const TorusSpec& spec, double p, std::size_t samples, double T, std::uint64_t seed,
                            double eps = 0.05);

// ---- L^4 Strichartz vs X^{0,3/8} -----------------------------------------

// Riemann-sum L^4_{t,x} norm consistent with the X^{s,b} sampling.
double l4_spacetime_norm(const Trajectory& u);
double l4_xsb_ratio_of(const Trajectory& u, double b = 0.375);
RatioStats l4_xsb_ratio(std::span<const Trajectory> ensemble, double b = 0.375);
// dt <= 0 picks resolving_stride(spec, modulation, 4).
RatioStats l4_xsb_sweep(const TorusSpec& spec, std::size_t samples, double T, std::uint64_t seed,
                        double modulation = 10.0, double dt = 0.0);

// ---- Fourier-Lebesgue product estimate ------------------------------------

// ||f u||_{H^s} / (||f||_{FL^{s,r}} ||u||_{H^s}); product computed exactly.
double product_ratio_of(const SpectralField& f, const SpectralField& u, double s, double r);
RatioStats product_ratio(const TorusSpec& spec, double s, double r, std::size_t samples, std::uint64_t seed);

// ---- multilinear X^{s,b} estimate -----------------------------------------

double critical_regularity(int d, int k);
// ||u_1 conj(u_2) u_3 ... u_{2k+1}||_{X^{s,b'-1}} / prod ||u_j||_{X^{s,b}}.
// Zero when any factor vanishes identically.
double multilinear_ratio_of(std::span<const Trajectory> factors, int k, double s, double b, double b_prime);
// Pointwise-in-time product (factors with odd index conjugated), exact on
// the (2k+1)N cube.
Trajectory multilinear_product(std::span<const Trajectory> factors);
RatioStats multilinear_ratio(const TorusSpec& spec, int k, double s, double b, double b_prime, std::size_t samples,
                             std::uint64_t seed, double T = 1.0, double modulation = 4.0, double dt = 0.0);

// ---- factorization identity --------------------------------------------------

// int_mu^t (t - t')^{alpha - 1} (t' - mu)^{-alpha} dt'
double factorization_check(double alpha, double t, double mu);

}  // namespace snls
