#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "snls/torus.hpp"

namespace testing {

using snls::cplx;

inline snls::SpectralField random_field(const snls::TorusSpec& spec, std::mt19937_64& rng, double decay = 0.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  snls::SpectralField f(spec);
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double a = std::pow(spec.bracket(n), -decay);
    const double re = g(rng);
    f[n] = a * cplx(re, g(rng));
  }
  return f;
}

// u(x) = sum_n c_n exp(2 pi i n.x / alpha), evaluated term by term.
inline cplx evaluate(const snls::SpectralField& f, const std::array<double, 3>& x) {
  const auto& spec = f.spec();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto n = spec.mode(i);
    double phase = 0.0;
    for (int j = 0; j < spec.dim(); ++j) phase += 2.0 * std::numbers::pi * n[j] * x[j] / spec.period(j);
    acc += f[i] * std::polar(1.0, phase);
  }
  return acc;
}

inline double l2(const snls::SpectralField& f) {
  double acc = 0.0;
  for (cplx c : f.coeffs()) acc += std::norm(c);
  return std::sqrt(acc);
}

// sum over n_1 - n_2 + n_3 - ... = n of c(n_1) conj(c(n_2)) c(n_3) ..., term by term.
inline snls::SpectralField brute_force_nonlinearity(const snls::SpectralField& f, int k, double g) {
  const auto& spec = f.spec();
  const int factors = 2 * k + 1;
  snls::SpectralField out(spec);
  const std::size_t count = spec.mode_count();
  std::function<void(int, snls::ModeIndex, cplx)> rec = [&](int level, snls::ModeIndex sum, cplx prod) {
    if (prod == 0.0) return;
    if (level == factors) {
      if (spec.contains(sum)) out[spec.index(sum)] += prod;
      return;
    }
    const bool odd = level % 2 == 1;
    for (std::size_t i = 0; i < count; ++i) {
      const snls::ModeIndex n = spec.mode(i);
      snls::ModeIndex next = sum;
      for (int j = 0; j < spec.dim(); ++j) next[j] += odd ? -n[j] : n[j];
      rec(level + 1, next, prod * (odd ? std::conj(f[i]) : f[i]));
    }
  };
  rec(0, snls::ModeIndex{0, 0, 0}, 1.0);
  out *= g;
  return out;
}

}  // namespace testing
