#include "snls/estimates.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "snls/error.hpp"

namespace snls {
namespace {

std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) { return base ^ (index * 0x9e3779b97f4a7c15ULL); }

std::mt19937_64 sample_rng(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(sample_seed(base, index)),
                    static_cast<std::uint32_t>(sample_seed(base, index) >> 32)};
  return std::mt19937_64(seq);
}

double max_dispersion(const TorusSpec& spec) {
  double w = 0.0;
  for (std::size_t n = 0; n < spec.mode_count(); ++n) w = std::max(w, spec.dispersion(n));
  return w;
}

double l2(const SpectralField& f) { return sobolev_norm(f, 0.0); }

bool identically_zero(const Trajectory& u) {
  for (const auto& f : u.fields())
    for (cplx c : f.coeffs())
      if (c != 0.0) return false;
  return true;
}

}  // namespace

void RatioStats::add(double ratio, double gamma) {
  ratios.push_back(ratio);
  profiles.push_back(gamma);
  max = ratios.size() == 1 ? ratio : std::max(max, ratio);
  mean += (ratio - mean) / static_cast<double>(ratios.size());
}

std::vector<double> amplitude_profiles(double s) { return {0.0, s, s + 1.0}; }

SpectralField random_field(const TorusSpec& spec, double gamma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(spec);
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double sd = std::pow(spec.bracket(n), -gamma) / std::numbers::sqrt2;
    const double re = normal(rng);
    const double im = normal(rng);
    f[n] = cplx(sd * re, sd * im);
  }
  return f;
}

double resolving_stride(const TorusSpec& spec, double modulation, int degree) {
  require(degree >= 1, "product degree must be >= 1");
  const double fastest = degree * (max_dispersion(spec) + std::abs(modulation)) + 1.0;
  return std::numbers::pi / (4.0 * fastest);
}

Trajectory random_spacetime_field(const TorusSpec& spec, double gamma, double modulation, double T, double dt,
                                  std::mt19937_64& rng) {
  require(T > 0.0 && dt > 0.0, "space-time field needs T > 0 and dt > 0");
  const SpectralField amplitudes = random_field(spec, gamma, rng);
  std::uniform_real_distribution<double> uniform(-modulation, modulation);
  std::vector<double> freq(spec.mode_count());
  for (std::size_t n = 0; n < freq.size(); ++n) freq[n] = spec.dispersion(n) + uniform(rng);

  const auto samples = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = T / static_cast<double>(samples);
  Trajectory traj(spec);
  traj.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = static_cast<double>(j) * h;
    SpectralField f(spec);
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = amplitudes[n] * std::polar(1.0, freq[n] * t);
    traj.append(t, std::move(f));
  }
  return traj;
}

Trajectory free_evolution(const SpectralField& f, double T, std::size_t samples) {
  require(samples >= 1 && T > 0.0, "free evolution needs T > 0 and samples >= 1");
  const double h = T / static_cast<double>(samples);
  Trajectory traj(f.spec());
  traj.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = static_cast<double>(j) * h;
    traj.append(t, apply_semigroup(f, t));
  }
  return traj;
}

// ---------------------------------------------------------------------------

double strichartz_exponent(int d, double p, double eps) { return d / 2.0 - (d + 2.0) / p + eps; }

double lp_spacetime_norm(const SpectralField& f, double p, double T) {
  require(p >= 1.0 && T > 0.0, "L^p space-time norm needs p >= 1 and T > 0");
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();

  // |S(t)f|^p = (|S(t)f|^2)^{p/2} oscillates at most at (p/2) max omega.
  const double omega = 0.5 * p * max_dispersion(f.spec());
  const auto panels = static_cast<std::size_t>(std::ceil(omega * T / std::numbers::pi)) + 1;
  const double h = T / static_cast<double>(panels);
  const int pad = std::max(1, static_cast<int>(std::ceil(p / 2.0)));

  auto spatial_mean = [&](double t) {
    const PhysicalField g = to_physical(apply_semigroup(f, t), pad);
    double acc = 0.0;
    for (cplx u : g.values) acc += std::pow(std::abs(u), p);
    return acc / static_cast<double>(g.point_count());
  };

  double total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double centre = (static_cast<double>(k) + 0.5) * h;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double x = 0.5 * h * nodes[i];
      const double w = 0.5 * h * weights[i];
      total += w * spatial_mean(centre + x);
      if (nodes[i] != 0.0) total += w * spatial_mean(centre - x);
    }
  }
  return std::pow(total, 1.0 / p);
}

double strichartz_ratio_of(const SpectralField& f, double p, double T, double eps) {
  const TorusSpec& spec = f.spec();
  require(p >= 2.0 * (spec.dim() + 2.0) / spec.dim(), "Strichartz ratio requires p >= 2(d+2)/d");
  require(spec.cutoff() >= 1, "Strichartz ratio requires N >= 1");
  const double norm = l2(f);
  require(norm > 0.0, "Strichartz ratio of the zero field is undefined");
  const double scale = std::pow(static_cast<double>(spec.cutoff()), strichartz_exponent(spec.dim(), p, eps));
  return lp_spacetime_norm(f, p, T) / (scale * norm);
}

RatioStats strichartz_ratio(const TorusSpec& spec, double p, std::size_t samples, double T, std::uint64_t seed,
                            double eps) {
  require(p >= 2.0 * (spec.dim() + 2.0) / spec.dim(), "Strichartz ratio requires p >= 2(d+2)/d");
  require(samples >= 1, "at least one sample required");
  RatioStats stats;
  stats.seed = seed;
  const auto profiles = amplitude_profiles(0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = sample_rng(seed, i);
    const double gamma = profiles[i % profiles.size()];
    const SpectralField f = project_leq(random_field(spec, gamma, rng), spec.cutoff());
    stats.add(strichartz_ratio_of(f, p, T, eps), gamma);
  }
  return stats;
}

// ---------------------------------------------------------------------------

double l4_spacetime_norm(const Trajectory& u) {
  require(u.size() >= 2, "L^4 norm needs at least two samples");
  const double dt = u.stride();
  double total = 0.0;
  for (const auto& f : u.fields()) {
    const PhysicalField g = to_physical(f, 2);
    double acc = 0.0;
    for (cplx v : g.values) acc += std::norm(v) * std::norm(v);
    total += acc / static_cast<double>(g.point_count());
  }
  return std::pow(dt * total, 0.25);
}

double l4_xsb_ratio_of(const Trajectory& u, double b) {
  require(u.spec().dim() == 1, "L^4 Strichartz ratio is defined for d = 1");
  require(!identically_zero(u), "L^4 ratio of the zero field is undefined (0/0)");
  return l4_spacetime_norm(u) / xsb_norm(u, 0.0, b, XsbWindow::sharp);
}

RatioStats l4_xsb_ratio(std::span<const Trajectory> ensemble, double b) {
  RatioStats stats;
  for (const auto& u : ensemble) stats.add(l4_xsb_ratio_of(u, b), 0.0);
  return stats;
}

RatioStats l4_xsb_sweep(const TorusSpec& spec, std::size_t samples, double T, std::uint64_t seed, double modulation,
                        double dt) {
  require(spec.dim() == 1, "L^4 Strichartz ratio is defined for d = 1");
  if (dt <= 0.0) dt = resolving_stride(spec, modulation, 4);
  RatioStats stats;
  stats.seed = seed;
  const auto profiles = amplitude_profiles(0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = sample_rng(seed, i);
    const double gamma = profiles[i % profiles.size()];
    stats.add(l4_xsb_ratio_of(random_spacetime_field(spec, gamma, modulation, T, dt, rng)), gamma);
  }
  return stats;
}

// ---------------------------------------------------------------------------

namespace {

void check_product_range(int d, double s, double r) {
  require(s >= 0.0 && s <= d / 2.0, "product estimate requires 0 <= s <= d/2");
  if (s == 0.0)
    require(r == 1.0, "product estimate at s = 0 requires r = 1");
  else
    require(r >= 1.0 && r < d / (d - s), "product estimate requires 1 <= r < d/(d-s)");
}

// Exact product of two band-limited fields on the doubled cube.
SpectralField exact_product(const SpectralField& f, const SpectralField& u) {
  const int wide = f.spec().cutoff() + u.spec().cutoff();
  PhysicalField a = to_physical(f.resized(wide), 1);
  const PhysicalField c = to_physical(u.resized(wide), 1);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] *= c.values[i];
  return to_spectral(a);
}

}  // namespace

double product_ratio_of(const SpectralField& f, const SpectralField& u, double s, double r) {
  require(f.spec() == u.spec(), "product factors live on different tori");
  check_product_range(f.spec().dim(), s, r);
  const double denom = fl_norm(f, s, r) * sobolev_norm(u, s);
  require(denom > 0.0, "product ratio with a zero factor is undefined");
  return sobolev_norm(exact_product(f, u), s) / denom;
}

RatioStats product_ratio(const TorusSpec& spec, double s, double r, std::size_t samples, std::uint64_t seed) {
  check_product_range(spec.dim(), s, r);
  RatioStats stats;
  stats.seed = seed;
  const auto profiles = amplitude_profiles(s);
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = sample_rng(seed, i);
    const double gamma = profiles[i % profiles.size()];
    const SpectralField f = random_field(spec, gamma, rng);
    const SpectralField u = random_field(spec, gamma, rng);
    stats.add(product_ratio_of(f, u, s, r), gamma);
  }
  return stats;
}

// ---------------------------------------------------------------------------

double critical_regularity(int d, int k) { return d / 2.0 - 1.0 / k; }

namespace {

void check_multilinear_range(int d, int k, double s, double b, double b_prime) {
  require(k >= 1 && k <= 2, "multilinear estimate supports k in {1, 2}");
  require(s >= 0.0 && s > critical_regularity(d, k), "multilinear estimate requires s >= 0 and s > d/2 - 1/k");
  require(b >= 0.0 && b < 0.5, "multilinear estimate requires 0 <= b < 1/2");
  if (d == 1 && k == 1) {
    require(b >= 0.375 && b_prime <= 0.625, "cubic d = 1 estimate requires b >= 3/8 and b' <= 5/8");
  } else {
    require(b_prime > 0.5 && b_prime < 1.0, "multilinear estimate requires 1/2 < b' < 1");
  }
}

}  // namespace

Trajectory multilinear_product(std::span<const Trajectory> factors) {
  require(!factors.empty() && factors.size() % 2 == 1, "multilinear product needs an odd number of factors");
  const TorusSpec& spec = factors.front().spec();
  const std::size_t samples = factors.front().size();
  for (const auto& u : factors) {
    require(u.spec() == spec, "multilinear factors live on different tori");
    require(u.size() == samples, "multilinear factors need a common time grid");
  }
  const int wide = static_cast<int>(factors.size()) * spec.cutoff();
  const TorusSpec wide_spec = spec.with_cutoff(wide);
  Trajectory out(wide_spec);
  out.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    PhysicalField acc = to_physical(factors[0][j].resized(wide), 1);
    for (std::size_t i = 1; i < factors.size(); ++i) {
      const PhysicalField g = to_physical(factors[i][j].resized(wide), 1);
      for (std::size_t x = 0; x < acc.values.size(); ++x)
        acc.values[x] *= i % 2 == 1 ? std::conj(g.values[x]) : g.values[x];
    }
    out.append(factors[0].times()[j], to_spectral(acc));
  }
  return out;
}

double multilinear_ratio_of(std::span<const Trajectory> factors, int k, double s, double b, double b_prime) {
  require(factors.size() == static_cast<std::size_t>(2 * k + 1), "multilinear ratio needs 2k+1 factors");
  const TorusSpec& spec = factors.front().spec();
  check_multilinear_range(spec.dim(), k, s, b, b_prime);
  require(spec.cutoff() <= 8, "multilinear ratio is limited to N <= 8");
  for (const auto& u : factors)
    if (identically_zero(u)) return 0.0;

  double rhs = 1.0;
  for (const auto& u : factors) rhs *= xsb_norm(u, s, b, XsbWindow::sharp);
  const Trajectory prod = multilinear_product(factors);
  return xsb_norm(prod, s, b_prime - 1.0, XsbWindow::none) / rhs;
}

RatioStats multilinear_ratio(const TorusSpec& spec, int k, double s, double b, double b_prime, std::size_t samples,
                             std::uint64_t seed, double T, double modulation, double dt) {
  check_multilinear_range(spec.dim(), k, s, b, b_prime);
  require(spec.cutoff() <= 8, "multilinear ratio is limited to N <= 8");
  if (dt <= 0.0) dt = resolving_stride(spec, modulation, 2 * k + 2);
  RatioStats stats;
  stats.seed = seed;
  const auto profiles = amplitude_profiles(s);
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = sample_rng(seed, i);
    const double gamma = profiles[i % profiles.size()];
    std::vector<Trajectory> factors;
    for (int j = 0; j < 2 * k + 1; ++j) factors.push_back(random_spacetime_field(spec, gamma, modulation, T, dt, rng));
    stats.add(multilinear_ratio_of(factors, k, s, b, b_prime), gamma);
  }
  return stats;
}

// ---------------------------------------------------------------------------

double factorization_check(double alpha, double t, double mu) {
  require(alpha > 0.0 && alpha < 1.0, "factorization identity requires 0 < alpha < 1");
  require(mu >= 0.0 && mu < t && std::isfinite(t), "factorization identity requires 0 <= mu < t");
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double mid = 0.5 * (mu + t);

  // Left half: t' - mu = x^p, p = 1/(1-alpha), absorbs (t'-mu)^{-alpha}.
  const double p = 1.0 / (1.0 - alpha);
  auto left = [&](double x) { return p * std::pow(t - mu - std::pow(x, p), alpha - 1.0); };
  const double x_max = std::pow(mid - mu, 1.0 - alpha);

  // Right half: t - t' = y^q, q = 1/alpha, absorbs (t-t')^{alpha-1}.
  const double q = 1.0 / alpha;
  auto right = [&](double y) { return q * std::pow(t - std::pow(y, q) - mu, -alpha); };
  const double y_max = std::pow(t - mid, alpha);

  return Rule::integrate(left, 0.0, x_max, 15, 1e-14) + Rule::integrate(right, 0.0, y_max, 15, 1e-14);
}

}  // namespace snls
