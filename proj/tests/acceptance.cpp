// Acceptance run: one PASS/FAIL line per criterion.  `acceptance 3 7` runs a subset.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "snls/ensemble.hpp"
#include "snls/estimates.hpp"
#include "snls/functionals.hpp"
#include "snls/integrators.hpp"
#include "support.hpp"

using namespace snls;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpectralField exp_field(const TorusSpec& spec, double amp) {
  SpectralField f(spec);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = amp * std::exp(-std::sqrt(spec.lattice_norm_sq(n)));
  return f;
}

// ---- 1 -----------------------------------------------------------------------

Outcome deterministic_conservation() {
  constexpr double mass_tol = 1e-10, energy_tol = 1e-6;
  const TorusSpec spec(1, 32);
  StepperConfig cfg;
  cfg.dt = 1e-4;
  SolverState state = make_state(exp_field(spec, 1.0), 0, cfg);
  const double m0 = mass(state.field), e0 = energy(state.field, cfg.nl);
  double dm = 0.0, de = 0.0;
  EvolveOptions opts;
  opts.record = false;
  opts.stride = 100;
  auto track = [&](const SpectralField& u) {
    dm = std::max(dm, std::abs(mass(u) - m0) / m0);
    de = std::max(de, std::abs(energy(u, cfg.nl) - e0) / std::abs(e0));
  };
  opts.observers.push_back([&](const SolverState& s, double) { track(s.field); });
  evolve(state, cfg, 1.0, opts);
  track(state.field);
  return {dm <= mass_tol && de <= energy_tol,
          fmt("max relative drift: mass %.3e (<= %.0e), energy %.3e (<= %.0e)", dm, mass_tol, de, energy_tol)};
}

// ---- 2 -----------------------------------------------------------------------

Outcome ito_isometry() {
  constexpr double n_se = 3.0;
  const TorusSpec spec(1, 16);
  const auto op = SmoothingOperator::bracket_power(spec, 2.0);
  EnsembleConfig cfg;
  cfg.paths = 2000;
  cfg.base_seed = 20240;
  cfg.stepper.scheme = Scheme::additive_exp_euler;
  cfg.stepper.dt = 0.01;
  cfg.stepper.nl.coupling = 0.0;
  cfg.stepper.noise = NoiseSpec{NoiseMode::additive_ito, op};
  cfg.initial = SpectralField(spec);
  cfg.observables = {ObservableSpec{ObservableSpec::Kind::hs, 0.0}, ObservableSpec{ObservableSpec::Kind::hs, 1.0}};
  cfg.moments = {2};
  cfg.sup_tracking = false;
  bool ok = true;
  std::string detail;
  for (double t : {0.25, 0.5, 1.0}) {
    cfg.T = t;
    const double t_end = static_cast<double>(step_count(0.0, t, cfg.stepper.dt)) * cfg.stepper.dt;
    const EnsembleReport rep = run_ensemble(cfg);
    for (std::size_t o = 0; o < 2; ++o) {
      const double s = cfg.observables[o].s;
      const double want = 2.0 * t_end * std::pow(hs_norm(op, s), 2);
      const MomentEstimate& m = rep.moments[o];
      const double z = std::abs(m.estimate - want) / m.se;
      ok = ok && z <= n_se && m.paths == cfg.paths;
      detail += fmt("t=%.2f s=%g: %.4f vs %.4f (%.2f SE); ", t_end, s, m.estimate, want, z);
    }
  }
  return {ok, detail + fmt("bound %.0f SE", n_se)};
}

// ---- 3 -----------------------------------------------------------------------

Outcome additive_drift() {
  constexpr double n_se = 3.0;
  const TorusSpec spec(1, 16);
  EnsembleConfig cfg;
  cfg.paths = 2000;
  cfg.base_seed = 31337;
  cfg.stepper.scheme = Scheme::additive_exp_euler;
  cfg.stepper.dt = 1e-3;
  cfg.stepper.noise = NoiseSpec{NoiseMode::additive_ito, SmoothingOperator::bracket_power(spec, 2.0, 0.5)};
  cfg.initial = exp_field(spec, 0.5);
  cfg.T = 1.0;
  cfg.stride = 20;
  const DriftSeries d = drift_check(cfg);
  const double z = std::abs(d.slope - d.expected_slope) / d.slope_se;
  double worst = 0.0;
  for (const auto& p : d.points)
    if (p.se > 0.0) worst = std::max(worst, std::abs(p.r) / p.se);
  return {z <= n_se && d.paths == cfg.paths,
          fmt("slope %.5f +- %.5f vs ||phi||_HS^2 = %.5f (%.2f SE, bound %.0f); max |r(t)|/SE %.2f", d.slope,
              d.slope_se, d.expected_slope, z, n_se, worst)};
}

// ---- 4 -----------------------------------------------------------------------

Outcome strat_refinement() {
  constexpr double lo = 1.5, hi = 3.0;
  const TorusSpec spec(1, 8);
  EnsembleConfig cfg;
  cfg.paths = 50;
  cfg.base_seed = 404;
  cfg.stepper.scheme = Scheme::multiplicative_strat_midpoint;
  cfg.stepper.dt = 1e-3;
  cfg.stepper.nl.coupling = 0.0;
  cfg.stepper.noise =
      NoiseSpec{NoiseMode::multiplicative_stratonovich_real, SmoothingOperator::bracket_power(spec, 2.0, 0.5)};
  cfg.initial = exp_field(spec, 1.0);
  cfg.T = 1.0;
  cfg.stride = 100;
  const RefinementStudy st = strat_refinement_study(cfg);
  std::size_t inside = 0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, sum = 0.0;
  for (double r : st.ratios) {
    if (r >= lo && r <= hi) ++inside;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    sum += r;
  }
  const double mc = std::accumulate(st.coarse.begin(), st.coarse.end(), 0.0) / st.coarse.size();
  const double mf = std::accumulate(st.fine.begin(), st.fine.end(), 0.0) / st.fine.size();
  return {inside == st.ratios.size(),
          fmt("%zu/%zu per-path ratios in [%.1f, %.1f]; range [%.3f, %.3f], mean %.3f; mean drift %.3e -> %.3e",
              inside, st.ratios.size(), lo, hi, rmin, rmax, sum / st.ratios.size(), mc, mf)};
}

// ---- 5 -----------------------------------------------------------------------

Outcome factorization() {
  constexpr double tol = 1e-6;
  double worst = 0.0;
  for (auto [t, mu] : {std::pair{1.0, 0.0}, std::pair{3.5, 1.2}})
    for (int i = 1; i <= 9; ++i) {
      const double a = 0.1 * i;
      worst = std::max(worst, std::abs(factorization_check(a, t, mu) - std::numbers::pi / std::sin(std::numbers::pi * a)));
    }
  return {worst <= tol, fmt("max |quadrature - pi/sin(pi alpha)| = %.3e (<= %.0e)", worst, tol)};
}

// ---- 6 -----------------------------------------------------------------------

Outcome tau_monotone() {
  const TorusSpec spec(1, 8);
  EnsembleConfig cfg;
  cfg.paths = 100;
  cfg.base_seed = 66;
  cfg.stepper.scheme = Scheme::multiplicative_ito_euler;
  cfg.stepper.dt = 0.01;
  cfg.stepper.noise = NoiseSpec{NoiseMode::multiplicative_ito, SmoothingOperator::bracket_power(spec, 2.0, 0.5)};
  cfg.initial = exp_field(spec, 1.0);
  cfg.T = 1.0;
  const TauTable t = tau_monotonicity_check(cfg, {0.1, 1.0, 10.0}, 0.0, 0.375);
  std::size_t reached[3] = {0, 0, 0};
  for (const auto& row : t.tau)
    for (int j = 0; j < 3; ++j) reached[j] += row[j].has_value();
  return {t.violations == 0 && t.tau.size() == cfg.paths,
          fmt("%zu violations over %zu paths; tau reached before T for R=0.1/1/10: %zu/%zu/%zu", t.violations,
              t.tau.size(), reached[0], reached[1], reached[2])};
}

// ---- 7 -----------------------------------------------------------------------

struct Pilot {
  std::vector<int> N;
  std::vector<double> max;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

Pilot load_pilot(const std::string& name) {
  std::ifstream is(std::string(SNLS_TEST_DATA) + "/pilot_" + name + ".json");
  if (!is) throw std::runtime_error("missing pilot file for " + name);
  const auto j = nlohmann::json::parse(is);
  Pilot p;
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("sweep")) {
    p.N.push_back(e.at("N").get<int>());
    p.max.push_back(e.at("max").get<double>());
    p.samples = e.at("samples").get<std::size_t>();
  }
  return p;
}

Outcome estimate_sweeps() {
  constexpr double growth = 1.10;
  constexpr double modulation = 10.0;
  bool ok = true;
  std::string detail;
  for (const std::string name : {"strichartz", "l4", "product"}) {
    const Pilot pilot = load_pilot(name);
    const int n_max = *std::max_element(pilot.N.begin(), pilot.N.end());
    const double threshold = growth * pilot.max.front();
    detail += name + ":";
    for (std::size_t i = 0; i < pilot.N.size(); ++i) {
      const TorusSpec spec(1, pilot.N[i]);
      RatioStats st;
      if (name == "strichartz") st = strichartz_ratio(spec, 6.0, pilot.samples, 1.0, pilot.seed);
      else if (name == "l4")
        st = l4_xsb_sweep(spec, pilot.samples, 1.0, pilot.seed, modulation,
                          resolving_stride(TorusSpec(1, n_max), modulation, 4));
      else st = product_ratio(spec, 0.4, 1.5, pilot.samples, pilot.seed);
      const bool reproduces = std::abs(st.max - pilot.max[i]) <= 1e-9 * pilot.max[i];
      ok = ok && reproduces && st.max <= threshold;
      detail += fmt(" N=%d %.4f%s", pilot.N[i], st.max, reproduces ? "" : " (differs from pilot)");
    }
    detail += fmt(" (threshold %.4f); ", threshold);
  }
  return {ok, detail + fmt("growth bound %.0f%% over N=8", 100.0 * (growth - 1.0))};
}

// ---- 8 -----------------------------------------------------------------------

// Squared discrete X^{0,b} norm of the constant-in-time sample sequence e_n on
// [0, L dt): dt^2 dnu sum_m <tau_m>^{2b} |dt^{-1} sum_j z^j|^2, z = exp(-i(w + tau_m) dt).
double constant_mode_xsb2(double w, double b, std::size_t L, double dt) {
  const TimeFrequencyGrid g = time_frequency_grid(L, dt);
  double acc = 0.0;
  for (double tau : g.tau) {
    const cplx z = std::polar(1.0, -(w + tau) * dt);
    const cplx geo = std::abs(1.0 - z) < 1e-13 ? cplx(static_cast<double>(L)) : (1.0 - std::pow(z, L)) / (1.0 - z);
    acc += std::pow(1.0 + tau * tau, b) * std::norm(geo);
  }
  return acc * dt * dt * g.dnu;
}

Outcome multilinear_closed_form() {
  constexpr double tol = 1e-6;
  const TorusSpec spec(1, 4);
  const double s = 0.2, b = 0.375, bp = 0.625, T = 1.0, dt = 0.01;
  const auto L = static_cast<std::size_t>(std::llround(T / dt));
  double worst = 0.0;
  for (auto modes : {std::array{1, -2, 3}, std::array{4, 4, 4}, std::array{0, 3, -2}, std::array{-4, 4, -4}}) {
    std::vector<Trajectory> factors;
    double den = 1.0;
    for (int n : modes) {
      Trajectory u(spec);
      for (std::size_t j = 0; j < L; ++j) u.append(j * dt, SpectralField::single_mode(spec, {n, 0, 0}));
      factors.push_back(std::move(u));
      den *= std::pow(1.0 + n * n, s / 2) * std::sqrt(constant_mode_xsb2(double(n) * n, b, L, dt));
    }
    const int m = modes[0] - modes[1] + modes[2];
    const double num = std::pow(1.0 + m * m, s / 2) * std::sqrt(constant_mode_xsb2(double(m) * m, bp - 1.0, L, dt));
    const double got = multilinear_ratio_of(factors, 1, s, b, bp);
    worst = std::max(worst, std::abs(got - num / den) / (num / den));
  }
  return {worst <= tol, fmt("max relative deviation from the closed form %.3e (<= %.0e)", worst, tol)};
}

// ---- 9 -----------------------------------------------------------------------

Outcome truncation_agreement() {
  constexpr double tol = 1e-12;
  const TorusSpec spec(1, 16);
  StepperConfig cfg;
  cfg.scheme = Scheme::additive_exp_euler;
  cfg.dt = 5e-3;
  cfg.noise = NoiseSpec{NoiseMode::additive_ito, SmoothingOperator::bracket_power(spec, 2.0, 0.5)};
  const SpectralField u0 = exp_field(spec, 1.0);
  const double s = 0.5, b = 0.375, T = 0.5;
  SolverState plain = make_state(u0, 9, cfg);
  const EvolveResult a = evolve(plain, cfg, T);
  const double R = 2.0 * xsb_norm(a.trajectory, s, b);
  SolverState cut = make_state(u0, 9, cfg);
  const TruncatedResult t = evolve_truncated(cut, cfg, R, s, b, T);
  double worst = 0.0;
  bool same = a.trajectory.size() == t.run.trajectory.size();
  for (std::size_t j = 0; same && j < a.trajectory.size(); ++j)
    worst = std::max(worst, max_abs_difference(a.trajectory[j], t.run.trajectory[j]));
  worst = std::max(worst, max_abs_difference(plain.field, cut.field));
  return {same && !t.tau && worst <= tol,
          fmt("R = %.3f (2x the run's X^{%.1f,%.3f} norm), %zu samples, max difference %.3e (<= %.0e)", R, s, b,
              a.trajectory.size(), worst, tol)};
}

// ---- 10 ----------------------------------------------------------------------

Outcome dealias_convolution() {
  constexpr double tol = 1e-10;
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (auto [d, N] : {std::pair{1, 8}, std::pair{2, 2}, std::pair{2, 4}})
    for (int k = 1; k <= 2; ++k) {
      if (d == 2 && N == 4 && k == 2) continue;
      const TorusSpec spec(d, N);
      const SpectralField f = testing::random_field(spec, rng, 0.5);
      NonlinearitySpec nl;
      nl.k = k;
      worst = std::max(worst, relative_distance(nonlinear_term(f, nl, Dealias::on),
                                                testing::brute_force_nonlinearity(f, k, 1.0)));
    }
  return {worst <= tol, fmt("max relative l2 distance %.3e (<= %.0e)", worst, tol)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "deterministic conservation", 60, deterministic_conservation},
      {2, "Ito isometry", 120, ito_isometry},
      {3, "additive mass drift", 600, additive_drift},
      {4, "Stratonovich mass conservation", 300, strat_refinement},
      {5, "factorization identity", 1, factorization},
      {6, "tau_R monotonicity", 300, tau_monotone},
      {7, "estimate sweeps", 900, estimate_sweeps},
      {8, "multilinear closed form", 10, multilinear_closed_form},
      {9, "truncated vs untruncated", 60, truncation_agreement},
      {10, "dealiased nonlinearity", 30, dealias_convolution},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.time_limit;
    failures += !pass;
    std::printf("%s %2d %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.time_limit);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
