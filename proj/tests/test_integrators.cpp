#include <doctest.h>

#include <cmath>

#include "snls/error.hpp"
#include "snls/functionals.hpp"
#include "snls/integrators.hpp"
#include "support.hpp"

using namespace snls;

namespace {

StepperConfig strang(double dt, double coupling = 1.0) {
  StepperConfig c;
  c.dt = dt;
  c.nl.coupling = coupling;
  return c;
}

StepperConfig noisy(Scheme scheme, NoiseMode mode, SmoothingOperator op, double dt, double coupling) {
  StepperConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.nl.coupling = coupling;
  c.noise = NoiseSpec{mode, std::move(op)};
  return c;
}

SpectralField smooth_field(const TorusSpec& spec, double amp) {
  SpectralField f(spec);
  for (std::size_t n = 0; n < f.size(); ++n)
    f[n] = amp * std::exp(-std::sqrt(spec.lattice_norm_sq(n))) * std::polar(1.0, 0.3 * static_cast<double>(n));
  return f;
}

double run_to(SpectralField u0, const StepperConfig& cfg, double T, std::uint64_t seed, SpectralField* out) {
  SolverState s = make_state(std::move(u0), seed, cfg);
  EvolveOptions opts;
  opts.record = false;
  evolve(s, cfg, T, opts);
  if (out) *out = s.field;
  return mass(s.field);
}

}  // namespace

TEST_CASE("eta cutoff") {
  CHECK(eta(0.0) == 1.0);
  CHECK(eta(0.7) == 1.0);
  CHECK(eta(1.0) == 1.0);
  CHECK(eta(2.0) == 0.0);
  CHECK(eta(5.0) == 0.0);
  CHECK(eta(-1.0) == 0.0);
  CHECK(eta(-0.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double x = 1.0; x <= 2.0; x += 0.01) {
    const double e = eta(x);
    CHECK(e <= prev + 1e-15);
    CHECK(e >= 0.0);
    prev = e;
  }
  // C^1 and C^2 joins at the plateau edge.
  const double h = 1e-4;
  CHECK(std::abs(eta(1.0 + h) - 1.0) < 1e-10);
  CHECK(std::abs(eta(2.0 - h)) < 1e-10);
}

TEST_CASE("local_window") {
  const double theta = 2.0 * 1 / 0.25;
  CHECK(theta == 8.0);
  const double w1 = local_window(1.0, 0.5, 2.0, theta);
  const double w2 = local_window(2.0, 1.0, 2.0, theta);
  CHECK(w1 / w2 == doctest::Approx(std::pow(2.0, theta)));
  CHECK(local_window(1.1, 0.5, 2.0, theta) < w1);
  CHECK(local_window(1.0, 0.6, 2.0, theta) < w1);
  CHECK_THROWS_AS(local_window(0.0, 1.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("config validation") {
  StepperConfig c = strang(0.01);
  CHECK_NOTHROW(c.validate());
  c.noise = NoiseSpec{NoiseMode::additive_ito, SmoothingOperator::zero(TorusSpec(1, 2))};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.scheme = Scheme::additive_exp_euler;
  CHECK_NOTHROW(c.validate());
  c.scheme = Scheme::multiplicative_ito_euler;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = strang(0.0);
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = strang(0.1);
  c.midpoint_iterations = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("step counts and observer calls") {
  const TorusSpec spec(1, 2);
  const auto cfg = strang(0.1);
  SolverState s = make_state(SpectralField::constant(spec, 1.0), 0, cfg);
  EvolveOptions opts;
  opts.stride = 3;
  std::size_t calls = 0;
  opts.observers.push_back([&](const SolverState&, double) { ++calls; });
  const auto res = evolve(s, cfg, 1.0, opts);
  CHECK(res.steps == 10);
  CHECK(calls == 4);
  CHECK(res.observer_calls == 4);
  CHECK(res.trajectory.size() == 4);
  CHECK(res.trajectory.times()[1] == doctest::Approx(0.3));
  CHECK(s.time(cfg.dt) == doctest::Approx(1.0));
  const auto none = evolve(s, cfg, 1.0, opts);
  CHECK(none.steps == 0);
  CHECK(none.observer_calls == 0);
  CHECK_THROWS_AS(evolve(s, cfg, 0.5, opts), InvalidInput);
}

TEST_CASE("strang: scalar ODE closed form") {
  const TorusSpec spec(1, 0);
  const cplx c(0.8, 0.6);
  for (auto sign : {NonlinearitySpec::Sign::defocusing, NonlinearitySpec::Sign::focusing}) {
    auto cfg = strang(1e-3, 1.5);
    cfg.nl.sign = sign;
    SpectralField out(spec);
    run_to(SpectralField::constant(spec, c), cfg, 1.0, 0, &out);
    const double g = sign == NonlinearitySpec::Sign::defocusing ? 1.5 : -1.5;
    CHECK(std::abs(out[0] - c * std::polar(1.0, g * std::norm(c) * 1.0)) < 1e-10);
  }
}

TEST_CASE("strang conserves mass and energy") {
  const TorusSpec spec(1, 16);
  const auto u0 = smooth_field(spec, 1.0);
  auto cfg = strang(1e-4);
  SpectralField out(spec);
  const double m = run_to(u0, cfg, 1.0, 0, &out);
  CHECK(std::abs(m - mass(u0)) <= 1e-12 * mass(u0));
  CHECK(std::abs(energy(out, cfg.nl) - energy(u0, cfg.nl)) <= 1e-6 * std::abs(energy(u0, cfg.nl)));

  // second order: halving dt quarters the energy error
  auto err = [&](double dt) {
    SpectralField o(spec);
    run_to(u0, strang(dt), 0.5, 0, &o);
    return std::abs(energy(o, cfg.nl) - energy(u0, cfg.nl));
  };
  CHECK(err(2e-3) / err(1e-3) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("zero-noise degeneracy of the noisy schemes") {
  const TorusSpec spec(1, 6);
  const auto u0 = smooth_field(spec, 0.8);
  const auto zero = SmoothingOperator::zero(spec);
  const auto add = noisy(Scheme::additive_exp_euler, NoiseMode::additive_ito, zero, 1e-3, 1.0);
  const auto ito = noisy(Scheme::multiplicative_ito_euler, NoiseMode::multiplicative_ito, zero, 1e-3, 1.0);
  SolverState a = make_state(u0, 3, add), b = make_state(u0, 3, ito);
  SpectralField manual = u0;
  for (int i = 0; i < 50; ++i) {
    step(a, add);
    step(b, ito);
    SpectralField n = project_leq(nonlinear_term(manual, add.nl, Dealias::on), spec.cutoff());
    for (std::size_t j = 0; j < n.size(); ++j) manual[j] += cplx(0.0, 1e-3) * n[j];
    apply_semigroup_inplace(manual, 1e-3);
    CHECK(max_abs_difference(a.field, b.field) < 1e-12);
    CHECK(max_abs_difference(a.field, manual) < 1e-12);
  }
}

TEST_CASE("additive exponential Euler: strong order on coupled noise") {
  const TorusSpec spec(1, 4);
  const auto op = SmoothingOperator::bracket_power(spec, 1.0, 0.5);
  const auto u0 = smooth_field(spec, 0.5);
  const double T = 0.5, dt = 0.02;
  // Reference at dt/8; the coarse runs sum 8 and 4 sub-increments.
  auto error = [&](double coupling, int paths) {
    double e1 = 0.0, e2 = 0.0;
    for (int p = 0; p < paths; ++p) {
      auto ref = noisy(Scheme::additive_exp_euler, NoiseMode::additive_ito, op, dt / 8, coupling);
      SpectralField r(spec), c1(spec), c2(spec);
      run_to(u0, ref, T, p, &r);
      auto k1 = ref;
      k1.dt = dt;
      k1.noise_refinement = 3;
      run_to(u0, k1, T, p, &c1);
      auto k2 = ref;
      k2.dt = dt / 2;
      k2.noise_refinement = 2;
      run_to(u0, k2, T, p, &c2);
      e1 += std::pow(testing::l2(c1 - r), 2);
      e2 += std::pow(testing::l2(c2 - r), 2);
    }
    // Errors against a dt/8 reference: e(dt)/e(dt/2) = 2 for order 1 scales as (1 - 1/8)/(1/2 - 1/8).
    return std::sqrt(e1 / e2);
  };
  const double linear = error(0.0, 20);
  const double nonlinear = error(1.0, 20);
  CHECK(linear > 1.8);
  CHECK(nonlinear > std::sqrt(2.0) * 0.9);
}

TEST_CASE("multiplicative Ito: mean mass grows by the Ito correction") {
  // N = 0, phi = 1, no nonlinearity: |u_{n+1}|^2 = |u_n|^2 |1 - i dbeta|^2, so
  // E M(t_n) = M(0) (1 + 2 dt)^n exactly.
  const TorusSpec spec(1, 0);
  const auto op = SmoothingOperator::diagonal(spec, {1.0});
  const auto cfg = noisy(Scheme::multiplicative_ito_euler, NoiseMode::multiplicative_ito, op, 0.01, 0.0);
  const std::size_t paths = 4000;
  std::vector<double> ms;
  for (std::size_t p = 0; p < paths; ++p) ms.push_back(run_to(SpectralField::constant(spec, 1.0), cfg, 0.5, p, nullptr));
  double mean = 0.0, var = 0.0;
  for (double m : ms) mean += m;
  mean /= paths;
  for (double m : ms) var += (m - mean) * (m - mean);
  const double se = std::sqrt(var / (paths - 1) / paths);
  const double want = 0.5 * std::pow(1.02, 50);
  CHECK(std::abs(mean - want) < 3.0 * se);
  CHECK(mean > 0.5 + 5.0 * se);
}

TEST_CASE("Stratonovich midpoint: mass drift is O(dt), Ito control is not") {
  const TorusSpec spec(1, 4);
  const auto op = SmoothingOperator::bracket_power(spec, 2.0, 0.5);
  const auto u0 = smooth_field(spec, 1.0);
  auto strat = noisy(Scheme::multiplicative_strat_midpoint, NoiseMode::multiplicative_stratonovich_real, op, 0.01, 0.0);
  auto ito = noisy(Scheme::multiplicative_ito_euler, NoiseMode::multiplicative_ito, op, 0.01, 0.0);
  double d_strat = 0.0, d_fine = 0.0, d_ito = 0.0;
  const int paths = 10;
  for (int p = 0; p < paths; ++p) {
    auto coarse = strat;
    coarse.noise_refinement = 1;
    d_strat += std::abs(run_to(u0, coarse, 1.0, p, nullptr) - mass(u0)) / mass(u0);
    auto fine = strat;
    fine.dt = 0.005;
    d_fine += std::abs(run_to(u0, fine, 1.0, p, nullptr) - mass(u0)) / mass(u0);
    d_ito += std::abs(run_to(u0, ito, 1.0, p, nullptr) - mass(u0)) / mass(u0);
  }
  CHECK(d_strat / paths < 1.0 * 0.01);
  CHECK(d_strat / d_fine > 1.5);
  CHECK(d_ito > 20.0 * d_strat);

  // Many sweeps approach the exact midpoint, which conserves mass to round-off.
  strat.midpoint_iterations = 30;
  CHECK(std::abs(run_to(u0, strat, 1.0, 1, nullptr) - mass(u0)) < 1e-12);
}

TEST_CASE("truncated evolution") {
  const TorusSpec spec(1, 6);
  const auto op = SmoothingOperator::bracket_power(spec, 1.5, 0.3);
  const auto u0 = smooth_field(spec, 0.7);
  const auto cfg = noisy(Scheme::multiplicative_ito_euler, NoiseMode::multiplicative_ito, op, 0.01, 1.0);

  SUBCASE("large R reproduces the untruncated run") {
    SolverState a = make_state(u0, 4, cfg), b = make_state(u0, 4, cfg);
    const auto plain = evolve(a, cfg, 0.5);
    const auto trunc = evolve_truncated(b, cfg, 1e6, 0.0, 0.375, 0.5);
    CHECK_FALSE(trunc.tau.has_value());
    REQUIRE(plain.trajectory.size() == trunc.run.trajectory.size());
    for (std::size_t j = 0; j < plain.trajectory.size(); ++j)
      CHECK(max_abs_difference(plain.trajectory[j], trunc.run.trajectory[j]) <= 1e-12);
    CHECK(b.cutoff->running_norm > 0.0);
  }
  SUBCASE("tiny R switches the nonlinearity off") {
    auto linear = cfg;
    linear.nl.coupling = 0.0;
    SolverState a = make_state(u0, 4, linear), b = make_state(u0, 4, cfg);
    evolve(a, linear, 0.3);
    const auto trunc = evolve_truncated(b, cfg, 1e-9, 0.0, 0.25, 0.3);
    REQUIRE(trunc.tau.has_value());
    CHECK(*trunc.tau == 0.0);
    CHECK(max_abs_difference(a.field, b.field) <= 1e-14);
  }
  SUBCASE("halting at tau") {
    SolverState s = make_state(u0, 4, cfg);
    CutoffState c;
    c.history = Trajectory(spec);
    c.halt_at_tau = true;
    s.cutoff = std::move(c);
    const auto trunc = evolve_truncated(s, cfg, 0.2, 0.0, 0.25, 1.0);
    REQUIRE(trunc.tau.has_value());
    CHECK(*trunc.tau < 1.0);
    CHECK(trunc.run.steps < 100);
    CHECK_THROWS_AS(step(s, cfg), StateError);
  }
  CHECK_THROWS_AS(
      [&] {
        SolverState s = make_state(u0, 4, cfg);
        evolve_truncated(s, cfg, 1.0, 0.0, 0.5, 0.1);
      }(),
      InvalidInput);
}

TEST_CASE("blow-up is detected and the state refuses further steps") {
  const TorusSpec spec(1, 2);
  auto cfg = noisy(Scheme::additive_exp_euler, NoiseMode::additive_ito, SmoothingOperator::zero(spec), 0.1, 1.0);
  cfg.nl.k = 2;
  cfg.nl.sign = NonlinearitySpec::Sign::focusing;
  SolverState s = make_state(SpectralField::constant(spec, 10.0), 0, cfg);
  const auto res = evolve(s, cfg, 10.0);
  CHECK(res.blew_up);
  REQUIRE(res.blowup_time.has_value());
  CHECK(*res.blowup_time <= 1.0);
  CHECK(s.field.is_finite());
  CHECK_THROWS_AS(step(s, cfg), StateError);
}

TEST_CASE("same seed, same path") {
  const TorusSpec spec(2, 3);
  const auto op = SmoothingOperator::bracket_power(spec, 1.0, 0.2);
  const auto cfg = noisy(Scheme::additive_exp_euler, NoiseMode::additive_ito, op, 0.01, 1.0);
  SpectralField a(spec), b(spec), c(spec);
  run_to(smooth_field(spec, 0.5), cfg, 0.2, 9, &a);
  run_to(smooth_field(spec, 0.5), cfg, 0.2, 9, &b);
  run_to(smooth_field(spec, 0.5), cfg, 0.2, 10, &c);
  CHECK(max_abs_difference(a, b) == 0.0);
  CHECK(max_abs_difference(a, c) > 0.0);
}
