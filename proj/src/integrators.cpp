#include "snls/integrators.hpp"

#include <cmath>

#include "snls/error.hpp"

namespace snls {

void StepperConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "time step dt must be > 0");
  nl.validate();
  require(midpoint_iterations >= 1 && midpoint_iterations <= 64, "midpoint iterations must be in [1, 64]");
  require(noise_refinement >= 0 && noise_refinement <= 20, "noise refinement must be in [0, 20]");
  if (noise) noise->validate();
  switch (scheme) {
    case Scheme::deterministic_strang:
      require(!noise.has_value(), "deterministic-strang takes no noise");
      break;
    case Scheme::additive_exp_euler:
      require(noise && noise->mode == NoiseMode::additive_ito, "additive-exp-euler requires additive noise");
      break;
    case Scheme::multiplicative_ito_euler:
      require(noise && noise->mode == NoiseMode::multiplicative_ito,
              "multiplicative-ito-euler requires multiplicative Ito noise");
      break;
    case Scheme::multiplicative_strat_midpoint:
      require(noise && noise->mode == NoiseMode::multiplicative_stratonovich_real,
              "multiplicative-strat-midpoint requires real Stratonovich noise");
      break;
  }
}

double eta(double x) {
  auto smoothstep = [](double y) { return y * y * y * (10.0 + y * (-15.0 + 6.0 * y)); };
  if (x >= 0.0 && x <= 1.0) return 1.0;
  if (x <= -1.0 || x >= 2.0) return 0.0;
  if (x < 0.0) return smoothstep(x + 1.0);
  return smoothstep(2.0 - x);
}

SolverState make_state(SpectralField u0, std::uint64_t seed, const StepperConfig& cfg, double t0) {
  require(std::isfinite(t0), "initial time must be finite");
  require(u0.is_finite(), "initial field must be finite");
  const bool real_noise = cfg.noise && cfg.noise->real_valued();
  WienerState w(u0.spec(), seed, real_noise, cfg.noise_refinement);
  return SolverState{std::move(u0), t0, 0, std::move(w), std::nullopt, false, std::nullopt};
}

std::size_t step_count(double t, double T_end, double dt) {
  require(T_end >= t, "T_end must not precede the current time");
  const double ratio = (T_end - t) / dt;
  return static_cast<std::size_t>(std::ceil(ratio - 1e-9));
}

namespace {

// Dealiased product u * g projected back to the cube of u.
SpectralField multiply(const SpectralField& u, const PhysicalField& g) {
  PhysicalField p = to_physical(u, g.pad);
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] *= g.values[i];
  return to_spectral(p);
}

SpectralField euler_nonlinear(const SpectralField& u, const NonlinearitySpec& nl, double dt, Dealias dealias) {
  SpectralField w = u;
  if (nl.coupling == 0.0) return w;
  const SpectralField n = project_leq(nonlinear_term(u, nl, dealias), u.spec().cutoff());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += cplx(0.0, dt) * n[i];
  return w;
}

SpectralField noise_forcing(const NoiseSpec& noise, WienerState& w, double dt) {
  const auto inc = w.sample_increment(dt);
  return SpectralField(noise.op.spec(), noise.op.apply(inc));
}

// Midpoint rule x = v - i P[((v + x)/2) g] by fixed-point sweeps from x = v.
SpectralField stratonovich_midpoint(const SpectralField& v, const SpectralField& forcing, int sweeps) {
  const PhysicalField g = to_physical(forcing, 2);
  SpectralField x = v;
  for (int it = 0; it < sweeps; ++it) {
    SpectralField mid = v;
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (v[i] + x[i]);
    const SpectralField prod = multiply(mid, g);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = v[i] - cplx(0.0, 1.0) * prod[i];
  }
  return x;
}

// Effective nonlinearity after the eta_R cutoff; updates the running norm.
NonlinearitySpec cutoff_nonlinearity(SolverState& state, const StepperConfig& cfg) {
  if (!state.cutoff) return cfg.nl;
  CutoffState& c = *state.cutoff;
  const double t = state.time(cfg.dt);
  c.history.append(t, state.field);
  if (c.steps_since_refresh % c.refresh_stride == 0)
    c.running_norm = xsb_norm_prefix(c.history, c.history.size(), c.s, c.b, XsbWindow::sharp, 4, cfg.dt);
  ++c.steps_since_refresh;
  if (!c.stopped && c.running_norm >= c.R) {
    c.stopped = true;
    c.tau = t;
  }
  const double factor = std::pow(eta(c.running_norm / c.R), 2 * cfg.nl.k + 1);
  return cfg.nl.scaled(factor);
}

}  // namespace

void step(SolverState& state, const StepperConfig& cfg) {
  if (state.blown_up) throw StateError("cannot step a blown-up path");
  if (state.cutoff && state.cutoff->halt_at_tau && state.cutoff->stopped)
    throw StateError("truncated path halted at its stopping time");
  if (cfg.noise) require(cfg.noise->op.spec() == state.field.spec(), "noise operator and state live on different tori");

  const double dt = cfg.dt;
  const NonlinearitySpec nl = cutoff_nonlinearity(state, cfg);
  if (state.cutoff && state.cutoff->halt_at_tau && state.cutoff->stopped) return;

  const SpectralField& u = state.field;
  SpectralField next(u.spec());
  switch (cfg.scheme) {
    case Scheme::deterministic_strang: {
      next = nonlinear_phase_flow(u, nl, 0.5 * dt, cfg.dealias);
      apply_semigroup_inplace(next, dt);
      next = nonlinear_phase_flow(next, nl, 0.5 * dt, cfg.dealias);
      break;
    }
    case Scheme::additive_exp_euler: {
      next = euler_nonlinear(u, nl, dt, cfg.dealias);
      apply_semigroup_inplace(next, dt);
      const SpectralField forcing = noise_forcing(*cfg.noise, state.wiener, dt);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= cplx(0.0, 1.0) * forcing[i];
      break;
    }
    case Scheme::multiplicative_ito_euler: {
      next = euler_nonlinear(u, nl, dt, cfg.dealias);
      const SpectralField forcing = noise_forcing(*cfg.noise, state.wiener, dt);
      const SpectralField prod = multiply(u, to_physical(forcing, 2));
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= cplx(0.0, 1.0) * prod[i];
      apply_semigroup_inplace(next, dt);
      break;
    }
    case Scheme::multiplicative_strat_midpoint: {
      next = nonlinear_phase_flow(u, nl, 0.5 * dt, cfg.dealias);
      const SpectralField forcing = noise_forcing(*cfg.noise, state.wiener, dt);
      next = stratonovich_midpoint(next, forcing, cfg.midpoint_iterations);
      apply_semigroup_inplace(next, dt);
      next = nonlinear_phase_flow(next, nl, 0.5 * dt, cfg.dealias);
      break;
    }
  }

  ++state.steps;
  if (!next.is_finite()) {
    state.blown_up = true;
    state.blowup_time = state.time(dt);
    return;
  }
  state.field = std::move(next);
}

EvolveResult evolve(SolverState& state, const StepperConfig& cfg, double T_end, const EvolveOptions& opts) {
  cfg.validate();
  require(opts.stride >= 1, "observer stride must be >= 1");
  const double t_start = state.time(cfg.dt);
  const std::size_t n = step_count(t_start, T_end, cfg.dt);

  EvolveResult result{Trajectory(state.field.spec())};
  if (opts.record) result.trajectory.reserve(n / opts.stride + 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j % opts.stride == 0) {
      const double t = state.time(cfg.dt);
      if (opts.record) result.trajectory.append(t, state.field);
      for (const auto& obs : opts.observers) obs(state, t);
      ++result.observer_calls;
    }
    if (state.cutoff && state.cutoff->halt_at_tau && state.cutoff->stopped) break;
    const std::size_t before = state.steps;
    step(state, cfg);
    if (state.steps == before) break;
    ++result.steps;
    if (state.blown_up) {
      result.blew_up = true;
      result.blowup_time = state.blowup_time;
      break;
    }
  }
  return result;
}

TruncatedResult evolve_truncated(SolverState& state, const StepperConfig& cfg, double R, double s, double b,
                                 double T_end, const EvolveOptions& opts, std::size_t refresh_stride) {
  require(R > 0.0, "truncation radius R must be > 0");
  require(b >= 0.0 && b < 0.5, "truncated evolution requires 0 <= b < 1/2");
  require(refresh_stride >= 1, "norm refresh stride must be >= 1");
  if (!state.cutoff) {
    CutoffState c;
    c.history = Trajectory(state.field.spec());
    state.cutoff = std::move(c);
  }
  state.cutoff->R = R;
  state.cutoff->s = s;
  state.cutoff->b = b;
  state.cutoff->refresh_stride = refresh_stride;
  TruncatedResult out{evolve(state, cfg, T_end, opts), std::nullopt};
  out.tau = state.cutoff->tau;
  return out;
}

double local_window(double u0_norm, double psi_norm, double c, double theta) {
  require(u0_norm > 0.0 && psi_norm > 0.0 && c > 0.0 && theta > 0.0, "local_window inputs must be positive");
  return c * std::pow(u0_norm + psi_norm, -theta);
}

}  // namespace snls
