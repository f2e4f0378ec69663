#pragma once

// Time stepping for the frequency-truncated equation
//
//   i u_t - Delta u +- |u|^{2k} u = F(u, phi xi)
//
// in mild (Duhamel) form u_t = i omega u + i g |u|^{2k}u - i F with
// g = +coupling (defocusing) or -coupling (focusing).  The free propagator is
// always applied exactly in spectral space.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "snls/functionals.hpp"
#include "snls/noise.hpp"
#include "snls/torus.hpp"

namespace snls {

enum class Scheme { deterministic_strang, additive_exp_euler, multiplicative_ito_euler, multiplicative_strat_midpoint };

struct StepperConfig {
  Scheme scheme = Scheme::deterministic_strang;
  double dt = 1e-3;
  Dealias dealias = Dealias::on;
  NonlinearitySpec nl{};
  std::optional<NoiseSpec> noise;
  // Fixed-point sweeps of the Stratonovich midpoint product.
  int midpoint_iterations = 2;
  // Each noise increment is the sum of 2^r finer sub-increments.
  int noise_refinement = 0;

  void validate() const;
};

// Smooth cutoff with eta = 1 on [0,1], eta = 0 outside [-1,2]; C^2 smoothstep joins.
double eta(double x);

// Running-norm cutoff state for the eta_R-truncated equation.
struct CutoffState {
  double R = 1.0;
  double s = 0.0;
  double b = 0.0;
  std::size_t refresh_stride = 1;
  // Refuse further steps once tau_R has been reached.
  bool halt_at_tau = false;

  double running_norm = 0.0;
  bool stopped = false;
  std::optional<double> tau;
  std::size_t steps_since_refresh = 0;
  Trajectory history{TorusSpec(1, 0)};
};

struct SolverState {
  SpectralField field;
  double t0 = 0.0;
  std::size_t steps = 0;
  WienerState wiener;
  std::optional<CutoffState> cutoff;
  bool blown_up = false;
  std::optional<double> blowup_time;

  double time(double dt) const { return t0 + static_cast<double>(steps) * dt; }
};

SolverState make_state(SpectralField u0, std::uint64_t seed, const StepperConfig& cfg, double t0 = 0.0);

// One step of the configured scheme; mutates the state in place.  Sets
// blown_up (and returns normally) when the new field is not finite.
void step(SolverState& state, const StepperConfig& cfg);

using Observer = std::function<void(const SolverState& state, double t)>;

struct EvolveOptions {
  std::size_t stride = 1;
  std::vector<Observer> observers;
  bool record = true;
};

struct EvolveResult {
  Trajectory trajectory;
  std::size_t steps = 0;
  std::size_t observer_calls = 0;
  bool blew_up = false;
  std::optional<double> blowup_time;
};

// Steps until the clock is within dt of T_end.  Observers (and the recorded
// trajectory) see the state before steps 0, stride, 2*stride, ...
EvolveResult evolve(SolverState& state, const StepperConfig& cfg, double T_end, const EvolveOptions& opts = {});

struct TruncatedResult {
  EvolveResult run;
  std::optional<double> tau;
};

// evolve with the nonlinearity multiplied by eta(||u||_{X^{s,b}([0,t])} / R)^{2k+1}.
TruncatedResult evolve_truncated(SolverState& state, const StepperConfig& cfg, double R, double s, double b,
                                 double T_end, const EvolveOptions& opts = {}, std::size_t refresh_stride = 1);

// c (u0_norm + psi_norm)^{-theta}
double local_window(double u0_norm, double psi_norm, double c, double theta);

// Number of steps evolve takes from t to T_end.
std::size_t step_count(double t, double T_end, double dt);

}  // namespace snls
