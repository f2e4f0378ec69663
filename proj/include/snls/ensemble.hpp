#pragma once

// Monte Carlo over independent noise paths.  Path i uses seed base ^ i and
// results are merged in path order, so reports do not depend on threading.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snls/integrators.hpp"

namespace snls {

struct ObservableSpec {
  enum class Kind { mass, energy, hs };
  Kind kind = Kind::mass;
  double s = 0.0;  // hs only

  std::string name() const;
  double evaluate(const SpectralField& u, const NonlinearitySpec& nl) const;
};

struct EnsembleConfig {
  std::size_t paths = 1;
  std::uint64_t base_seed = 0;
  StepperConfig stepper;
  SpectralField initial{TorusSpec(1, 0)};
  double T = 1.0;
  std::vector<ObservableSpec> observables{ObservableSpec{}};
  // true: per-path statistic is sup over observer samples; false: final value.
  bool sup_tracking = true;
  std::vector<int> moments{1};
  std::size_t stride = 1;
  unsigned threads = 1;

  void validate() const;
};

std::uint64_t path_seed(std::uint64_t base, std::size_t index);

struct PathEvent {
  std::size_t path = 0;
  std::string kind;  // "blowup" or "error"
  std::optional<double> t;
  std::string message;
};

struct MomentEstimate {
  std::string observable;
  int m = 1;
  double estimate = 0.0;
  double se = 0.0;
  std::size_t paths = 0;
  std::size_t events = 0;
};

struct DriftPoint {
  double t = 0.0;
  double r = 0.0;
  double se = 0.0;
};

struct EnsembleReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<MomentEstimate> moments;
  std::vector<DriftPoint> drift;  // additive noise only
  std::vector<PathEvent> events;
  std::vector<double> sample_times;
  // path_values[o][i]: statistic of observable o on path i (NaN if excluded).
  std::vector<std::vector<double>> path_values;
};

EnsembleReport run_ensemble(const EnsembleConfig& cfg);

// Sample mean and standard error (sample sd / sqrt(n); 0 for n = 1).
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};
MeanSe mean_se(std::span<const double> xs);

// Lag-1 autocorrelation across the sequence; NaN entries are dropped.
double lag1_correlation(std::span<const double> xs);

struct DriftSeries {
  std::vector<DriftPoint> points;
  // OLS slope of M(u(t)) per path, averaged over paths, and the identity value.
  double slope = 0.0;
  double slope_se = 0.0;
  double expected_slope = 0.0;
  std::size_t paths = 0;
};

// r(t) = mean M(u(t)) - M(u0) - ||phi||_HS^2 t.  Additive noise only.
DriftSeries drift_check(const EnsembleConfig& cfg);

// max_t |M(u(t)) - M(u0)| / M(u0) per path (observer samples plus the final state).
std::vector<double> strat_mass_conservation_check(const EnsembleConfig& cfg);

struct RefinementStudy {
  std::vector<double> coarse;  // dt, noise refinement + 1
  std::vector<double> fine;    // dt/2, same seeds
  std::vector<double> ratios;  // coarse / fine
};
RefinementStudy strat_refinement_study(const EnsembleConfig& cfg);

struct TauTable {
  std::vector<double> radii;
  // tau[i][j]: stopping time of path i at radii[j]; nullopt if never reached.
  std::vector<std::vector<std::optional<double>>> tau;
  std::size_t violations = 0;
};

// Truncated runs on common noise for every radius; counts pairs R_i < R_j
// with tau_{R_i} > tau_{R_j} (a missing tau counts as +infinity).
TauTable tau_monotonicity_check(const EnsembleConfig& cfg, std::vector<double> radii, double s, double b);

}  // namespace snls
