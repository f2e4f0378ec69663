#include "snls/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "snls/error.hpp"
#include "snls/functionals.hpp"

namespace snls {

std::string ObservableSpec::name() const {
  switch (kind) {
    case Kind::mass:
      return "mass";
    case Kind::energy:
      return "energy";
    case Kind::hs: {
      std::ostringstream os;
      os << "hs(" << s << ")";
      return os.str();
    }
  }
  return "?";
}

double ObservableSpec::evaluate(const SpectralField& u, const NonlinearitySpec& nl) const {
  switch (kind) {
    case Kind::mass:
      return mass(u);
    case Kind::energy:
      return energy(u, nl);
    case Kind::hs:
      return sobolev_norm(u, s);
  }
  return 0.0;
}

void EnsembleConfig::validate() const {
  require(paths >= 1, "ensemble needs paths >= 1");
  require(std::isfinite(T) && T > 0.0, "ensemble horizon T must be > 0");
  require(stride >= 1, "observer stride must be >= 1");
  require(threads >= 1, "threads must be >= 1");
  require(!observables.empty(), "ensemble needs at least one observable");
  require(!moments.empty(), "ensemble needs at least one moment order");
  for (int m : moments) require(m >= 1, "moment orders must be >= 1");
  stepper.validate();
  require(initial.spec() == (stepper.noise ? stepper.noise->op.spec() : initial.spec()),
          "initial field and noise operator live on different tori");
  for (const auto& o : observables)
    if (o.kind == ObservableSpec::Kind::energy)
      require(stepper.nl.sign == NonlinearitySpec::Sign::defocusing || stepper.nl.coupling == 0.0,
              "energy moments require a defocusing nonlinearity");
}

std::uint64_t path_seed(std::uint64_t base, std::size_t index) { return base ^ static_cast<std::uint64_t>(index); }

MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  out.mean = mean;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

double lag1_correlation(std::span<const double> xs) {
  std::vector<double> v;
  for (double x : xs)
    if (std::isfinite(x)) v.push_back(x);
  if (v.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - mean) * (v[i] - mean);
    if (i + 1 < v.size()) num += (v[i] - mean) * (v[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

namespace {

template <class Fn>
void for_each_path(std::size_t paths, unsigned threads, Fn&& fn) {
  if (threads <= 1 || paths <= 1) {
    for (std::size_t i = 0; i < paths; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, paths));
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < paths; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct PathResult {
  std::vector<double> times;
  // values[o][j]: observable o at sample j.
  std::vector<std::vector<double>> values;
  std::optional<PathEvent> event;
};

PathResult run_path(const EnsembleConfig& cfg, std::size_t index) {
  PathResult out;
  out.values.resize(cfg.observables.size());
  auto record = [&](const SpectralField& u, double t) {
    out.times.push_back(t);
    for (std::size_t o = 0; o < cfg.observables.size(); ++o)
      out.values[o].push_back(cfg.observables[o].evaluate(u, cfg.stepper.nl));
  };
  try {
    SolverState state = make_state(cfg.initial, path_seed(cfg.base_seed, index), cfg.stepper);
    EvolveOptions opts;
    opts.stride = cfg.stride;
    opts.record = false;
    opts.observers.push_back([&](const SolverState& s, double t) { record(s.field, t); });
    const EvolveResult res = evolve(state, cfg.stepper, cfg.T, opts);
    if (res.blew_up) {
      out.event = PathEvent{index, "blowup", res.blowup_time, "non-finite field"};
    } else if (out.times.empty() || out.times.back() < state.time(cfg.stepper.dt)) {
      record(state.field, state.time(cfg.stepper.dt));
    }
  } catch (const std::exception& e) {
    out.event = PathEvent{index, "error", std::nullopt, e.what()};
  }
  return out;
}

std::vector<PathResult> run_paths(const EnsembleConfig& cfg) {
  std::vector<PathResult> results(cfg.paths);
  for_each_path(cfg.paths, cfg.threads, [&](std::size_t i) { results[i] = run_path(cfg, i); });
  return results;
}

double statistic(const std::vector<double>& series, bool sup) {
  if (series.empty()) return std::numeric_limits<double>::quiet_NaN();
  return sup ? *std::max_element(series.begin(), series.end()) : series.back();
}

bool is_additive(const EnsembleConfig& cfg) {
  return cfg.stepper.noise && cfg.stepper.noise->mode == NoiseMode::additive_ito;
}

// Residual series over the samples common to all clean paths.
std::vector<DriftPoint> drift_series(const EnsembleConfig& cfg, const std::vector<PathResult>& results,
                                     std::size_t mass_index) {
  const double m0 = mass(cfg.initial);
  const double hs2 = std::pow(hs_norm(cfg.stepper.noise->op, 0.0), 2);
  std::size_t samples = std::numeric_limits<std::size_t>::max();
  const PathResult* ref = nullptr;
  for (const auto& r : results)
    if (!r.event) {
      samples = std::min(samples, r.times.size());
      if (!ref) ref = &r;
    }
  std::vector<DriftPoint> out;
  if (!ref) return out;
  for (std::size_t j = 0; j < samples; ++j) {
    std::vector<double> xs;
    const double t = ref->times[j];
    for (const auto& r : results)
      if (!r.event) xs.push_back(r.values[mass_index][j] - m0 - hs2 * t);
    const MeanSe ms = mean_se(xs);
    out.push_back(DriftPoint{t, ms.mean, ms.se});
  }
  return out;
}

}  // namespace

EnsembleReport run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const std::vector<PathResult> results = run_paths(cfg);

  EnsembleReport rep;
  rep.seed = cfg.base_seed;
  for (const auto& r : results) {
    if (r.event) rep.events.push_back(*r.event);
    else if (rep.sample_times.empty()) rep.sample_times = r.times;
  }

  rep.path_values.assign(cfg.observables.size(), {});
  for (std::size_t o = 0; o < cfg.observables.size(); ++o) {
    for (const auto& r : results)
      rep.path_values[o].push_back(r.event ? std::numeric_limits<double>::quiet_NaN()
                                           : statistic(r.values[o], cfg.sup_tracking));
    for (int m : cfg.moments) {
      std::vector<double> xs;
      for (double v : rep.path_values[o])
        if (std::isfinite(v)) xs.push_back(std::pow(v, m));
      const MeanSe ms = mean_se(xs);
      rep.moments.push_back(
          MomentEstimate{cfg.observables[o].name(), m, ms.mean, ms.se, ms.n, rep.events.size()});
    }
  }

  if (is_additive(cfg)) {
    std::size_t mass_index = cfg.observables.size();
    for (std::size_t o = 0; o < cfg.observables.size(); ++o)
      if (cfg.observables[o].kind == ObservableSpec::Kind::mass) mass_index = o;
    if (mass_index < cfg.observables.size()) rep.drift = drift_series(cfg, results, mass_index);
  }
  return rep;
}

DriftSeries drift_check(const EnsembleConfig& cfg) {
  if (!is_additive(cfg)) throw InvalidInput("drift_check requires additive noise");
  EnsembleConfig run = cfg;
  run.observables = {ObservableSpec{}};
  run.validate();
  const std::vector<PathResult> results = run_paths(run);

  DriftSeries out;
  out.points = drift_series(run, results, 0);
  out.expected_slope = std::pow(hs_norm(cfg.stepper.noise->op, 0.0), 2);
  std::vector<double> slopes;
  for (const auto& r : results) {
    if (r.event || r.times.size() < 2) continue;
    const auto& t = r.times;
    const auto& m = r.values[0];
    double tm = 0.0, mm = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      tm += t[j];
      mm += m[j];
    }
    tm /= static_cast<double>(t.size());
    mm /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      num += (t[j] - tm) * (m[j] - mm);
      den += (t[j] - tm) * (t[j] - tm);
    }
    slopes.push_back(num / den);
  }
  const MeanSe ms = mean_se(slopes);
  out.slope = ms.mean;
  out.slope_se = ms.se;
  out.paths = ms.n;
  return out;
}

std::vector<double> strat_mass_conservation_check(const EnsembleConfig& cfg) {
  if (is_additive(cfg)) throw InvalidInput("mass conservation check requires multiplicative or no noise");
  EnsembleConfig run = cfg;
  run.observables = {ObservableSpec{}};
  run.validate();
  const double m0 = mass(cfg.initial);
  require(m0 > 0.0, "mass conservation check needs a nonzero initial field");
  const std::vector<PathResult> results = run_paths(run);
  std::vector<double> out;
  for (const auto& r : results) {
    if (r.event) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double worst = 0.0;
    for (double m : r.values[0]) worst = std::max(worst, std::abs(m - m0) / m0);
    out.push_back(worst);
  }
  return out;
}

RefinementStudy strat_refinement_study(const EnsembleConfig& cfg) {
  EnsembleConfig coarse = cfg;
  coarse.stepper.noise_refinement = cfg.stepper.noise_refinement + 1;
  EnsembleConfig fine = cfg;
  fine.stepper.dt = 0.5 * cfg.stepper.dt;
  fine.stride = 2 * cfg.stride;
  RefinementStudy out;
  out.coarse = strat_mass_conservation_check(coarse);
  out.fine = strat_mass_conservation_check(fine);
  for (std::size_t i = 0; i < out.coarse.size(); ++i) out.ratios.push_back(out.coarse[i] / out.fine[i]);
  return out;
}

TauTable tau_monotonicity_check(const EnsembleConfig& cfg, std::vector<double> radii, double s, double b) {
  cfg.validate();
  require(cfg.stepper.noise && cfg.stepper.noise->mode != NoiseMode::additive_ito,
          "tau monotonicity check requires multiplicative noise");
  require(!radii.empty(), "tau monotonicity check needs at least one radius");
  TauTable table;
  table.radii = radii;
  table.tau.assign(cfg.paths, std::vector<std::optional<double>>(radii.size()));

  for_each_path(cfg.paths, cfg.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < radii.size(); ++j) {
      SolverState state = make_state(cfg.initial, path_seed(cfg.base_seed, i), cfg.stepper);
      CutoffState c;
      c.history = Trajectory(cfg.initial.spec());
      c.halt_at_tau = true;
      state.cutoff = std::move(c);
      EvolveOptions opts;
      opts.record = false;
      opts.stride = cfg.stride;
      table.tau[i][j] = evolve_truncated(state, cfg.stepper, radii[j], s, b, cfg.T, opts).tau;
    }
  });

  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& row : table.tau)
    for (std::size_t a = 0; a < radii.size(); ++a)
      for (std::size_t c = 0; c < radii.size(); ++c)
        if (radii[a] < radii[c] && row[a].value_or(inf) > row[c].value_or(inf)) ++table.violations;
  return table;
}

}  // namespace snls
