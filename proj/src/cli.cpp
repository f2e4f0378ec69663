#include "snls/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "snls/config.hpp"
#include "snls/ensemble.hpp"
#include "snls/error.hpp"
#include "snls/estimates.hpp"
#include "snls/functionals.hpp"
#include "snls/integrators.hpp"
#include "snls/io.hpp"

namespace snls {
namespace {

using nlohmann::json;

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config flags shared by every subcommand.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value config file");
    for (const auto& key : config_keys())
      options[key] = app->add_option("--" + key, values[key], "config key " + key);
  }

  RunConfig build() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) set_config_value(cfg, key, values.at(key));
    cfg.validate();
    return cfg;
  }
};

std::ofstream open_text(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void close_text(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

io::Provenance provenance(const RunConfig& cfg) { return io::Provenance{config_hash(cfg), cfg.seed}; }

// ---- simulate -----------------------------------------------------------------

constexpr std::size_t kXsbEvaluations = 128;

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const StepperConfig stepper = cfg.stepper();
  SolverState state = make_state(cfg.initial_field(), cfg.seed, stepper);
  EvolveOptions opts;
  opts.stride = static_cast<std::size_t>(cfg.stride);

  EvolveResult run{Trajectory(state.field.spec())};
  std::optional<double> tau;
  if (std::isfinite(cfg.R)) {
    TruncatedResult tr =
        evolve_truncated(state, stepper, cfg.R, cfg.xsb_s, cfg.xsb_b, cfg.T, opts, cfg.refresh_stride);
    run = std::move(tr.run);
    tau = tr.tau;
  } else {
    run = evolve(state, stepper, cfg.T, opts);
  }

  Trajectory traj = run.trajectory;
  const std::size_t uniform = traj.size();
  const double t_end = state.time(stepper.dt);
  if (!run.blew_up && (traj.empty() || traj.times().back() < t_end)) traj.append(t_end, state.field);

  const NonlinearitySpec nl = cfg.nonlinearity();
  std::vector<io::ObservableRow> rows;
  const double sample_dt = stepper.dt * static_cast<double>(cfg.stride);
  const std::size_t every = std::max<std::size_t>(1, (uniform + kXsbEvaluations - 1) / kXsbEvaluations);
  double running = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (j < uniform && (j % every == 0 || j + 1 == uniform))
      running = xsb_norm_prefix(run.trajectory, j + 1, cfg.xsb_s, cfg.xsb_b, XsbWindow::sharp, 4, sample_dt);
    rows.push_back(io::ObservableRow{traj.times()[j], mass(traj[j]), energy(traj[j], nl),
                                     sobolev_norm(traj[j], cfg.hs_s), running});
  }

  const io::Provenance prov = provenance(cfg);
  const std::string traj_path = cfg.out + ".traj";
  const std::string csv_path = cfg.out + "_observables.csv";
  io::save_trajectory(traj_path, traj);
  io::write_meta(traj_path, prov);
  auto csv = open_text(csv_path);
  io::write_observables_csv(csv, prov, cfg.hs_s, rows);
  close_text(csv, csv_path);

  json summary{{"trajectory", traj_path}, {"observables", csv_path}, {"steps", run.steps},
               {"samples", traj.size()},  {"blew_up", run.blew_up},  {"config-hash", prov.config_hash}};
  summary["blowup_time"] = run.blowup_time ? json(*run.blowup_time) : json(nullptr);
  summary["tau"] = tau ? json(*tau) : json(nullptr);
  out << summary.dump() << '\n';
  return exit_ok;
}

// ---- ensemble / verify -------------------------------------------------------

int cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
  EnsembleReport rep = run_ensemble(cfg.ensemble());
  rep.config_hash = config_hash(cfg);
  const std::string path = cfg.out + "_report.json";
  auto os = open_text(path);
  os << io::report_json(rep) << '\n';
  close_text(os, path);
  out << json{{"report", path}, {"paths", cfg.paths}, {"events", rep.events.size()}}.dump() << '\n';
  return exit_ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const int n_max = *std::max_element(cfg.sweep_N.begin(), cfg.sweep_N.end());
  const TorusSpec widest(cfg.d, n_max, cfg.periods);
  std::vector<io::SweepEntry> sweep;
  for (int N : cfg.sweep_N) {
    const TorusSpec spec(cfg.d, N, cfg.periods);
    const auto samples = static_cast<std::size_t>(cfg.samples);
    RatioStats stats;
    if (cfg.estimate == "strichartz") {
      stats = strichartz_ratio(spec, cfg.p, samples, cfg.est_T, cfg.seed);
    } else if (cfg.estimate == "l4") {
      stats = l4_xsb_sweep(spec, samples, cfg.est_T, cfg.seed, cfg.modulation,
                           resolving_stride(widest, cfg.modulation, 4));
    } else if (cfg.estimate == "product") {
      stats = product_ratio(spec, cfg.est_s, cfg.est_r, samples, cfg.seed);
    } else {
      stats = multilinear_ratio(spec, cfg.k, cfg.est_s, cfg.est_b, cfg.est_b_prime, samples, cfg.seed, cfg.est_T,
                                cfg.modulation, resolving_stride(widest, cfg.modulation, 2 * cfg.k + 2));
    }
    sweep.push_back(io::SweepEntry{N, std::move(stats)});
  }
  const io::Provenance prov = provenance(cfg);
  const std::string csv_path = cfg.out + "_verify.csv";
  const std::string json_path = cfg.out + "_verify.json";
  auto csv = open_text(csv_path);
  io::write_verifier_csv(csv, prov, cfg.estimate, sweep);
  close_text(csv, csv_path);
  auto js = open_text(json_path);
  const std::string summary = io::verifier_json(prov, cfg.estimate, sweep);
  js << summary << '\n';
  close_text(js, json_path);
  out << summary << '\n';
  return exit_ok;
}

// ---- norms -------------------------------------------------------------------

int cmd_norms(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const Trajectory traj = io::load_trajectory(input);
  const NonlinearitySpec nl = cfg.nonlinearity();
  json j{{"input", input}, {"samples", traj.size()}, {"t_first", traj.times().front()},
         {"t_last", traj.times().back()}};
  j["mass"] = {mass(traj[0]), mass(traj.back())};
  j["energy"] = {energy(traj[0], nl), energy(traj.back(), nl)};
  j["hs_s"] = cfg.hs_s;
  j["hs_norm"] = {sobolev_norm(traj[0], cfg.hs_s), sobolev_norm(traj.back(), cfg.hs_s)};
  // The final sample of a simulate run may sit off the stride grid.
  std::size_t uniform = traj.size();
  if (!traj.is_uniform()) {
    Trajectory head(traj.spec());
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) head.append(traj.times()[i], traj[i]);
    uniform = head.is_uniform() ? head.size() : 0;
  }
  if (uniform >= 1) {
    const double stride = uniform >= 2 ? traj.times()[1] - traj.times()[0] : 1.0;
    j["xsb"] = {{"s", cfg.xsb_s},
                {"b", cfg.xsb_b},
                {"samples", uniform},
                {"value", xsb_norm_prefix(traj, uniform, cfg.xsb_s, cfg.xsb_b, XsbWindow::sharp, 4, stride)}};
  }
  if (std::filesystem::exists(input + ".meta.json")) {
    const io::Provenance p = io::read_meta(input);
    j["config-hash"] = p.config_hash;
    j["seed"] = p.seed;
  }
  out << j.dump() << '\n';
  return exit_ok;
}

// ---- check-identity ----------------------------------------------------------

int cmd_factorization(double alpha, double t, double mu, std::ostream& out) {
  const double value = factorization_check(alpha, t, mu);
  const double expected = std::numbers::pi / std::sin(std::numbers::pi * alpha);
  const bool ok = std::abs(value - expected) <= 1e-6;
  out << json{{"identity", "factorization"}, {"alpha", alpha}, {"t", t},         {"mu", mu},
              {"value", value},             {"expected", expected}, {"ok", ok}}.dump(-1, ' ', false,
                                                                                     json::error_handler_t::replace)
      << '\n';
  if (!ok) throw CheckFailed("factorization identity off by " + std::to_string(std::abs(value - expected)));
  return exit_ok;
}

int cmd_isometry(RunConfig cfg, std::ostream& out) {
  cfg.noise = "additive";
  cfg.scheme = "additive-exp-euler";
  cfg.coupling = 0.0;
  cfg.init = "zero";
  cfg.observables = {"hs"};
  cfg.moments = {2};
  cfg.sup_tracking = false;
  cfg.validate();
  const EnsembleConfig ens = cfg.ensemble();
  const EnsembleReport rep = run_ensemble(ens);
  const MomentEstimate& m = rep.moments.front();
  const double t_end = static_cast<double>(step_count(0.0, cfg.T, cfg.dt)) * cfg.dt;
  const double expected = 2.0 * t_end * std::pow(hs_norm(ens.stepper.noise->op, cfg.hs_s), 2);
  const bool ok = std::abs(m.estimate - expected) <= 3.0 * m.se;
  out << json{{"identity", "isometry"}, {"s", cfg.hs_s},       {"t", t_end}, {"estimate", m.estimate},
              {"SE", m.se},             {"expected", expected}, {"paths", m.paths}, {"ok", ok}}
             .dump()
      << '\n';
  if (!ok) throw CheckFailed("isometry estimate outside 3 standard errors");
  return exit_ok;
}

int cmd_drift(const RunConfig& cfg, std::ostream& out) {
  const DriftSeries d = drift_check(cfg.ensemble());
  const bool ok = std::abs(d.slope - d.expected_slope) <= 3.0 * d.slope_se;
  json pts = json::array();
  for (const auto& p : d.points) pts.push_back({p.t, p.r, p.se});
  out << json{{"identity", "drift"}, {"slope", d.slope},   {"SE", d.slope_se}, {"expected", d.expected_slope},
              {"paths", d.paths},    {"residual", pts}, {"ok", ok}}
             .dump()
      << '\n';
  if (!ok) throw CheckFailed("mass drift slope outside 3 standard errors");
  return exit_ok;
}

std::string stored_hash(const std::string& input) {
  if (std::filesystem::exists(input + ".meta.json")) return io::read_meta(input).config_hash;
  std::ifstream is(input);
  if (!is) throw IoError("cannot open '" + input + "'");
  if (is.peek() == '#') return io::read_csv_preamble(is).config_hash;
  try {
    return json::parse(is).at("config-hash").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError("no config hash found in '" + input + "': " + e.what());
  }
}

int cmd_hash(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const std::string expected = config_hash(cfg);
  const std::string found = stored_hash(input);
  const bool ok = expected == found;
  out << json{{"identity", "hash"}, {"input", input}, {"stored", found}, {"derived", expected}, {"ok", ok}}.dump()
      << '\n';
  if (!ok) throw CheckFailed("config hash mismatch");
  return exit_ok;
}

void error_record(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump(-1, ' ', false,
                                                                              json::error_handler_t::replace)
      << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral simulator and estimate verifier for the stochastic NLS on the torus", "snls"};
  app.require_subcommand(1);

  std::string input;
  double alpha = 0.5, t = 1.0, mu = 0.0;

  ConfigFlags f_sim, f_ens, f_ver, f_norms, f_iso, f_drift, f_hash;
  auto* sim = app.add_subcommand("simulate", "single path: trajectory + observables CSV");
  f_sim.attach(sim);
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo moments: report JSON");
  f_ens.attach(ens);
  auto* ver = app.add_subcommand("verify", "estimate sweeps over N: CSV + JSON");
  f_ver.attach(ver);
  auto* norms = app.add_subcommand("norms", "norms of a stored trajectory");
  f_norms.attach(norms);
  norms->add_option("--input", input, "trajectory file")->required();

  auto* check = app.add_subcommand("check-identity", "quick identity checks");
  check->require_subcommand(1);
  auto* fact = check->add_subcommand("factorization", "Beta-function factorization identity");
  fact->add_option("--alpha", alpha, "exponent in (0,1)");
  fact->add_option("--t", t, "upper limit");
  fact->add_option("--mu", mu, "lower limit");
  auto* iso = check->add_subcommand("isometry", "stochastic convolution isometry (linear additive)");
  f_iso.attach(iso);
  auto* drift = check->add_subcommand("drift", "additive mass drift identity");
  f_drift.attach(drift);
  auto* hash = check->add_subcommand("hash", "re-derive the config hash of an output file");
  f_hash.attach(hash);
  hash->add_option("--input", input, "output file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    error_record(err, "usage", e.what(), exit_usage);
    return exit_usage;
  }

  try {
    if (*sim) return cmd_simulate(f_sim.build(), out);
    if (*ens) return cmd_ensemble(f_ens.build(), out);
    if (*ver) return cmd_verify(f_ver.build(), out);
    if (*norms) return cmd_norms(f_norms.build(), input, out);
    if (*fact) return cmd_factorization(alpha, t, mu, out);
    if (*iso) return cmd_isometry(f_iso.build(), out);
    if (*drift) return cmd_drift(f_drift.build(), out);
    if (*hash) return cmd_hash(f_hash.build(), input, out);
  } catch (const InvalidInput& e) {
    error_record(err, "invalid-config", e.what(), exit_usage);
    return exit_usage;
  } catch (const IoError& e) {
    error_record(err, "io", e.what(), exit_io);
    return exit_io;
  } catch (const CheckFailed& e) {
    error_record(err, "check-failed", e.what(), exit_check);
    return exit_check;
  } catch (const std::exception& e) {
    error_record(err, "runtime", e.what(), exit_runtime);
    return exit_runtime;
  }
  return exit_usage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace snls
