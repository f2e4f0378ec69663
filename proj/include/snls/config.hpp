#pragma once

// Flat key = value run configuration.  Every key is also a CLI flag
// (--key value) and command-line values override file values.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "snls/ensemble.hpp"
#include "snls/integrators.hpp"

namespace snls {

struct RunConfig {
  // torus
  int d = 1;
  int N = 16;
  std::vector<double> periods{};
  // nonlinearity
  int k = 1;
  std::string sign = "defocusing";
  double coupling = 1.0;
  // stepping
  std::string scheme = "deterministic-strang";  // short aliases: strang, additive-euler, ito-euler, strat-midpoint
  double dt = 1e-3;
  double T = 1.0;
  bool dealias = true;
  int midpoint_iterations = 2;
  int noise_refinement = 0;
  // noise
  std::string noise = "none";  // none | additive | multiplicative-ito | multiplicative-strat
  std::string phi = "bracket";  // bracket | ball | zero | file
  double phi_decay = 2.0;
  double phi_amp = 1.0;
  double phi_radius = 1.0;
  std::string phi_file;
  // initial data
  std::string init = "exp";  // exp | bracket | constant | single | zero | file
  double init_amp = 1.0;
  double init_decay = 1.0;
  std::vector<int> init_mode{1};
  std::string init_file;
  // truncation
  double R = std::numeric_limits<double>::infinity();
  double xsb_s = 0.0;
  double xsb_b = 0.375;
  int refresh_stride = 1;
  // ensemble
  std::uint64_t seed = 0;
  int paths = 1;
  int threads = 1;
  std::vector<std::string> observables{"mass"};
  double hs_s = 1.0;
  std::vector<int> moments{1};
  bool sup_tracking = true;
  int stride = 1;
  // verify
  std::string estimate = "product";  // strichartz | l4 | product | multilinear
  std::vector<int> sweep_N{8, 16, 32, 64};
  int samples = 200;
  double p = 6.0;
  double est_s = 0.4;
  double est_r = 1.5;
  double est_b = 0.375;
  double est_b_prime = 0.625;
  double est_T = 1.0;
  double modulation = 10.0;
  // output
  std::string out = "snls_out";

  // Every violated invariant, empty when valid.
  std::vector<std::string> violations() const;
  // Throws InvalidInput listing all violations.
  void validate() const;

  TorusSpec torus() const;
  NonlinearitySpec nonlinearity() const;
  std::optional<NoiseSpec> noise_spec() const;
  StepperConfig stepper() const;
  SpectralField initial_field() const;
  EnsembleConfig ensemble() const;
};

std::vector<std::string> config_keys();
// Throws InvalidInput for unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Sorted "key = value" lines; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);
bool operator==(const RunConfig& a, const RunConfig& b);

// FNV-1a 64 of the canonical serialization without output keys, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace snls
