#include "snls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "snls/error.hpp"
#include "snls/io.hpp"

namespace snls {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---- text conversion -------------------------------------------------------

std::string to_text(int v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::string& v) { return v; }
std::string to_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + to_text(v[i]);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw InvalidInput("config key '" + key + "': cannot parse '" + value + "' as " + what);
}

void from_text(const std::string& key, const std::string& s, int& out) {
  std::size_t pos = 0;
  try {
    const long v = std::stol(s, &pos);
    if (pos != s.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      bad_value(key, s, "an integer");
    out = static_cast<int>(v);
  } catch (const std::logic_error&) {
    bad_value(key, s, "an integer");
  }
}
void from_text(const std::string& key, const std::string& s, std::uint64_t& out) {
  std::size_t pos = 0;
  try {
    if (!s.empty() && s[0] == '-') bad_value(key, s, "an unsigned integer");
    out = std::stoull(s, &pos, 0);
    if (pos != s.size()) bad_value(key, s, "an unsigned integer");
  } catch (const std::logic_error&) {
    bad_value(key, s, "an unsigned integer");
  }
}
void from_text(const std::string& key, const std::string& s, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
    if (pos != s.size() || std::isnan(out)) bad_value(key, s, "a number");
  } catch (const std::logic_error&) {
    bad_value(key, s, "a number");
  }
}
void from_text(const std::string& key, const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "on" || s == "yes")
    out = true;
  else if (s == "false" || s == "0" || s == "off" || s == "no")
    out = false;
  else
    bad_value(key, s, "a boolean");
}
void from_text(const std::string&, const std::string& s, std::string& out) { out = s; }
template <class T>
void from_text(const std::string& key, const std::string& s, std::vector<T>& out) {
  std::vector<T> v;
  for (const auto& item : split_list(s)) {
    T x{};
    from_text(key, item, x);
    v.push_back(x);
  }
  out = std::move(v);
}

const std::map<std::string, std::string>& scheme_aliases() {
  static const std::map<std::string, std::string> m{
      {"strang", "deterministic-strang"},
      {"additive-euler", "additive-exp-euler"},
      {"ito-euler", "multiplicative-ito-euler"},
      {"strat-midpoint", "multiplicative-strat-midpoint"},
  };
  return m;
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  bool output = false;
};

template <class T>
Field field(const std::string& key, T RunConfig::*member, bool output = false) {
  return Field{[member](const RunConfig& c) { return to_text(c.*member); },
               [member, key](RunConfig& c, const std::string& v) { from_text(key, v, c.*member); }, output};
}

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> r = [] {
    std::map<std::string, Field> m;
    m["d"] = field("d", &RunConfig::d);
    m["N"] = field("N", &RunConfig::N);
    m["periods"] = field("periods", &RunConfig::periods);
    m["k"] = field("k", &RunConfig::k);
    m["sign"] = field("sign", &RunConfig::sign);
    m["coupling"] = field("coupling", &RunConfig::coupling);
    m["scheme"] = Field{[](const RunConfig& c) { return c.scheme; },
                        [](RunConfig& c, const std::string& v) {
                          const auto it = scheme_aliases().find(v);
                          c.scheme = it == scheme_aliases().end() ? v : it->second;
                        }};
    m["dt"] = field("dt", &RunConfig::dt);
    m["T"] = field("T", &RunConfig::T);
    m["dealias"] = field("dealias", &RunConfig::dealias);
    m["midpoint_iterations"] = field("midpoint_iterations", &RunConfig::midpoint_iterations);
    m["noise_refinement"] = field("noise_refinement", &RunConfig::noise_refinement);
    m["noise"] = field("noise", &RunConfig::noise);
    m["phi"] = field("phi", &RunConfig::phi);
    m["phi_decay"] = field("phi_decay", &RunConfig::phi_decay);
    m["phi_amp"] = field("phi_amp", &RunConfig::phi_amp);
    m["phi_radius"] = field("phi_radius", &RunConfig::phi_radius);
    m["phi_file"] = field("phi_file", &RunConfig::phi_file);
    m["init"] = field("init", &RunConfig::init);
    m["init_amp"] = field("init_amp", &RunConfig::init_amp);
    m["init_decay"] = field("init_decay", &RunConfig::init_decay);
    m["init_mode"] = field("init_mode", &RunConfig::init_mode);
    m["init_file"] = field("init_file", &RunConfig::init_file);
    m["R"] = field("R", &RunConfig::R);
    m["xsb_s"] = field("xsb_s", &RunConfig::xsb_s);
    m["xsb_b"] = field("xsb_b", &RunConfig::xsb_b);
    m["refresh_stride"] = field("refresh_stride", &RunConfig::refresh_stride);
    m["seed"] = field("seed", &RunConfig::seed);
    m["paths"] = field("paths", &RunConfig::paths);
    m["threads"] = field("threads", &RunConfig::threads);
    m["observables"] = field("observables", &RunConfig::observables);
    m["hs_s"] = field("hs_s", &RunConfig::hs_s);
    m["moments"] = field("moments", &RunConfig::moments);
    m["sup_tracking"] = field("sup_tracking", &RunConfig::sup_tracking);
    m["stride"] = field("stride", &RunConfig::stride);
    m["estimate"] = field("estimate", &RunConfig::estimate);
    m["sweep_N"] = field("sweep_N", &RunConfig::sweep_N);
    m["samples"] = field("samples", &RunConfig::samples);
    m["p"] = field("p", &RunConfig::p);
    m["est_s"] = field("est_s", &RunConfig::est_s);
    m["est_r"] = field("est_r", &RunConfig::est_r);
    m["est_b"] = field("est_b", &RunConfig::est_b);
    m["est_b_prime"] = field("est_b_prime", &RunConfig::est_b_prime);
    m["est_T"] = field("est_T", &RunConfig::est_T);
    m["modulation"] = field("modulation", &RunConfig::modulation);
    m["out"] = field("out", &RunConfig::out, true);
    return m;
  }();
  return r;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

const char* noise_for_scheme(const std::string& scheme) {
  if (scheme == "deterministic-strang") return "none";
  if (scheme == "additive-exp-euler") return "additive";
  if (scheme == "multiplicative-ito-euler") return "multiplicative-ito";
  if (scheme == "multiplicative-strat-midpoint") return "multiplicative-strat";
  return nullptr;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : registry()) keys.push_back(k);
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw InvalidInput("unknown config key '" + key + "'");
  it->second.set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw InvalidInput("unknown config key '" + key + "'");
  return it->second.get(cfg);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : registry()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  std::string canon;
  for (const auto& [k, f] : registry())
    if (!f.output) canon += k + " = " + f.get(cfg) + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

std::vector<std::string> RunConfig::violations() const {
  std::vector<std::string> v;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  check(d >= 1 && d <= TorusSpec::kMaxDim, "d must be in {1, 2, 3}");
  check(N >= 0 && N <= 512, "N must be in [0, 512]");
  check(periods.empty() || periods.size() == static_cast<std::size_t>(d), "periods must list d values");
  for (double a : periods) check(std::isfinite(a) && a > 0.0, "periods must be > 0");
  check(k >= 1, "k must be >= 1");
  check(one_of(sign, {"defocusing", "focusing"}), "sign must be defocusing or focusing");
  check(std::isfinite(coupling) && coupling >= 0.0, "coupling must be finite and >= 0");

  const char* wanted = noise_for_scheme(scheme);
  check(wanted != nullptr, "unknown scheme '" + scheme + "'");
  check(one_of(noise, {"none", "additive", "multiplicative-ito", "multiplicative-strat"}),
        "noise must be none, additive, multiplicative-ito or multiplicative-strat");
  if (wanted) check(noise == wanted, "scheme " + scheme + " requires noise = " + wanted);
  check(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  check(std::isfinite(T) && T > 0.0, "T must be > 0");
  check(midpoint_iterations >= 1 && midpoint_iterations <= 64, "midpoint_iterations must be in [1, 64]");
  check(noise_refinement >= 0 && noise_refinement <= 20, "noise_refinement must be in [0, 20]");

  check(one_of(phi, {"bracket", "ball", "zero", "file"}), "phi must be bracket, ball, zero or file");
  check(std::isfinite(phi_decay), "phi_decay must be finite");
  check(std::isfinite(phi_amp) && phi_amp >= 0.0, "phi_amp must be finite and >= 0");
  check(phi_radius >= 0.0, "phi_radius must be >= 0");
  check(phi != "file" || !phi_file.empty(), "phi = file requires phi_file");

  check(one_of(init, {"exp", "bracket", "constant", "single", "zero", "file"}),
        "init must be exp, bracket, constant, single, zero or file");
  check(std::isfinite(init_amp) && std::isfinite(init_decay), "init_amp and init_decay must be finite");
  if (init == "single") {
    check(init_mode.size() == static_cast<std::size_t>(d), "init_mode must list d integers");
    for (int n : init_mode) check(std::abs(n) <= N, "init_mode must lie in the cube |n_j| <= N");
  }
  check(init != "file" || !init_file.empty(), "init = file requires init_file");

  check(R > 0.0, "R must be > 0");
  check(xsb_b >= 0.0 && xsb_b < 0.5, "xsb_b must satisfy 0 <= b < 1/2 (sharp time window)");
  check(refresh_stride >= 1, "refresh_stride must be >= 1");

  check(paths >= 1, "paths must be >= 1");
  check(threads >= 1, "threads must be >= 1");
  check(!observables.empty(), "observables must not be empty");
  for (const auto& o : observables) check(one_of(o, {"mass", "energy", "hs"}), "unknown observable '" + o + "'");
  check(!moments.empty(), "moments must not be empty");
  for (int m : moments) check(m >= 1, "moment orders must be >= 1");
  check(stride >= 1, "stride must be >= 1");
  if (std::find(observables.begin(), observables.end(), "energy") != observables.end())
    check(sign == "defocusing" || coupling == 0.0, "energy moments require a defocusing nonlinearity");

  check(one_of(estimate, {"strichartz", "l4", "product", "multilinear"}),
        "estimate must be strichartz, l4, product or multilinear");
  check(!sweep_N.empty(), "sweep_N must not be empty");
  for (int n : sweep_N) check(n >= 1 && n <= 512, "sweep_N entries must be in [1, 512]");
  check(samples >= 1, "samples must be >= 1");
  check(p >= 1.0, "p must be >= 1");
  check(est_T > 0.0, "est_T must be > 0");
  check(modulation >= 0.0, "modulation must be >= 0");
  return v;
}

void RunConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw InvalidInput(msg);
}

TorusSpec RunConfig::torus() const { return TorusSpec(d, N, periods); }

NonlinearitySpec RunConfig::nonlinearity() const {
  NonlinearitySpec nl;
  nl.k = k;
  nl.sign = sign == "focusing" ? NonlinearitySpec::Sign::focusing : NonlinearitySpec::Sign::defocusing;
  nl.coupling = coupling;
  return nl;
}

std::optional<NoiseSpec> RunConfig::noise_spec() const {
  if (noise == "none") return std::nullopt;
  const TorusSpec spec = torus();
  SmoothingOperator op = SmoothingOperator::zero(spec);
  if (phi == "bracket")
    op = SmoothingOperator::bracket_power(spec, phi_decay, phi_amp);
  else if (phi == "ball")
    op = SmoothingOperator::ball_indicator(spec, phi_radius, phi_amp);
  else if (phi == "file") {
    op = io::load_operator(phi_file);
    require(op.spec() == spec, "operator file torus does not match d/N/periods");
  }
  NoiseMode mode = NoiseMode::additive_ito;
  if (noise == "multiplicative-ito") mode = NoiseMode::multiplicative_ito;
  if (noise == "multiplicative-strat") mode = NoiseMode::multiplicative_stratonovich_real;
  return NoiseSpec{mode, std::move(op)};
}

StepperConfig RunConfig::stepper() const {
  StepperConfig s;
  if (scheme == "additive-exp-euler") s.scheme = Scheme::additive_exp_euler;
  else if (scheme == "multiplicative-ito-euler") s.scheme = Scheme::multiplicative_ito_euler;
  else if (scheme == "multiplicative-strat-midpoint") s.scheme = Scheme::multiplicative_strat_midpoint;
  else s.scheme = Scheme::deterministic_strang;
  s.dt = dt;
  s.dealias = dealias ? Dealias::on : Dealias::off;
  s.nl = nonlinearity();
  s.noise = noise_spec();
  s.midpoint_iterations = midpoint_iterations;
  s.noise_refinement = noise_refinement;
  return s;
}

SpectralField RunConfig::initial_field() const {
  const TorusSpec spec = torus();
  if (init == "zero") return SpectralField(spec);
  if (init == "constant") return SpectralField::constant(spec, init_amp);
  if (init == "single") {
    ModeIndex n{0, 0, 0};
    for (int j = 0; j < d; ++j) n[j] = init_mode[j];
    return SpectralField::single_mode(spec, n, init_amp);
  }
  if (init == "file") {
    io::Snapshot s = io::load_snapshot(init_file);
    require(s.field.spec() == spec, "initial snapshot torus does not match d/N/periods");
    return std::move(s.field);
  }
  SpectralField f(spec);
  for (std::size_t n = 0; n < f.size(); ++n)
    f[n] = init == "exp" ? init_amp * std::exp(-init_decay * std::sqrt(spec.lattice_norm_sq(n)))
                         : init_amp * std::pow(spec.bracket(n), -init_decay);
  return f;
}

EnsembleConfig RunConfig::ensemble() const {
  EnsembleConfig e;
  e.paths = static_cast<std::size_t>(paths);
  e.base_seed = seed;
  e.stepper = stepper();
  e.initial = initial_field();
  e.T = T;
  e.observables.clear();
  for (const auto& o : observables) {
    ObservableSpec spec;
    if (o == "energy") spec.kind = ObservableSpec::Kind::energy;
    if (o == "hs") {
      spec.kind = ObservableSpec::Kind::hs;
      spec.s = hs_s;
    }
    e.observables.push_back(spec);
  }
  e.sup_tracking = sup_tracking;
  e.moments = moments;
  e.stride = static_cast<std::size_t>(stride);
  e.threads = static_cast<unsigned>(threads);
  return e;
}

}  // namespace snls
