#include "snls/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "snls/error.hpp"

namespace snls::io {
namespace {

using nlohmann::json;

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated binary data");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_complex(std::ostream& os, std::span<const cplx> values) {
  for (cplx c : values) {
    put_le<double>(os, c.real());
    put_le<double>(os, c.imag());
  }
}

std::vector<cplx> get_complex(std::istream& is, std::size_t n) {
  std::vector<cplx> out(n);
  for (auto& c : out) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    c = cplx(re, im);
  }
  return out;
}

constexpr char kMagic[5] = {'S', 'N', 'L', 'S', '1'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::binary) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::binary) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

void finish(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json sanitize(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> amplitude_set(std::vector<double> gammas) {
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  return gammas;
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& f, double t) {
  const TorusSpec& spec = f.spec();
  os.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(spec.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(spec.cutoff()));
  for (double a : spec.periods()) put_le<double>(os, a);
  put_le<double>(os, t);
  put_complex(os, f.coeffs());
}

Snapshot read_snapshot(std::istream& is) {
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic)) throw IoError("truncated snapshot header");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError("bad snapshot magic");
  const auto d = get_le<std::uint32_t>(is);
  const auto N = get_le<std::uint32_t>(is);
  if (d < 1 || d > static_cast<std::uint32_t>(TorusSpec::kMaxDim) || N > 4096) throw IoError("corrupt snapshot header");
  std::vector<double> periods(d);
  for (auto& a : periods) a = get_le<double>(is);
  const double t = get_le<double>(is);
  TorusSpec spec(static_cast<int>(d), static_cast<int>(N), periods);
  return Snapshot{SpectralField(spec, get_complex(is, spec.mode_count())), t};
}

void save_snapshot(const std::string& path, const SpectralField& f, double t) {
  auto os = open_out(path);
  write_snapshot(os, f, t);
  finish(os, path);
}

Snapshot load_snapshot(const std::string& path) {
  auto is = open_in(path);
  return read_snapshot(is);
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  auto os = open_out(path);
  for (std::size_t j = 0; j < traj.size(); ++j) write_snapshot(os, traj[j], traj.times()[j]);
  finish(os, path);
}

Trajectory load_trajectory(const std::string& path) {
  auto is = open_in(path);
  std::optional<Trajectory> traj;
  while (is.peek() != std::char_traits<char>::eof()) {
    Snapshot s = read_snapshot(is);
    if (!traj) traj.emplace(s.field.spec());
    if (!(s.field.spec() == traj->spec())) throw IoError("trajectory mixes tori");
    traj->append(s.t, std::move(s.field));
  }
  if (!traj) throw IoError("empty trajectory file '" + path + "'");
  return std::move(*traj);
}

void save_operator(const std::string& path, const SmoothingOperator& op, const std::vector<double>& s_list) {
  auto os = open_out(path);
  const TorusSpec& spec = op.spec();
  const bool diag = op.kind() == SmoothingOperator::Kind::diagonal;
  os << "snls-operator 1\n";
  os << "kind " << (diag ? "diagonal" : "dense") << "\n";
  os << "d " << spec.dim() << "\nN " << spec.cutoff() << "\nperiods";
  for (double a : spec.periods()) os << ' ' << fmt(a);
  os << "\ns";
  for (double s : s_list) os << ' ' << fmt(s);
  os << "\nhs";
  for (double s : s_list) os << ' ' << fmt(hs_norm(op, s));
  os << "\ndata\n";
  if (diag) {
    for (std::size_t n = 0; n < spec.mode_count(); ++n) {
      const ModeIndex m = spec.mode(n);
      for (int j = 0; j < spec.dim(); ++j) os << m[j] << ' ';
      os << fmt(op.multipliers()[n]) << '\n';
    }
  } else {
    put_complex(os, op.matrix());
  }
  finish(os, path);
}

SmoothingOperator load_operator(const std::string& path) {
  auto is = open_in(path);
  std::string line, key;
  auto next_line = [&](const std::string& expect) {
    if (!std::getline(is, line)) throw IoError("truncated operator header");
    std::istringstream ls(line);
    ls >> key;
    if (key != expect) throw IoError("operator header: expected '" + expect + "', got '" + key + "'");
    return ls;
  };
  {
    auto ls = next_line("snls-operator");
    int version = 0;
    ls >> version;
    if (version != 1) throw IoError("unsupported operator file version");
  }
  std::string kind;
  next_line("kind") >> kind;
  int d = 0, N = 0;
  next_line("d") >> d;
  next_line("N") >> N;
  if (d < 1 || d > TorusSpec::kMaxDim || N < 0) throw IoError("corrupt operator header");
  std::vector<double> periods(d);
  {
    auto ls = next_line("periods");
    for (auto& a : periods)
      if (!(ls >> a)) throw IoError("operator header: missing period");
  }
  next_line("s");
  next_line("hs");
  next_line("data");
  TorusSpec spec(d, N, periods);
  if (kind == "diagonal") {
    std::vector<double> m(spec.mode_count());
    for (std::size_t n = 0; n < m.size(); ++n) {
      ModeIndex idx{0, 0, 0};
      for (int j = 0; j < d; ++j)
        if (!(is >> idx[j])) throw IoError("truncated multiplier table");
      if (!(is >> m[n])) throw IoError("truncated multiplier table");
      if (spec.index(idx) != n) throw IoError("multiplier table out of mode order");
    }
    return SmoothingOperator::diagonal(spec, std::move(m));
  }
  if (kind == "dense") return SmoothingOperator::dense(spec, get_complex(is, spec.mode_count() * spec.mode_count()));
  throw IoError("unknown operator kind '" + kind + "'");
}

void write_csv_preamble(std::ostream& os, const Provenance& p) {
  os << "# schema " << kSchema << "\n# config_hash " << p.config_hash << "\n# seed " << p.seed << "\n";
}

Provenance read_csv_preamble(std::istream& is) {
  Provenance p;
  std::string line;
  bool schema = false;
  while (is.peek() == '#') {
    std::getline(is, line);
    std::istringstream ls(line.substr(1));
    std::string key, value;
    ls >> key >> value;
    if (key == "schema") {
      if (value != kSchema) throw IoError("unsupported schema '" + value + "'");
      schema = true;
    } else if (key == "config_hash") {
      p.config_hash = value;
    } else if (key == "seed") {
      p.seed = std::stoull(value);
    }
  }
  if (!schema) throw IoError("missing schema line");
  return p;
}

void write_observables_csv(std::ostream& os, const Provenance& p, double s, const std::vector<ObservableRow>& rows) {
  write_csv_preamble(os, p);
  os << "t,mass,energy,hs_norm(" << fmt(s) << "),running_xsb\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.t << ',' << r.mass << ',' << r.energy << ',' << r.hs << ',' << r.running_xsb << '\n';
}

std::string report_json(const EnsembleReport& rep, int indent) {
  json j;
  j["schema"] = kSchema;
  j["config-hash"] = rep.config_hash;
  j["seed"] = rep.seed;
  json per = json::object();
  for (const auto& m : rep.moments) {
    per[m.observable].push_back(
        {{"m", m.m}, {"estimate", sanitize(m.estimate)}, {"SE", sanitize(m.se)}, {"paths", m.paths},
         {"events", m.events}});
  }
  j["per-observable"] = per;
  json drift = json::array();
  for (const auto& d : rep.drift) drift.push_back({d.t, sanitize(d.r), sanitize(d.se)});
  j["drift"] = drift;
  json events = json::array();
  for (const auto& e : rep.events) {
    json ev{{"path", e.path}, {"kind", e.kind}, {"message", e.message}};
    ev["t"] = e.t ? json(*e.t) : json(nullptr);
    events.push_back(ev);
  }
  j["events"] = events;
  return j.dump(indent);
}

void write_verifier_csv(std::ostream& os, const Provenance& p, const std::string& estimate,
                        const std::vector<SweepEntry>& sweep) {
  write_csv_preamble(os, p);
  os << "# estimate " << estimate << "\n";
  os << "N,sample_id,ratio\n" << std::setprecision(17);
  for (const auto& e : sweep)
    for (std::size_t i = 0; i < e.stats.ratios.size(); ++i) os << e.N << ',' << i << ',' << e.stats.ratios[i] << '\n';
}

std::string verifier_json(const Provenance& p, const std::string& estimate, const std::vector<SweepEntry>& sweep,
                          int indent) {
  json j;
  j["schema"] = kSchema;
  j["config-hash"] = p.config_hash;
  j["seed"] = p.seed;
  j["estimate"] = estimate;
  json rows = json::array();
  for (const auto& e : sweep)
    rows.push_back({{"N", e.N},
                    {"samples", e.stats.samples()},
                    {"max", sanitize(e.stats.max)},
                    {"mean", sanitize(e.stats.mean)},
                    {"profile", e.stats.profiles.empty() ? json::array() : json(amplitude_set(e.stats.profiles))}});
  j["sweep"] = rows;
  return j.dump(indent);
}

void write_meta(const std::string& path, const Provenance& p) {
  auto os = open_out(path + ".meta.json", std::ios::out);
  os << json{{"schema", kSchema}, {"config-hash", p.config_hash}, {"seed", p.seed}}.dump(2) << '\n';
  finish(os, path + ".meta.json");
}

Provenance read_meta(const std::string& path) {
  auto is = open_in(path + ".meta.json", std::ios::in);
  try {
    const json j = json::parse(is);
    if (j.at("schema").get<std::string>() != kSchema) throw IoError("unsupported schema in meta file");
    return Provenance{j.at("config-hash").get<std::string>(), j.at("seed").get<std::uint64_t>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed meta file: ") + e.what());
  }
}

}  // namespace snls::io
