#pragma once

// Persistence: binary snapshots and trajectories, operator files, observer
// CSV and report JSON.  Binary data is little-endian IEEE-754.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "snls/ensemble.hpp"
#include "snls/estimates.hpp"
#include "snls/functionals.hpp"
#include "snls/noise.hpp"
#include "snls/torus.hpp"

namespace snls::io {

inline constexpr const char* kSchema = "snls-schema-1";

struct Snapshot {
  SpectralField field;
  double t = 0.0;
};

// "SNLS1", d and N as uint32, d periods and t as doubles, then (2N+1)^d
// complex doubles (re, im) in row-major mode order.
void write_snapshot(std::ostream& os, const SpectralField& f, double t);
Snapshot read_snapshot(std::istream& is);
void save_snapshot(const std::string& path, const SpectralField& f, double t);
Snapshot load_snapshot(const std::string& path);

// A trajectory file is a plain concatenation of snapshots.
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

// Text header lines then a multiplier table (diagonal) or the dense matrix
// as raw complex doubles in snapshot byte order:
//   snls-operator 1
//   kind diagonal|dense
//   d <d>
//   N <N>
//   periods <a_1> ... <a_d>
//   s <s_1> ... <s_m>
//   hs <||phi||_{HS(L^2;H^{s_1})}> ...
//   data
void save_operator(const std::string& path, const SmoothingOperator& op, const std::vector<double>& s_list = {0.0});
SmoothingOperator load_operator(const std::string& path);

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

// "# schema ...", "# config_hash ...", "# seed ..." lines.
void write_csv_preamble(std::ostream& os, const Provenance& p);
// Reads the preamble back; the stream is left at the column header line.
Provenance read_csv_preamble(std::istream& is);

struct ObservableRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double hs = 0.0;
  double running_xsb = 0.0;
};
void write_observables_csv(std::ostream& os, const Provenance& p, double s, const std::vector<ObservableRow>& rows);

std::string report_json(const EnsembleReport& rep, int indent = 2);

struct SweepEntry {
  int N = 0;
  RatioStats stats;
};
void write_verifier_csv(std::ostream& os, const Provenance& p, const std::string& estimate,
                        const std::vector<SweepEntry>& sweep);
std::string verifier_json(const Provenance& p, const std::string& estimate, const std::vector<SweepEntry>& sweep,
                          int indent = 2);

// Sidecar <path>.meta.json for binary outputs.
void write_meta(const std::string& path, const Provenance& p);
Provenance read_meta(const std::string& path);

}  // namespace snls::io
