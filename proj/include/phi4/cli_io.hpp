#pragma once

// Run configuration, orchestration of the four entry points, and the on-disk
// formats (JSON manifest, CSV tables, binary field snapshots). See
// docs/formats.md for the byte-level layouts.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "phi4/estimators.hpp"
#include "phi4/renormalization.hpp"

namespace phi4 {

enum class RunMode { simulate, renorm_table, tightness_report, selfcheck };

std::string_view to_string(RunMode m);
RunMode parse_mode(std::string_view s);  // throws ConfigError

struct RunConfig {
  RunMode mode = RunMode::simulate;
  ModelParams model;
  ExponentSet exponents;
  int ensemble = 1;
  int snapshot_every = 10;
  double burn_in_T = 5.0;
  int pcn_steps = 10000;
  double pcn_beta = 0.2;
  bool store_fields = false;
  std::filesystem::path output_dir = "phi4_out";
  // renorm-table
  int renorm_max_N = 4;
  // tightness-report
  std::vector<std::filesystem::path> runs;
  double red_flag_factor = 3.0;
  int min_ensemble = 30;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
  bool operator==(const RunConfig&) const;
};

/// INI document: sections [run], [model], [exponents], [renorm], [tightness].
/// Missing keys keep their defaults; unknown keys are rejected. The grid
/// defaults to K = 2^{N+2} with the FFT-friendly M >= 4K+1.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& file);
/// Every key written explicitly, reals in shortest round-trip form.
std::string emit_config(const RunConfig& c);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// ------------------------------------------------------------------ formats

enum class FieldKind : std::uint32_t { xtilde = 0, x2 = 1, xlt = 2, xgeq = 3 };

struct FieldRecord {
  FieldKind kind = FieldKind::xtilde;
  int N = 0;
  double t = 0.0;
  FourierField field;
};

inline constexpr std::uint32_t field_format_version = 1;

void write_field(std::ostream& os, const FieldRecord& r);
FieldRecord read_field(std::istream& is);  // throws std::runtime_error

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string version_string();

// -------------------------------------------------------------- entry points

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_blowup = 3, exit_selfcheck = 4 };

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;
};

/// Dispatches on config.mode. Never throws for configuration, blow-up or
/// selfcheck failures; those become exit codes with an error record written
/// to `error.json` in the output directory (when it can be created) and to
/// `log`.
RunOutcome run(const RunConfig& config, std::ostream& log);

/// Per-trajectory estimates read back from a simulate output directory.
std::vector<EstimatorReport> read_estimates(const std::filesystem::path& run_dir);

}  // namespace phi4
