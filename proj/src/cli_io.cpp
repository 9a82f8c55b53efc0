#include "phi4/cli_io.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include "phi4/errors.hpp"
#include "phi4/kernels.hpp"
#include "phi4/selfcheck.hpp"
#include "phi4/trajectory.hpp"

#ifndef PHI4_VERSION
#define PHI4_VERSION "0.0.0"
#endif

namespace phi4 {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string version_string() { return PHI4_VERSION; }

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::renorm_table: return "renorm-table";
    case RunMode::tightness_report: return "tightness-report";
    case RunMode::selfcheck: return "selfcheck";
  }
  return "simulate";
}

RunMode parse_mode(std::string_view s) {
  for (RunMode m : {RunMode::simulate, RunMode::renorm_table, RunMode::tightness_report,
                    RunMode::selfcheck}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// ------------------------------------------------------------------- config

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a real number, got '" + v + "'");
  }
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<fs::path> to_paths(const std::string& v) {
  std::vector<fs::path> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = trim(v.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct GridKeys {
  std::optional<int> K, M;
};

using Setter = std::function<void(RunConfig&, GridKeys&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [](double RunConfig::*m) {
      return Setter([m](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
        c.*m = to_real(k, v);
      });
    };
    auto integer = [](int RunConfig::*m) {
      return Setter([m](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
        c.*m = to_int<int>(k, v);
      });
    };
    auto model_real = [](double ModelParams::*m) {
      return Setter([m](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
        c.model.*m = to_real(k, v);
      });
    };
    auto expo = [](double ExponentSet::*m) {
      return Setter([m](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
        c.exponents.*m = to_real(k, v);
      });
    };
    t["run.mode"] = [](RunConfig& c, GridKeys&, const std::string&, const std::string& v) {
      c.mode = parse_mode(v);
    };
    t["run.output_dir"] = [](RunConfig& c, GridKeys&, const std::string&,
                             const std::string& v) { c.output_dir = v; };
    t["run.ensemble"] = integer(&RunConfig::ensemble);
    t["run.snapshot_every"] = integer(&RunConfig::snapshot_every);
    t["run.burn_in_T"] = real(&RunConfig::burn_in_T);
    t["run.pcn_steps"] = integer(&RunConfig::pcn_steps);
    t["run.pcn_beta"] = real(&RunConfig::pcn_beta);
    t["run.store_fields"] = [](RunConfig& c, GridKeys&, const std::string& k,
                               const std::string& v) { c.store_fields = to_bool(k, v); };
    t["model.N"] = [](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
      c.model.N = to_int<int>(k, v);
    };
    t["model.m0"] = model_real(&ModelParams::m0);
    t["model.lambda"] = model_real(&ModelParams::lambda);
    t["model.lambda0"] = model_real(&ModelParams::lambda0);
    t["model.T"] = model_real(&ModelParams::T);
    t["model.dt"] = model_real(&ModelParams::dt);
    t["model.seed"] = [](RunConfig& c, GridKeys&, const std::string& k, const std::string& v) {
      c.model.seed = to_int<std::uint64_t>(k, v);
    };
    t["model.K"] = [](RunConfig&, GridKeys& g, const std::string& k, const std::string& v) {
      g.K = to_int<int>(k, v);
    };
    t["model.M"] = [](RunConfig&, GridKeys& g, const std::string& k, const std::string& v) {
      g.M = to_int<int>(k, v);
    };
    t["exponents.alpha"] = expo(&ExponentSet::alpha);
    t["exponents.eps"] = expo(&ExponentSet::eps);
    t["exponents.gamma"] = expo(&ExponentSet::gamma);
    t["exponents.eta"] = expo(&ExponentSet::eta);
    t["exponents.q"] = expo(&ExponentSet::q);
    t["exponents.eps_tilde"] = expo(&ExponentSet::eps_tilde);
    t["renorm.max_N"] = integer(&RunConfig::renorm_max_N);
    t["tightness.runs"] = [](RunConfig& c, GridKeys&, const std::string&,
                             const std::string& v) { c.runs = to_paths(v); };
    t["tightness.factor"] = real(&RunConfig::red_flag_factor);
    t["tightness.min_ensemble"] = integer(&RunConfig::min_ensemble);
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  exponents.validate();
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(ensemble >= 1, "ensemble >= 1 violated: ensemble=" + std::to_string(ensemble));
  need(snapshot_every >= 1,
       "snapshot_every >= 1 violated: snapshot_every=" + std::to_string(snapshot_every));
  need(burn_in_T >= 0.0, "burn_in_T >= 0 violated: burn_in_T=" + format_double(burn_in_T));
  need(pcn_steps >= 0, "pcn_steps >= 0 violated: pcn_steps=" + std::to_string(pcn_steps));
  need(pcn_beta > 0.0 && pcn_beta <= 1.0,
       "pcn_beta ∈ (0,1] violated: pcn_beta=" + format_double(pcn_beta));
  need(renorm_max_N >= 0 && renorm_max_N <= 5,
       "renorm max_N ∈ [0,5] violated: max_N=" + std::to_string(renorm_max_N));
  need(red_flag_factor > 1.0, "tightness factor > 1 violated: factor=" +
                                  format_double(red_flag_factor));
  need(min_ensemble >= 1, "min_ensemble >= 1 violated");
  const double steps = model.T / model.dt;
  need(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps),
       "T must be a multiple of dt: T=" + format_double(model.T) +
           ", dt=" + format_double(model.dt));
  need(!output_dir.empty(), "output_dir must not be empty");
  if (mode == RunMode::tightness_report) need(!runs.empty(), "tightness.runs is empty");
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = model;
  const auto& b = o.model;
  const bool model_eq = a.N == b.N && a.m0 == b.m0 && a.lambda == b.lambda &&
                        a.lambda0 == b.lambda0 && a.T == b.T && a.dt == b.dt &&
                        a.seed == b.seed && a.grid == b.grid;
  return model_eq && mode == o.mode && exponents == o.exponents && ensemble == o.ensemble &&
         snapshot_every == o.snapshot_every && burn_in_T == o.burn_in_T &&
         pcn_steps == o.pcn_steps && pcn_beta == o.pcn_beta &&
         store_fields == o.store_fields && output_dir == o.output_dir &&
         renorm_max_N == o.renorm_max_N && runs == o.runs &&
         red_flag_factor == o.red_flag_factor && min_ensemble == o.min_ensemble;
}

RunConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig c;
  GridKeys grid;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside any section");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw ConfigError("unknown key '" + full + "'");
      it->second(c, grid, full, trim(node.data()));
    }
  }
  if (c.model.N < 0 || c.model.N > 8) {
    throw ConfigError("model.N ∈ [0,8] violated: N=" + std::to_string(c.model.N));
  }
  try {
    if (!grid.K) {
      if (grid.M) throw ConfigError("model.M given without model.K");
      c.model.grid = default_grid(c.model.N);
    } else if (!grid.M) {
      c.model.grid = make_simulation_grid(*grid.K);
    } else {
      c.model.grid = make_grid(*grid.K, *grid.M);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model grid: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  const auto& m = c.model;
  const auto& e = c.exponents;
  o << "[run]\n"
    << "mode = " << to_string(c.mode) << "\n"
    << "output_dir = " << c.output_dir.string() << "\n"
    << "ensemble = " << c.ensemble << "\n"
    << "snapshot_every = " << c.snapshot_every << "\n"
    << "burn_in_T = " << format_double(c.burn_in_T) << "\n"
    << "pcn_steps = " << c.pcn_steps << "\n"
    << "pcn_beta = " << format_double(c.pcn_beta) << "\n"
    << "store_fields = " << (c.store_fields ? "true" : "false") << "\n\n"
    << "[model]\n"
    << "N = " << m.N << "\n"
    << "m0 = " << format_double(m.m0) << "\n"
    << "lambda = " << format_double(m.lambda) << "\n"
    << "lambda0 = " << format_double(m.lambda0) << "\n"
    << "T = " << format_double(m.T) << "\n"
    << "dt = " << format_double(m.dt) << "\n"
    << "seed = " << m.seed << "\n"
    << "K = " << m.grid.K << "\n"
    << "M = " << m.grid.M << "\n\n"
    << "[exponents]\n"
    << "alpha = " << format_double(e.alpha) << "\n"
    << "eps = " << format_double(e.eps) << "\n"
    << "gamma = " << format_double(e.gamma) << "\n"
    << "eta = " << format_double(e.eta) << "\n"
    << "q = " << format_double(e.q) << "\n"
    << "eps_tilde = " << format_double(e.eps_tilde) << "\n\n"
    << "[renorm]\n"
    << "max_N = " << c.renorm_max_N << "\n\n"
    << "[tightness]\n"
    << "runs = ";
  for (std::size_t i = 0; i < c.runs.size(); ++i) o << (i ? ", " : "") << c.runs[i].string();
  o << "\n"
    << "factor = " << format_double(c.red_flag_factor) << "\n"
    << "min_ensemble = " << c.min_ensemble << "\n";
  return o.str();
}

// ------------------------------------------------------------------ formats

namespace {

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& b, double x) { put_u64(b, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_le(std::istream& is, int bytes) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), bytes)) {
    throw std::runtime_error("field file truncated");
  }
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le(is, 8)); }

}  // namespace

void write_field(std::ostream& os, const FieldRecord& r) {
  const TorusGrid& g = r.field.grid();
  std::string b;
  b.reserve(32 + 16 * g.mode_count());
  b.append("PHI4");
  put_u32(b, field_format_version);
  put_u32(b, static_cast<std::uint32_t>(r.kind));
  put_u32(b, static_cast<std::uint32_t>(r.N));
  put_u32(b, static_cast<std::uint32_t>(g.K));
  put_u32(b, static_cast<std::uint32_t>(g.M));
  put_f64(b, r.t);
  for (const cplx& c : r.field.coeffs()) {
    put_f64(b, c.real());
    put_f64(b, c.imag());
  }
  os.write(b.data(), static_cast<std::streamsize>(b.size()));
}

FieldRecord read_field(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string_view(magic, 4) != "PHI4") {
    throw std::runtime_error("not a field file (bad magic)");
  }
  const auto version = static_cast<std::uint32_t>(get_le(is, 4));
  if (version != field_format_version) {
    throw std::runtime_error("unsupported field format version " + std::to_string(version));
  }
  FieldRecord r;
  r.kind = static_cast<FieldKind>(get_le(is, 4));
  r.N = static_cast<int>(get_le(is, 4));
  const int K = static_cast<int>(get_le(is, 4));
  const int M = static_cast<int>(get_le(is, 4));
  r.t = get_f64(is);
  r.field = FourierField(make_grid(K, M));
  for (cplx& c : r.field.coeffs_mut()) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    c = {re, im};
  }
  return r;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

// -------------------------------------------------------------- entry points

namespace {

struct Failure {
  int code;
  std::string kind;
  std::string message;
  json extra = json::object();
};

json manifest_for(const RunConfig& c) {
  json m;
  m["format_version"] = 1;
  m["code_version"] = version_string();
  m["mode"] = std::string(to_string(c.mode));
  m["config_ini"] = emit_config(c);
  const auto& p = c.model;
  m["model"] = {{"N", p.N},         {"m0", p.m0},   {"lambda", p.lambda},
                {"lambda0", p.lambda0}, {"T", p.T}, {"dt", p.dt},
                {"seed", p.seed},   {"K", p.grid.K}, {"M", p.grid.M}};
  const auto& e = c.exponents;
  m["exponents"] = {{"alpha", e.alpha}, {"eps", e.eps}, {"gamma", e.gamma},
                    {"eta", e.eta},     {"q", e.q},     {"eps_tilde", e.eps_tilde}};
  m["profiles"] = {
      {"psi1", "1 on [0,1], smooth_step_down(r-1) on [1,2], 0 beyond; h(x)=exp(-1/x)"},
      {"psi2", "1 on [0,2], linear to 0 on [2,4]"},
      {"dyadic_theta", "smooth_step_down(3(r-1))"},
      {"besov_r", "inf"},
      {"time_integrator", "exponential Euler, forcing frozen at interval start"},
      {"drift_grid", "K = 2^(N+1), FFT-friendly M >= 4K+1"}};
  m["streams"] =
      "stream id = trajectory index; engine = mt19937_64(splitmix64 chain of seed, stream, "
      "purpose, counter); noise counter = step index (negative during burn-in)";
  return m;
}

std::string csv_header(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s + "\n";
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output_dir not writable: " + dir.string());
  }
  const fs::path probe = dir / ".phi4_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output_dir not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

// RAII: trajectories are the parallel level, everything inside runs serially.
class OuterParallelism {
 public:
  OuterParallelism() : saved_(omp_get_max_active_levels()) { omp_set_max_active_levels(1); }
  ~OuterParallelism() { omp_set_max_active_levels(saved_); }
  OuterParallelism(const OuterParallelism&) = delete;
  OuterParallelism& operator=(const OuterParallelism&) = delete;

 private:
  int saved_;
};

struct TrajectoryResult {
  std::vector<Observables> observed;
  std::optional<EstimatorReport> estimate;
  double pcn_acceptance = 0.0;
  std::optional<Failure> failure;
};

std::string field_name(std::uint64_t traj, std::int64_t step, FieldKind kind) {
  static constexpr const char* names[] = {"xtilde", "x2", "xlt", "xgeq"};
  char buf[64];
  std::snprintf(buf, sizeof buf, "traj%06llu_step%08lld_%s.phi4",
                static_cast<unsigned long long>(traj), static_cast<long long>(step),
                names[static_cast<int>(kind)]);
  return buf;
}

TrajectoryResult run_trajectory(const RunConfig& c, const RenormConstants& consts,
                                std::uint64_t index, std::int64_t steps) {
  TrajectoryResult res;
  TrajectoryOptions opt;
  opt.burn_in_T = c.burn_in_T;
  opt.pcn_steps = c.pcn_steps;
  opt.pcn_beta = c.pcn_beta;
  try {
    Trajectory tr(c.model, consts, index, opt);
    res.pcn_acceptance = tr.pcn_acceptance();
    const FourierField x0 = tr.sqe().Xtilde;
    SnapshotSeries series;
    series.N = c.model.N;
    ZsAccumulator zs(c.exponents);
    auto record = [&] {
      const FourierField x2 = tr.X2();
      res.observed.push_back(tr.observe());
      zs.add(tr.enhanced());
      if (c.store_fields) {
        const std::pair<FieldKind, const FourierField*> fields[] = {
            {FieldKind::xtilde, &tr.sqe().Xtilde},
            {FieldKind::x2, &x2},
            {FieldKind::xlt, &tr.sqe().Xlt},
            {FieldKind::xgeq, &tr.sqe().Xgeq}};
        for (const auto& [kind, f] : fields) {
          std::ostringstream os;
          write_field(os, {kind, c.model.N, tr.time(), *f});
          const fs::path path = c.output_dir / "fields" / field_name(index, tr.steps_taken(), kind);
#pragma omp critical(phi4_writer)
          write_file_atomic(path, os.str());
        }
      }
      series.add(tr.time(), x2, tr.sqe().Xlt, tr.sqe().Xgeq);
    };
    record();
    for (std::int64_t n = 1; n <= steps; ++n) {
      tr.step();
      if (n % c.snapshot_every == 0 || n == steps) record();
    }
    if (series.size() >= 2) {
      EstimatorReport r = estimate_trajectory(series, zs.values(), x0, c.exponents,
                                              c.model.lambda);
      r.seed = c.model.seed;
      r.stream = index;
      r.dt = c.model.dt;
      res.estimate = r;
    }
  } catch (const BlowUpError& e) {
    res.failure = Failure{exit_blowup, "blowup", e.what(),
                          {{"trajectory", index}, {"time", e.time()}}};
  }
  return res;
}

const std::vector<std::string>& estimate_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"trajectory",   "N",       "seed",     "stream",
                                  "dt",           "pcn_acceptance",      "X_functional",
                                  "Y_functional", "Y_q",     "holder_B43_alpha",
                                  "sup_lt",       "sup_geq", "x0_norm_sq"};
    for (const char* n : zs_names) c.emplace_back(n);
    return c;
  }();
  return cols;
}

std::optional<Failure> simulate(const RunConfig& c, std::ostream& log) {
  const RenormConstants consts = make_constants(c.model.N, c.model.m0);
  const auto steps = static_cast<std::int64_t>(std::llround(c.model.T / c.model.dt));
  json manifest = manifest_for(c);
  manifest["derived"] = {{"steps", steps},
                         {"burn_in_steps", burn_in_steps(c.burn_in_T, c.model.dt)},
                         {"C1", consts.C1},
                         {"C2", consts.C2}};
  manifest["files"] = steps > 0 ? json{"observables.csv", "estimates.csv"}
                                : json{"observables.csv"};
  if (c.store_fields) fs::create_directories(c.output_dir / "fields");
  write_file_atomic(c.output_dir / "manifest.json", manifest.dump(2) + "\n");

  const int n = c.ensemble;
  std::vector<TrajectoryResult> results(static_cast<std::size_t>(n));
  {
    OuterParallelism outer;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
      results[static_cast<std::size_t>(i)] =
          run_trajectory(c, consts, static_cast<std::uint64_t>(i), steps);
    }
  }
  for (const auto& r : results) {
    if (r.failure) return r.failure;
  }

  std::string obs = csv_header({"trajectory", "step", "t", "p2x_l2sq", "energy", "x2_l2sq",
                                "xlt_l2sq", "xgeq_l2sq", "split_gap"});
  std::string est = csv_header(estimate_columns());
  for (int i = 0; i < n; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    for (const auto& o : r.observed) {
      obs += std::to_string(i) + "," + std::to_string(o.step) + "," + format_double(o.t) + "," +
             format_double(o.p2x_l2sq) + "," + format_double(o.energy) + "," +
             format_double(o.x2_l2sq) + "," + format_double(o.xlt_l2sq) + "," +
             format_double(o.xgeq_l2sq) + "," + format_double(o.split_gap) + "\n";
    }
    if (r.estimate) {
      const auto& e = *r.estimate;
      est += std::to_string(i) + "," + std::to_string(e.N) + "," + std::to_string(e.seed) +
             "," + std::to_string(e.stream) + "," + format_double(e.dt) + "," +
             format_double(r.pcn_acceptance);
      for (double v : {e.X_functional, e.Y_functional, e.Y_q, e.holder_seminorm, e.sup_lt,
                       e.sup_geq, e.x0_norm_sq}) {
        est += "," + format_double(v);
      }
      for (double v : e.zs) est += "," + format_double(v);
      est += "\n";
    }
  }
  write_file_atomic(c.output_dir / "observables.csv", obs);
  if (steps > 0) write_file_atomic(c.output_dir / "estimates.csv", est);
  log << "simulate: " << n << " trajectories, " << steps << " steps each -> "
      << c.output_dir.string() << "\n";
  return std::nullopt;
}

std::optional<Failure> renorm_table(const RunConfig& c, std::ostream& log) {
  write_file_atomic(c.output_dir / "manifest.json", manifest_for(c).dump(2) + "\n");
  std::string csv = csv_header({"N", "K", "C1", "C2", "C1_ratio", "C2_increment"});
  double c1_prev = 0.0, c2_prev = 0.0;
  for (int N = 0; N <= c.renorm_max_N; ++N) {
    const RenormConstants k = make_constants(N, c.model.m0, c.renorm_max_N);
    csv += std::to_string(N) + "," + std::to_string(pn_min_K(N, 1)) + "," +
           format_double(k.C1) + "," + format_double(k.C2) + "," +
           (N ? format_double(k.C1 / c1_prev) : "") + "," +
           (N ? format_double(k.C2 - c2_prev) : "") + "\n";
    c1_prev = k.C1;
    c2_prev = k.C2;
  }
  write_file_atomic(c.output_dir / "renorm_table.csv", csv);
  log << "renorm-table: N = 0.." << c.renorm_max_N << " -> "
      << (c.output_dir / "renorm_table.csv").string() << "\n";
  return std::nullopt;
}

std::optional<Failure> tightness(const RunConfig& c, std::ostream& log) {
  write_file_atomic(c.output_dir / "manifest.json", manifest_for(c).dump(2) + "\n");
  std::vector<EstimatorReport> all;
  for (const auto& dir : c.runs) {
    auto r = read_estimates(dir);
    all.insert(all.end(), r.begin(), r.end());
  }
  TightnessTable table;
  try {
    table = tightness_report(all, c.red_flag_factor, static_cast<std::size_t>(c.min_ensemble));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("tightness-report: ") + e.what());
  }
  std::string csv = csv_header({"N", "quantity", "n", "mean", "se", "red_flag"});
  for (const auto& row : table.rows) {
    const bool flag = std::find(table.red_flags.begin(), table.red_flags.end(), row.quantity) !=
                      table.red_flags.end();
    csv += std::to_string(row.N) + "," + row.quantity + "," + std::to_string(row.n) + "," +
           format_double(row.mean) + "," + format_double(row.se) + "," + (flag ? "1" : "0") +
           "\n";
  }
  write_file_atomic(c.output_dir / "tightness.csv", csv);
  log << "tightness-report: " << all.size() << " trajectories, "
      << table.red_flags.size() << " red flag(s)";
  for (const auto& f : table.red_flags) log << " " << f;
  log << "\n";
  return std::nullopt;
}

std::optional<Failure> selfcheck(const RunConfig& c, std::ostream& log) {
  const auto items = run_selfcheck(c.model.seed);
  std::string csv = csv_header({"check", "value", "tolerance", "pass"});
  bool ok = true;
  for (const auto& it : items) {
    csv += it.name + "," + format_double(it.value) + "," + format_double(it.tolerance) + "," +
           (it.pass ? "1" : "0") + "\n";
    log << (it.pass ? "PASS " : "FAIL ") << it.name << " residual=" << it.value
        << " tol=" << it.tolerance << "\n";
    ok = ok && it.pass;
  }
  write_file_atomic(c.output_dir / "selfcheck.csv", csv);
  if (!ok) return Failure{exit_selfcheck, "selfcheck", "selfcheck failed"};
  return std::nullopt;
}

void write_error_record(const RunConfig& c, const Failure& f) {
  json rec = {{"status", "error"},
              {"exit_code", f.code},
              {"kind", f.kind},
              {"message", f.message},
              {"code_version", version_string()}};
  for (const auto& [k, v] : f.extra.items()) rec[k] = v;
  std::error_code ec;
  if (fs::is_directory(c.output_dir, ec)) {
    try {
      write_file_atomic(c.output_dir / "error.json", rec.dump(2) + "\n");
    } catch (const std::exception&) {
      // the record still goes to the log
    }
  }
}

}  // namespace

RunOutcome run(const RunConfig& config, std::ostream& log) {
  std::optional<Failure> failure;
  try {
    config.validate();
    prepare_dir(config.output_dir);
    switch (config.mode) {
      case RunMode::simulate: failure = simulate(config, log); break;
      case RunMode::renorm_table: failure = renorm_table(config, log); break;
      case RunMode::tightness_report: failure = tightness(config, log); break;
      case RunMode::selfcheck: failure = selfcheck(config, log); break;
    }
  } catch (const ConfigError& e) {
    failure = Failure{exit_config, "config", e.what()};
  } catch (const BlowUpError& e) {
    failure = Failure{exit_blowup, "blowup", e.what(), {{"time", e.time()}}};
  } catch (const BudgetError& e) {
    failure = Failure{exit_config, "budget", e.what()};
  } catch (const std::exception& e) {
    failure = Failure{1, "internal", e.what()};
  }
  if (!failure) return {exit_ok, "ok"};
  write_error_record(config, *failure);
  json line = {{"status", "error"}, {"exit_code", failure->code}, {"kind", failure->kind},
               {"message", failure->message}};
  log << line.dump() << "\n";
  return {failure->code, failure->message};
}

std::vector<EstimatorReport> read_estimates(const fs::path& run_dir) {
  std::ifstream mf(run_dir / "manifest.json");
  if (!mf) throw ConfigError("no manifest.json in " + run_dir.string());
  json m;
  try {
    mf >> m;
  } catch (const json::exception& e) {
    throw ConfigError("bad manifest in " + run_dir.string() + ": " + e.what());
  }
  const RunConfig rc = parse_config(m.at("config_ini").get<std::string>());

  std::ifstream in(run_dir / "estimates.csv");
  if (!in) throw ConfigError("no estimates.csv in " + run_dir.string());
  std::string line;
  std::getline(in, line);
  if (line + "\n" != csv_header(estimate_columns())) {
    throw ConfigError("unexpected estimates.csv header in " + run_dir.string());
  }
  std::vector<EstimatorReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != estimate_columns().size()) {
      throw ConfigError("malformed row in " + (run_dir / "estimates.csv").string());
    }
    EstimatorReport r;
    r.N = to_int<int>("N", cells[1]);
    r.seed = to_int<std::uint64_t>("seed", cells[2]);
    r.stream = to_int<std::uint64_t>("stream", cells[3]);
    r.dt = to_real("dt", cells[4]);
    r.exponents = rc.exponents;
    r.X_functional = to_real("X_functional", cells[6]);
    r.Y_functional = to_real("Y_functional", cells[7]);
    r.Y_q = to_real("Y_q", cells[8]);
    r.holder_seminorm = to_real("holder", cells[9]);
    r.sup_lt = to_real("sup_lt", cells[10]);
    r.sup_geq = to_real("sup_geq", cells[11]);
    r.x0_norm_sq = to_real("x0_norm_sq", cells[12]);
    for (std::size_t i = 0; i < zs_count; ++i) r.zs[i] = to_real(zs_names[i], cells[13 + i]);
    out.push_back(r);
  }
  return out;
}

}  // namespace phi4
