#pragma once

// stdmap-lab: command-line front end.  Needs CLI11, nlohmann/json and
// OpenSSL (libcrypto) for output digests.
//
// Exit codes: 0 success, 1 parse error (usage on stderr), 2 violated
// precondition or failed check (the condition is named on stderr).

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"
#include "stdmap/geometry.hpp"
#include "stdmap/numeric/parallel.hpp"
#include "stdmap/observables.hpp"
#include "stdmap/pairs/decomposition.hpp"
#include "stdmap/stats/experiments.hpp"

namespace stdmap::cli {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small helpers.

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

// Round-trip formatting for CSV cells.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Non-negative integer from "42", "1e6" or "2.5e5".
inline std::uint64_t parse_count(const std::string& s, const std::string& flag) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size() && s.find('-') == std::string::npos) return v;
  } catch (const std::logic_error&) {
  }
  try {
    std::size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos == s.size() && d >= 0.0 && d == std::floor(d) && d < 0x1.0p63) return static_cast<std::uint64_t>(d);
  } catch (const std::logic_error&) {
  }
  throw CLI::ValidationError(flag, "expected a non-negative integer, got " + s);
}

template <class T>
CLI::Option* add_count(CLI::App* app, const std::string& name, T& target, const std::string& desc) {
  return app->add_option_function<std::string>(
      name, [&target, name](const std::string& s) { target = static_cast<T>(parse_count(s, name)); }, desc);
}

template <class T>
CLI::Option* add_count(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& desc) {
  return app->add_option_function<std::string>(
      name, [&target, name](const std::string& s) { target = static_cast<T>(parse_count(s, name)); }, desc);
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir_);
    files_.push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + (dir_ / name).string());
    return f;
  }

  void write_json(const std::string& name, const Json& j) {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }

  [[nodiscard]] const fs::path& dir() const { return dir_; }
  [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

// Options shared by all subcommands.
struct Common {
  std::string out = ".";
  unsigned threads = numeric::default_thread_count();
  std::uint64_t seed = 0;
  std::string config;
};

inline void add_common(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  add_count(sub, "--threads", c.threads, "Worker threads (default: STDMAP_LAB_THREADS or all cores)");
  if (with_seed) add_count(sub, "--seed", c.seed, "Random seed");
  sub->add_option("--config", c.config, "key = value file; flags on the command line win");
}

// Map parameters from --L or --epsilon/--alpha.
struct ParamFlags {
  std::optional<double> L, epsilon, alpha;

  void add(CLI::App* sub) {
    auto* l = sub->add_option("--L", L, "Standard-map parameter L");
    auto* e = sub->add_option("--epsilon", epsilon, "Slow-fast scale epsilon");
    auto* a = sub->add_option("--alpha", alpha, "Slow-fast exponent alpha");
    l->excludes(e);
    e->needs(a);
    a->needs(e);
  }

  [[nodiscard]] MapParams resolve() const {
    if (epsilon) return MapParams::from_slow_fast(*epsilon, *alpha);
    if (!L) throw InvalidArgument("either --L or --epsilon with --alpha is required");
    return MapParams::from_L(*L, alpha);
  }

  [[nodiscard]] Json echo() const {
    Json j;
    if (L) j["L"] = *L;
    if (epsilon) j["epsilon"] = *epsilon;
    if (alpha) j["alpha"] = *alpha;
    return j;
  }
};

inline Json summary_json(const stats::SampleSummary& s) {
  Json j;
  j["M"] = s.M;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["skewness"] = s.skewness;
  j["ks"] = s.ks;
  j["reference_variance"] = s.reference_variance;
  j["stderr_mean"] = s.stderr_mean;
  j["stderr_variance"] = s.stderr_variance;
  j["N"] = s.N;
  j["L"] = s.L;
  j["n_ratio"] = s.n_ratio;
  j["scale_factor"] = s.scale_factor;
  return j;
}

inline void write_samples(OutputSet& out, const std::vector<double>& v) {
  auto f = out.open("samples.csv");
  f << "value\n";
  for (double x : v) f << fmt(x) << '\n';
}

// ---------------------------------------------------------------------------
// Config files: "key = value" lines mirroring the long flag names.  Section
// headers and comments (# or ;) are ignored.

inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    kv.emplace_back(key, value);
  }
  return kv;
}

// Inserts config-file values ahead of the command-line flags, skipping keys
// that the command line sets itself.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") path = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
  }
  if (path.empty()) return args;
  std::vector<std::string> merged(args.begin(), args.begin() + 2);
  for (const auto& [k, v] : read_config(path)) {
    if (given.count(k) || k == "config") continue;
    if (v == "true") {
      merged.push_back("--" + k);
    } else if (v != "false") {
      merged.push_back("--" + k);
      merged.push_back(v);
    }
  }
  merged.insert(merged.end(), args.begin() + 2, args.end());
  return merged;
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands.  Each returns the config echo that goes into the manifest.

inline Json run_strips(const std::vector<double>& Ls, const std::vector<double>& etas, OutputSet& out) {
  auto f = out.open("strips.csv");
  f << "L,eta,x_lo_1,x_hi_1,x_lo_2,x_hi_2,total_measure\n";
  for (double L : Ls) {
    for (double eta : etas) {
      const auto s = critical_intervals(L, eta);
      f << fmt(L) << ',' << fmt(eta) << ',' << fmt(s.intervals[0].lo) << ',' << fmt(s.intervals[0].hi) << ','
        << fmt(s.intervals[1].lo) << ',' << fmt(s.intervals[1].hi) << ',' << fmt(s.total_measure()) << '\n';
    }
  }
  return Json{{"L", Ls}, {"eta", etas}};
}

struct PushforwardFlags {
  double L = 1e3;
  int n = 1;
  double a0 = pairs::kDefaultA0;
  std::string mode = "sampled";
  std::size_t samples = 1000;
  std::size_t cap = 10'000'000;
  bool inventory = false;
  std::size_t inventory_limit = 100'000;
};

inline Json run_pushforward(const PushforwardFlags& p, const Common& c, OutputSet& out) {
  pairs::DecompositionConfig dc;
  dc.mode = p.mode == "exhaustive" ? pairs::DecompositionMode::Exhaustive : pairs::DecompositionMode::Sampled;
  dc.samples = p.samples;
  dc.seed = c.seed;
  dc.cap = p.cap;
  dc.a0 = p.a0;
  dc.threads = c.threads;
  dc.keep_inventory = p.inventory;
  dc.inventory_limit = p.inventory_limit;
  const auto led = pairs::iterate_decomposition(pairs::root_pair(p.L), p.n, dc);
  {
    auto f = out.open("ledger.csv");
    f << "step,m_L,m_I,m_J,m_E,m_E_stderr,curves_alive\n";
    for (const auto& r : led.rows) {
      f << r.step << ',' << fmt(r.m_L) << ',' << fmt(r.m_I) << ',' << fmt(r.m_J) << ',' << fmt(r.m_E) << ','
        << (r.has_stderr ? fmt(r.se_E) : std::string()) << ',' << fmt(r.curves_alive) << '\n';
    }
  }
  if (p.inventory) {
    Json inv = Json::array();
    for (const auto& e : led.inventory) {
      inv.push_back({{"id", e.id},
                     {"parent", e.parent_id},
                     {"step", e.step},
                     {"class", pairs::to_string(e.cls)},
                     {"domain", {e.domain.lo, e.domain.hi}},
                     {"preimage", {e.preimage.lo, e.preimage.hi}},
                     {"shift", e.shift},
                     {"mass", e.mass},
                     {"log_derivative_bound", e.log_derivative_bound}});
    }
    out.write_json("inventory.json", Json{{"L", p.L}, {"truncated", led.inventory_truncated}, {"curves", inv}});
  }
  return Json{{"L", p.L},       {"n", p.n},       {"a0", p.a0},          {"mode", p.mode},
              {"samples", p.samples}, {"seed", c.seed}, {"cap", p.cap}, {"inventory", p.inventory}};
}

struct StatFlags {
  ParamFlags params;
  std::optional<std::int64_t> N;
  std::size_t M = 10000;
  std::string phi = "sin";
  bool samples_csv = false;
};

inline Json run_clt(const StatFlags& s, const Common& c, OutputSet& out) {
  stats::ExperimentConfig cfg;
  cfg.params = s.params.resolve();
  cfg.N = s.N;
  cfg.M = s.M;
  cfg.seed = c.seed;
  cfg.phi = Observable::parse(s.phi);
  cfg.threads = c.threads;
  const auto r = stats::clt_experiment(cfg);
  Json conf = s.params.echo();
  conf["N"] = r.N;
  conf["M"] = s.M;
  conf["seed"] = c.seed;
  conf["phi"] = s.phi;
  out.write_json("summary.json", Json{{"subcommand", "clt"}, {"config", conf}, {"summary", summary_json(r)},
                                      {"warnings", r.warnings}});
  if (s.samples_csv) write_samples(out, r.samples);
  return conf;
}

inline Json run_diffusion(const StatFlags& s, double a, double b, const Common& c, OutputSet& out) {
  if (!s.params.epsilon) throw InvalidArgument("diffusion needs --epsilon and --alpha");
  stats::ExperimentConfig cfg;
  cfg.params = s.params.resolve();
  cfg.N = s.N;
  cfg.M = s.M;
  cfg.seed = c.seed;
  cfg.a = a;
  cfg.b = b;
  cfg.threads = c.threads;
  const auto r = stats::diffusion_experiment(cfg);
  Json conf = s.params.echo();
  conf["N"] = r.N;
  conf["M"] = s.M;
  conf["seed"] = c.seed;
  conf["a"] = a;
  conf["b"] = b;
  out.write_json("summary.json", Json{{"subcommand", "diffusion"}, {"config", conf}, {"summary", summary_json(r)},
                                      {"warnings", r.warnings}});
  if (s.samples_csv) write_samples(out, r.samples);
  return conf;
}

struct CorrFlags {
  double L = 1e3;
  int n = 1;
  std::string method = "montecarlo";
  std::size_t M = 100000;
  std::size_t K = 64;
  std::string phi = "sin";
  std::string psi = "sin";
};

inline Json run_corr(const CorrFlags& f, const Common& c, OutputSet& out) {
  stats::CorrelationConfig cfg;
  cfg.L = f.L;
  cfg.n = f.n;
  cfg.method = f.method == "ygrid" ? stats::CorrelationMethod::YGridHybrid : stats::CorrelationMethod::MonteCarlo;
  cfg.M = f.M;
  cfg.K = f.K;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  const auto r = stats::correlation(Observable::parse(f.phi), Observable::parse(f.psi), cfg);
  Json conf{{"L", f.L}, {"n", f.n}, {"method", f.method}, {"M", f.M}, {"K", f.K},
            {"phi", f.phi}, {"psi", f.psi}, {"seed", c.seed}};
  Json res{{"n", r.n},
           {"L", r.L},
           {"estimate", r.estimate},
           {"stderr", r.std_error},
           {"method", stats::to_string(r.method)},
           {"bound_value", r.bound_value},
           {"M", r.M}};
  out.write_json("summary.json", Json{{"subcommand", "corr"}, {"config", conf}, {"result", res}});
  return conf;
}

struct SimulateFlags {
  ParamFlags params;
  std::string map = "hatF";
  double x0 = 0.0;
  double y0 = 0.0;
  std::size_t n = 100;
};

inline Json run_simulate(const SimulateFlags& f, OutputSet& out) {
  const MapParams params = f.params.resolve();
  auto file = out.open("trajectory.csv");
  if (f.map == "slowfast") {
    if (!params.has_slow_fast()) throw InvalidArgument("--map slowfast needs --epsilon and --alpha");
    file << "step,x,z\n";
    const auto traj = trajectory(CylinderState<double>{f.x0, DoubleDouble(f.y0)}, params, f.n);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      file << i << ',' << fmt(traj[i].x) << ',' << fmt(traj[i].z.hi + traj[i].z.lo) << '\n';
    }
  } else {
    if (!(f.x0 >= 0.0 && f.x0 < 1.0 && f.y0 >= 0.0 && f.y0 < 1.0)) {
      throw InvalidArgument("torus start point must lie in [0,1)^2");
    }
    const DoubleDouble L = params.has_slow_fast() ? params.slow_fast_L() : DoubleDouble(params.L);
    const auto which = f.map == "F" ? TorusMap::StandardF : TorusMap::HatF;
    file << "step,x,y\n";
    const auto traj = trajectory(TorusPoint<double>{f.x0, f.y0}, L, f.n, which);
    for (std::size_t i = 0; i < traj.size(); ++i) file << i << ',' << fmt(traj[i].x) << ',' << fmt(traj[i].y) << '\n';
  }
  Json conf = f.params.echo();
  conf["map"] = f.map;
  conf["x0"] = f.x0;
  conf[f.map == "slowfast" ? "z0" : "y0"] = f.y0;
  conf["n"] = f.n;
  return conf;
}

// ---------------------------------------------------------------------------
// Dispatch.

inline int parse_and_dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr);

inline int replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
                  std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw InvalidArgument("cannot read manifest " + manifest_path);
  const Json m = Json::parse(in);
  std::vector<std::string> args{"stdmap-lab"};
  for (const auto& a : m.at("argv")) args.push_back(a.get<std::string>());
  args.push_back("--out");
  args.push_back(out_dir);
  args.push_back("--threads");
  args.push_back("1");
  std::ostringstream sink;
  const int rc = parse_and_dispatch(args, sink, err);
  if (rc != 0) return rc;
  int mismatches = 0;
  for (const auto& [name, digest] : m.at("outputs").items()) {
    const std::string now = sha256_file(fs::path(out_dir) / name);
    const bool same = now == digest.get<std::string>();
    out << (same ? "match    " : "MISMATCH ") << name << '\n';
    if (!same) ++mismatches;
  }
  if (mismatches > 0) {
    err << "error: replay produced " << mismatches << " output(s) that differ from the manifest digests\n";
    return 2;
  }
  return 0;
}

inline int parse_and_dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for the large-parameter standard map and its slow-fast relative",
               "stdmap-lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough(false);

  Common common;

  auto* strips = app.add_subcommand("strips", "Critical strip endpoints and measures (CSV)");
  std::vector<double> strip_L{1e3, 1e4, 1e5, 1e6};
  std::vector<double> strip_eta{0.25, 0.5};
  strips->add_option("--L", strip_L, "Values of L")->capture_default_str();
  strips->add_option("--eta", strip_eta, "Strip exponents")->capture_default_str();
  add_common(strips, common, false);

  auto* push = app.add_subcommand("pushforward", "Iterated L/I/J/E decomposition of the root pair (CSV ledger)");
  PushforwardFlags pf;
  push->add_option("--L", pf.L, "Standard-map parameter")->capture_default_str();
  add_count(push, "--n", pf.n, "Number of steps")->capture_default_str();
  push->add_option("--a0", pf.a0, "Length threshold a0 in (0, 1/8]")->capture_default_str();
  push->add_option("--mode", pf.mode, "exhaustive | sampled")
      ->check(CLI::IsMember({"exhaustive", "sampled"}))
      ->capture_default_str();
  add_count(push, "--samples", pf.samples, "Sample paths in sampled mode");
  add_count(push, "--cap", pf.cap, "Curve cap in exhaustive mode");
  push->add_flag("--inventory", pf.inventory, "Write inventory.json (exhaustive mode)");
  add_count(push, "--inventory-limit", pf.inventory_limit, "Maximum inventory entries");
  add_common(push, common, true);

  auto* clt = app.add_subcommand("clt", "Birkhoff-sum CLT experiment (summary JSON)");
  StatFlags cf;
  cf.params.add(clt);
  add_count(clt, "--N", cf.N, "Iterates per sample (default floor(L^beta) or floor(L^(1/5)))");
  add_count(clt, "--M", cf.M, "Number of samples");
  clt->add_option("--phi", cf.phi, "Observable: sin | cos | fourier:k | const:c | file:path")->capture_default_str();
  clt->add_flag("--samples-csv", cf.samples_csv, "Also write samples.csv");
  add_common(clt, common, true);

  auto* corr = app.add_subcommand("corr", "Correlation of x-dependent observables (summary JSON)");
  CorrFlags kf;
  corr->add_option("--L", kf.L, "Standard-map parameter")->capture_default_str();
  add_count(corr, "--n", kf.n, "Lag");
  corr->add_option("--method", kf.method, "montecarlo | ygrid")
      ->check(CLI::IsMember({"montecarlo", "ygrid"}))
      ->capture_default_str();
  add_count(corr, "--M", kf.M, "Monte Carlo points or x strata");
  add_count(corr, "--K", kf.K, "y-grid size");
  corr->add_option("--phi", kf.phi, "Observable evaluated after n steps")->capture_default_str();
  corr->add_option("--psi", kf.psi, "Observable at time 0")->capture_default_str();
  add_common(corr, common, true);

  auto* diff = app.add_subcommand("diffusion", "Slow-variable diffusion through the conjugated route");
  StatFlags df;
  double za = 0.0, zb = 1.0;
  df.params.add(diff);
  add_count(diff, "--N", df.N, "Steps (default floor(epsilon^-2))");
  add_count(diff, "--M", df.M, "Number of samples");
  diff->add_option("--a", za, "Lower end of the slow interval")->capture_default_str();
  diff->add_option("--b", zb, "Upper end of the slow interval")->capture_default_str();
  diff->add_flag("--samples-csv", df.samples_csv, "Also write samples.csv");
  add_common(diff, common, true);

  auto* sim = app.add_subcommand("simulate", "Raw trajectory dump (CSV)");
  SimulateFlags sf;
  sf.params.add(sim);
  sim->add_option("--map", sf.map, "hatF | F | slowfast")
      ->check(CLI::IsMember({"hatF", "F", "slowfast"}))
      ->capture_default_str();
  sim->add_option("--x0", sf.x0, "Initial x")->capture_default_str();
  sim->add_option("--y0,--z0", sf.y0, "Initial y (torus maps) or z (slow-fast map)")->capture_default_str();
  add_count(sim, "--n", sf.n, "Number of steps");
  add_common(sim, common, false);

  auto* rep = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  std::string manifest;
  std::string replay_out = "replay";
  rep->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  rep->add_option("--out", replay_out, "Directory for the re-run outputs")->capture_default_str();

  std::vector<std::string> merged;
  try {
    merged = merge_config(args);
    std::vector<std::string> rev(merged.rbegin(), merged.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (rep->parsed()) return replay(manifest, replay_out, out, err);

    OutputSet outputs(common.out);
    Json conf;
    std::string name;
    const std::string started = utc_now();
    if (strips->parsed()) {
      name = "strips";
      conf = run_strips(strip_L, strip_eta, outputs);
    } else if (push->parsed()) {
      name = "pushforward";
      conf = run_pushforward(pf, common, outputs);
    } else if (clt->parsed()) {
      name = "clt";
      conf = run_clt(cf, common, outputs);
    } else if (corr->parsed()) {
      name = "corr";
      conf = run_corr(kf, common, outputs);
    } else if (diff->parsed()) {
      name = "diffusion";
      conf = run_diffusion(df, za, zb, common, outputs);
    } else if (sim->parsed()) {
      name = "simulate";
      conf = run_simulate(sf, outputs);
    }

    // argv for replay: the merged arguments without --out/--threads/--config
    Json argv = Json::array();
    for (std::size_t i = 1; i < merged.size(); ++i) {
      const std::string& a = merged[i];
      const bool skip_pair = a == "--out" || a == "--threads" || a == "--config";
      const bool skip_joined = a.rfind("--out=", 0) == 0 || a.rfind("--threads=", 0) == 0 ||
                               a.rfind("--config=", 0) == 0;
      if (skip_pair) {
        ++i;
        continue;
      }
      if (!skip_joined) argv.push_back(a);
    }
    Json digests = Json::object();
    for (const auto& f : outputs.files()) digests[f] = sha256_file(outputs.dir() / f);
    Json manifest_json{{"subcommand", name},
                       {"config", conf},
                       {"seed", common.seed},
                       {"threads", common.threads},
                       {"version", kVersion},
                       {"started", started},
                       {"finished", utc_now()},
                       {"argv", argv},
                       {"outputs", digests}};
    {
      std::ofstream mf(outputs.dir() / "manifest.json", std::ios::binary);
      mf << manifest_json.dump(2) << '\n';
    }
    for (const auto& f : outputs.files()) out << (outputs.dir() / f).string() << '\n';
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed manifest: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr) {
  return parse_and_dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace stdmap::cli
