// covspec — command-line front end for the renormalized sample-covariance
// toolkit: limiting spectral densities, linear-spectral-statistic moment
// tables, identity-covariance tests on data matrices, and Monte Carlo
// verification studies.
//
// Exit codes (stable API): 0 ok, 2 config/input error, 3 numeric
// nonconvergence, 4 degenerate data, 5 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "covspec/identity_tests.hpp"
#include "covspec/lss_moments.hpp"
#include "covspec/matrix_io.hpp"
#include "covspec/montecarlo.hpp"
#include "covspec/spectral_core.hpp"
#include "covspec/stieltjes.hpp"
#include "verify_suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace covspec;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitVerify = 5;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::string config_path;
  std::string data_path;
  std::string out_dir = ".";
  std::uint64_t seed = 20240801;
  int threads = 0;  // 0 = resolve from COVSPEC_THREADS, else 1
  std::string format = "json";
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("COVSPEC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
      throw ConfigError("COVSPEC_THREADS is not a positive integer");
    }
  }
  return 1;
}

// Strict parsing: every object must consist solely of known keys.
void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Provenance block embedded in every report: the fully resolved config
// (defaults filled in), its hash, the seed, and the artifact version.
json provenance(const json& resolved, std::uint64_t seed) {
  return json{{"version", kVersion},
              {"seed", seed},
              {"config_hash", fnv1a(resolved.dump())},
              {"config_resolved", resolved}};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

SpectralMeasure parse_measure(const json& cfg) {
  if (cfg.is_null() || (cfg.is_string() && cfg.get<std::string>() == "identity"))
    return identity_measure();
  if (cfg.is_object() && cfg.contains("file")) {
    require_keys(cfg, {"file"}, "measure");
    std::ifstream f(cfg.at("file").get<std::string>());
    if (!f) throw ConfigError("cannot open measure file");
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    return SpectralMeasure::from_json(text);
  }
  require_keys(cfg, {"atoms", "weights"}, "measure");
  return SpectralMeasure(cfg.at("atoms").get<std::vector<double>>(),
                         cfg.at("weights").get<std::vector<double>>());
}

MomentProfile parse_moments(const json& cfg) {
  require_keys(cfg, {"alpha", "delta"}, "moments");
  return make_moment_profile(cfg.value("alpha", 1.0), cfg.value("delta", 0.0));
}

SolverOptions parse_solver(const json& cfg) {
  require_keys(cfg, {"tol", "max_iter"}, "solver");
  SolverOptions opt;
  opt.tol = cfg.value("tol", opt.tol);
  opt.max_iter = cfg.value("max_iter", opt.max_iter);
  return opt;
}

TestFunction parse_function(const json& spec) {
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "x") return tf_identity();
    if (name == "x2") return tf_square();
    if (name == "x3") return tf_cube();
    if (name == "log") return tf_log();
    throw ConfigError("unknown test function \"" + name +
                      "\" (expected x, x2, x3, log, or {\"poly\": [...]})");
  }
  require_keys(spec, {"poly"}, "functions[]");
  return tf_polynomial(spec.at("poly").get<std::vector<double>>());
}

// ------------------------------------------------------------------ lsd

int cmd_lsd(const GlobalOpts& g) {
  json cfg = load_config(g.config_path);
  require_keys(cfg, {"p", "n", "measure", "grid", "solver"}, "lsd config");
  if (!cfg.contains("p") || !cfg.contains("n"))
    throw ConfigError("lsd config requires \"p\" and \"n\"");
  const auto ratios = make_ratios(cfg.at("p").get<std::int64_t>(),
                                  cfg.at("n").get<std::int64_t>());
  const auto H = parse_measure(cfg.value("measure", json()));
  const auto solver = parse_solver(cfg.value("solver", json::object()));
  json grid_cfg = cfg.value("grid", json::object());
  require_keys(grid_cfg, {"lo", "hi", "points"}, "grid");
  const double lo = grid_cfg.value("lo", 0.0);
  const double hi = grid_cfg.value("hi", 1.05);
  const int points = grid_cfg.value("points", 2000);
  if (points < 2 || hi <= lo) throw ConfigError("grid needs hi > lo, points >= 2");

  const auto curve = density_curve(ratios, H, uniform_grid(lo, hi, points),
                                   {1e-2, 1e-3, 1e-4, 1e-5}, solver);
  const LimitCdf cdf(curve);

  // support-edge estimates: outermost grid points with positive density
  double edge_lo = 0.0, edge_hi = 0.0;
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    if (curve.density[i] > 0.0) {
      edge_hi = curve.grid[i];
      if (edge_lo == 0.0 && curve.zero_atom == 0.0) edge_lo = curve.grid[i];
    }

  json resolved = {{"p", ratios.p},       {"n", ratios.n},
                   {"measure", json::parse(H.to_json())},
                   {"grid", {{"lo", lo}, {"hi", hi}, {"points", points}}},
                   {"solver", {{"tol", solver.tol}, {"max_iter", solver.max_iter}}}};
  json out = provenance(resolved, g.seed);
  out["zero_atom"] = curve.zero_atom;
  out["total_mass"] = curve.total_mass();
  out["support_edges"] = {edge_lo, edge_hi};
  out["density"] = json::parse(curve.to_json());
  std::vector<double> cdf_vals(curve.grid.size());
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    cdf_vals[i] = cdf(curve.grid[i]);
  out["cdf"] = cdf_vals;

  write_text(fs::path(g.out_dir) / "lsd_density.csv", curve.to_csv());
  write_text(fs::path(g.out_dir) / "lsd_result.json", out.dump(2));
  std::cout << "lsd: zero_atom=" << curve.zero_atom
            << " total_mass=" << curve.total_mass() << " support=["
            << edge_lo << ", " << edge_hi << "]\n";
  return kExitOk;
}

// ----------------------------------------------------------- lss-moments

int cmd_lss_moments(const GlobalOpts& g) {
  json cfg = load_config(g.config_path);
  require_keys(cfg,
               {"p", "n", "measure", "moments", "functions", "contour",
                "quadrature"},
               "lss-moments config");
  if (!cfg.contains("p") || !cfg.contains("n"))
    throw ConfigError("lss-moments config requires \"p\" and \"n\"");
  const auto ratios = make_ratios(cfg.at("p").get<std::int64_t>(),
                                  cfg.at("n").get<std::int64_t>());
  const auto H = parse_measure(cfg.value("measure", json()));
  const auto moments = parse_moments(cfg.value("moments", json::object()));
  const KernelContext ctx(ratios, H, moments);

  json fspecs = cfg.value("functions", json::array({"x", "x2", "log"}));
  std::vector<TestFunction> fs;
  for (const auto& spec : fspecs) fs.push_back(parse_function(spec));
  if (fs.empty()) throw ConfigError("functions list is empty");

  QuadratureOptions qopt;
  json qcfg = cfg.value("quadrature", json::object());
  require_keys(qcfg, {"initial_nodes", "max_nodes", "stability_tol"},
               "quadrature");
  qopt.initial_nodes = qcfg.value("initial_nodes", qopt.initial_nodes);
  qopt.max_nodes = qcfg.value("max_nodes", qopt.max_nodes);
  qopt.stability_tol = qcfg.value("stability_tol", qopt.stability_tol);
  json ccfg = cfg.value("contour", json::object());
  require_keys(ccfg, {"radius"}, "contour");
  const double radius = ccfg.value("radius", 1.05);
  if (radius <= 1.0) throw ConfigError("contour radius must exceed 1");

  const auto table = lss_moment_table(fs, ctx, qopt);

  json resolved = {{"p", ratios.p},
                   {"n", ratios.n},
                   {"measure", json::parse(H.to_json())},
                   {"moments", {{"alpha", moments.alpha}, {"delta", moments.delta}}},
                   {"functions", fspecs},
                   {"contour", {{"radius", radius}}},
                   {"quadrature",
                    {{"initial_nodes", qopt.initial_nodes},
                     {"max_nodes", qopt.max_nodes},
                     {"stability_tol", qopt.stability_tol}}}};
  json out = provenance(resolved, g.seed);
  out["table"] = json::parse(table.to_json());

  // side-by-side closed forms when available (null H and f in {x, x2, log})
  const bool h_is_delta1 = H.atoms().size() == 1 && H.atoms()[0] == 1.0;
  bool covered = h_is_delta1;
  for (const auto& f : fs)
    covered = covered &&
              (f.name == "x" || f.name == "x^2" || f.name == "log");
  if (covered && ratios.c2 > ratios.c1) {
    const auto cf = identity_closed_forms(ratios, moments);
    auto closed_mean = [&](const std::string& name) {
      if (name == "x") return cf.mean_f1;
      if (name == "x^2") return cf.mean_f2;
      return cf.mean_f3;
    };
    double max_dev = 0.0;
    json closed = json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double cm = closed_mean(fs[i].name);
      closed.push_back(cm);
      max_dev = std::max(max_dev, std::abs(cm - table.means[i]));
    }
    out["closed_form_means"] = closed;
    out["closed_form_max_deviation"] = max_dev;
    std::cout << "closed-form max deviation: " << max_dev << "\n";
  }

  write_text(fs::path(g.out_dir) / "lss_moments.json", out.dump(2));
  write_text(fs::path(g.out_dir) / "lss_moments.csv", table.to_csv());
  std::cout << "lss-moments: " << fs.size() << " functions -> "
            << (fs::path(g.out_dir) / "lss_moments.json").string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ test

json run_one_test(const std::string& which, const std::vector<double>& s0_eigs,
                  std::int64_t p, std::int64_t n, const MomentProfile& mp,
                  bool estimated) {
  TestReport rep;
  if (which == "frobenius") {
    rep = frobenius_test(s0_eigs, p, n, mp);
  } else {
    std::vector<double> eigs = s0_eigs;
    if (p > n)  // quasi statistic runs on X*X/p rather than X*X/n
      for (double& e : eigs) e *= static_cast<double>(n) / static_cast<double>(p);
    rep = lrt_test(eigs, p, n, mp);
  }
  rep.moments_estimated = estimated;
  return json::parse(rep.to_json());
}

int cmd_test(const GlobalOpts& g) {
  if (g.data_path.empty()) throw ConfigError("test requires --data FILE");
  json cfg = load_config(g.config_path);
  require_keys(cfg, {"test", "moments", "is_real"}, "test config");
  const std::string which = cfg.value("test", "both");
  if (which != "frobenius" && which != "lrt" && which != "both")
    throw ConfigError("test must be frobenius, lrt, or both");

  const DataMatrix data = load_matrix(g.data_path);
  const bool is_real = std::holds_alternative<Eigen::MatrixXd>(data);
  std::int64_t p, n;
  std::vector<double> s0_eigs;
  if (is_real) {
    const auto& X = std::get<Eigen::MatrixXd>(data);
    p = X.rows();
    n = X.cols();
    s0_eigs = classical_spectrum(X);
  } else {
    const auto& X = std::get<Eigen::MatrixXcd>(data);
    p = X.rows();
    n = X.cols();
    s0_eigs = classical_spectrum(X);
  }

  MomentProfile mp;
  bool estimated = false;
  const json mcfg = cfg.value("moments", json("estimate"));
  if (mcfg.is_string() && mcfg.get<std::string>() == "estimate") {
    estimated = true;
    mp = is_real ? estimate_moment_profile(std::get<Eigen::MatrixXd>(data))
                 : estimate_moment_profile(std::get<Eigen::MatrixXcd>(data),
                                           cfg.value("is_real", false));
  } else {
    mp = parse_moments(mcfg);
  }

  json resolved = {{"test", which},
                   {"moments",
                    estimated ? json("estimate")
                              : json{{"alpha", mp.alpha}, {"delta", mp.delta}}},
                   {"data", g.data_path},
                   {"p", p},
                   {"n", n}};
  json out = provenance(resolved, g.seed);
  out["reports"] = json::array();
  bool partial = false;

  const std::vector<std::string> wanted =
      which == "both" ? std::vector<std::string>{"frobenius", "lrt"}
                      : std::vector<std::string>{which};
  for (const auto& w : wanted) {
    try {
      json rep = run_one_test(w, s0_eigs, p, n, mp, estimated);
      out["reports"].push_back(rep);
      std::cout << w << ": z=" << rep.at("z_score").get<double>()
                << " p-value=" << rep.at("p_value").get<double>() << "\n";
    } catch (const Degenerate& e) {
      if (which != "both") throw;  // exit 2 when lrt was requested alone
      partial = true;
      out["reports"].push_back(json{{"name", w}, {"error", e.what()}});
      std::cout << w << ": skipped (" << e.what() << ")\n";
    }
  }
  out["partial_results"] = partial;
  write_text(fs::path(g.out_dir) / "test_report.json", out.dump(2));
  return kExitOk;
}

// -------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOpts& g) {
  json cfg = load_config(g.config_path);
  require_keys(cfg,
               {"p", "n", "dist", "df", "sigma", "replicates", "functions"},
               "simulate config");
  if (!cfg.contains("p") || !cfg.contains("n"))
    throw ConfigError("simulate config requires \"p\" and \"n\"");
  ReplicateStudy study;
  study.p = cfg.at("p").get<std::int64_t>();
  study.n = cfg.at("n").get<std::int64_t>();
  study.replicates = cfg.value("replicates", 100);
  if (study.replicates < 1) throw ConfigError("replicates must be >= 1");
  study.dist = EntryDistribution::parse(cfg.value("dist", "real-gaussian"),
                                        g.seed, cfg.value("df", 8.0));
  const json scfg = cfg.value("sigma", json("identity"));
  if (scfg.is_string() && scfg.get<std::string>() == "identity")
    study.sigma = SigmaSpec::identity();
  else
    study.sigma = SigmaSpec::from_measure(parse_measure(scfg));
  json fspecs = cfg.value("functions", json::array({"x", "x2"}));
  for (const auto& spec : fspecs)
    study.functionals.push_back(parse_function(spec));
  study.threads = g.threads;

  const auto result = lss_replicates(study);

  json resolved = {{"p", study.p},
                   {"n", study.n},
                   {"dist", study.dist.name()},
                   {"replicates", study.replicates},
                   {"functions", fspecs}};
  json out = provenance(resolved, g.seed);
  out["summary"] = json::parse(result.summary_json());
  write_text(fs::path(g.out_dir) / "study.csv", result.to_csv());
  write_text(fs::path(g.out_dir) / "study_summary.json", out.dump(2));
  std::cout << "simulate: " << study.replicates << " replicates -> "
            << (fs::path(g.out_dir) / "study.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const GlobalOpts& g, const std::vector<std::string>& suites,
               int replicates) {
  json cfg = load_config(g.config_path);
  require_keys(cfg, {"suites", "replicates"}, "verify config");
  std::vector<std::string> selected = suites;
  if (selected.empty() && cfg.contains("suites"))
    selected = cfg.at("suites").get<std::vector<std::string>>();
  verify::SuiteOptions opt;
  opt.seed = g.seed;
  opt.threads = g.threads;
  opt.replicates = cfg.value("replicates", replicates);
  if (opt.replicates < 1) throw ConfigError("replicates must be >= 1");

  const auto known = verify::suite_names();
  for (const auto& s : selected)
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw ConfigError("unknown verification suite \"" + s + "\"");

  const auto results = verify::run_suites(selected, opt, true);

  json resolved = {{"suites", selected.empty() ? json(known) : json(selected)},
                   {"replicates", opt.replicates}};
  json out = provenance(resolved, g.seed);
  out["results"] = json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    out["results"].push_back({{"name", r.name},
                              {"pass", r.pass},
                              {"detail", r.detail},
                              {"seconds", r.seconds}});
  }
  out["all_pass"] = all_pass;
  write_text(fs::path(g.out_dir) / "verify_summary.json", out.dump(2));
  if (!all_pass) {
    std::cerr << "verification failed; see verify_summary.json\n";
    return kExitVerify;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covspec: limiting spectra, LSS moments, and identity-covariance "
               "tests for renormalized sample covariance matrices"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file")
      ->configurable(false);
  app.add_option("--data", g.data_path, "data matrix file (CSV or binary)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads,
                 "worker threads (default: COVSPEC_THREADS or 1)");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* lsd = app.add_subcommand("lsd", "limiting spectral density and CDF");
  auto* lss = app.add_subcommand("lss-moments",
                                 "CLT mean/covariance table of LSS");
  auto* test = app.add_subcommand("test", "identity-covariance tests on data");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo replicate study");
  auto* ver = app.add_subcommand("verify", "run named verification suites");
  // global options (--config, --out, ...) remain valid after the subcommand
  for (auto* sub : {lsd, lss, test, sim, ver}) sub->fallthrough();
  std::vector<std::string> suites;
  int replicates = 2000;
  ver->add_option("--suite", suites, "suite name (repeatable; default all)");
  ver->add_option("--replicates", replicates,
                  "replicates for Monte Carlo suites");

  CLI11_PARSE(app, argc, argv);

  try {
    g.threads = resolve_threads(g.threads);
    if (lsd->parsed()) return cmd_lsd(g);
    if (lss->parsed()) return cmd_lss_moments(g);
    if (test->parsed()) return cmd_test(g);
    if (sim->parsed()) return cmd_simulate(g);
    if (ver->parsed()) return cmd_verify(g, suites, replicates);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LogDomain& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InsufficientData& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergence& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const QuadratureDiverged& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Degenerate& e) {
    std::cerr << "degenerate data: " << e.what() << "\n";
    return kExitConfig;  // p = n is an input-domain error for lrt
  } catch (const SingularMatrix& e) {
    std::cerr << "degenerate data: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
