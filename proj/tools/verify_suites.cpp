#include "verify_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "covspec/identity_tests.hpp"
#include "covspec/lss_moments.hpp"
#include "covspec/montecarlo.hpp"
#include "covspec/parallel.hpp"
#include "covspec/spectral_core.hpp"
#include "covspec/stieltjes.hpp"

namespace covspec::verify {

namespace {

using clock_type = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Tracker {
  bool pass = true;
  double worst = 0.0;
  void check(double dev, double tol) {
    worst = std::max(worst, dev);
    if (!(dev <= tol)) pass = false;
  }
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

// KS distance of a sample against the standard normal CDF.
double ks_vs_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double r = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / r));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / r - f));
  }
  return d;
}

struct Summary {
  double mean = 0.0, var = 0.0, se_mean = 0.0;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  const double r = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / r;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.var = ss / (r - 1.0);
  s.se_mean = std::sqrt(s.var / r);
  return s;
}

SpectralMeasure uniform_half_one() {
  return SpectralMeasure({0.5, 1.0}, {0.5, 0.5});
}

// ---------------------------------------------------------------- suite 1

SuiteResult suite_solver_oracle(const SuiteOptions&) {
  SuiteResult res{"solver-oracle"};
  const auto ratios = ratios_from_c(0.25, 0.25);
  const auto H = identity_measure();
  Tracker t;
  // With a single atom at 1 and c1 = c2 the self-consistent equation reduces
  // to the quadratic c1 z m^2 + z m + 1 = 0; take the upper-half-plane root.
  for (int ix = 0; ix < 10; ++ix) {
    for (int iv = 0; iv < 10; ++iv) {
      const double x = -0.5 + 2.0 * ix / 9.0;
      const double v = std::pow(10.0, -3.0 + 3.0 * iv / 9.0);
      const cplx z(x, v);
      const cplx disc = std::sqrt(z * z - 4.0 * 0.25 * z);
      cplx root = (-z + disc) / (2.0 * 0.25 * z);
      cplx other = (-z - disc) / (2.0 * 0.25 * z);
      if (other.imag() > root.imag()) root = other;
      const auto sol = solve(z, ratios, H);
      t.check(std::abs(sol.m - root), 1e-10);
    }
  }
  res.pass = t.pass;
  res.detail = "max |m - quadratic root| = " + fmt(t.worst) + " over 100 z (tol 1e-10)";
  return res;
}

// ---------------------------------------------------------------- suite 2

SuiteResult suite_degenerate_limits(const SuiteOptions&) {
  SuiteResult res{"degenerate-limits"};
  const auto H = uniform_half_one();
  Tracker t;
  const std::vector<cplx> zs = {{0.0, 1.0}, {0.5, 0.3}, {-0.2, 0.01},
                                {1.3, 2.0}, {0.75, 1e-3}};
  for (const cplx& z : zs) {
    cplx direct = 0.0;
    for (std::size_t i = 0; i < H.atoms().size(); ++i)
      direct += H.weights()[i] / (H.atoms()[i] - z);
    const auto ln = solve_degenerate(z, DegenerateLimit::LargeN, H);
    t.check(std::abs(ln.m - direct), 1e-15 * std::abs(direct));
    // the fixed-point RHS at (c1,c2)=(0,1) must reproduce the same integral
    t.check(std::abs(equation_rhs(z, ln.m, 0.0, 1.0, H) - direct),
            1e-14 * std::abs(direct));
    const auto lp = solve_degenerate(z, DegenerateLimit::LargeP, H);
    t.check(std::abs(lp.m - (-1.0 / z)), 0.0);
    if (ln.m.imag() <= 0.0 || lp.m.imag() <= 0.0) t.pass = false;
  }
  res.pass = t.pass;
  res.detail = "max deviation = " + fmt(t.worst) + " (machine precision)";
  return res;
}

// ---------------------------------------------------------------- suite 3

SuiteResult suite_esd_limit(const SuiteOptions& opt) {
  SuiteResult res{"esd-limit"};
  struct Case {
    std::int64_t p, n;
    double tol;
  };
  const std::vector<Case> cases = {
      {1000, 1000, 0.03}, {20000, 50, 0.05}, {50, 20000, 0.05}};
  const std::vector<SpectralMeasure> measures = {identity_measure(),
                                                 uniform_half_one()};
  EntryDistribution dist;  // real Gaussian
  Tracker t;
  std::ostringstream detail;
  std::uint64_t rep = 0;
  for (const auto& m : measures) {
    const SigmaSpec sigma = (m.atoms().size() == 1)
                                ? SigmaSpec::identity()
                                : SigmaSpec::from_measure(m);
    for (const auto& c : cases) {
      const auto ratios = make_ratios(c.p, c.n);
      const SpectralMeasure Hn = sigma.implied_measure(c.p);
      const LimitCdf cdf = limit_cdf(ratios, Hn);
      auto rng = replicate_rng(opt.seed, rep++);
      const Eigen::MatrixXd X = generate(c.p, c.n, dist, sigma, rng);
      const auto eigs = renormalized_spectrum(X);
      const double d = esd_distance(eigs, c.p, cdf);
      t.check(d, c.tol);
      detail << " (" << c.p << "," << c.n << ")"
             << (m.atoms().size() == 1 ? "I" : "U") << "=" << fmt(d);
    }
  }
  res.pass = t.pass;
  res.detail = "KS distances:" + detail.str() + " (tol 0.03/0.05)";
  return res;
}

// ---------------------------------------------------------------- suite 4

SuiteResult suite_closed_form_oracle(const SuiteOptions&) {
  SuiteResult res{"closed-form-oracle"};
  const std::vector<std::pair<std::int64_t, std::int64_t>> dims = {
      {100, 400}, {200, 300}, {50, 5000}};
  const std::vector<std::pair<double, double>> profiles = {
      {1.0, 0.0}, {0.0, 0.0}, {1.0, -2.0}};
  Tracker t;
  for (const auto& [p, n] : dims) {
    for (const auto& [a, d] : profiles) {
      const auto ratios = make_ratios(p, n);
      const KernelContext ctx(ratios, identity_measure(),
                              make_moment_profile(a, d));
      const auto cf = identity_closed_forms(ratios, ctx.moments);
      const Contour inner = Contour::circle(1.05);
      const Contour outer = Contour::circle(1.10);
      const auto f1 = tf_identity();
      const auto f2 = tf_square();
      const auto f3 = tf_log();
      t.check(std::abs(lss_mean(f1, ctx, inner) - cf.mean_f1), 1e-6);
      t.check(std::abs(lss_mean(f2, ctx, inner) - cf.mean_f2), 1e-6);
      t.check(std::abs(lss_mean(f3, ctx, inner) - cf.mean_f3), 1e-6);
      t.check(std::abs(lss_cov(f1, f1, ctx, outer, inner) - cf.cov_f1f1), 1e-6);
      t.check(std::abs(lss_cov(f1, f2, ctx, outer, inner) - cf.cov_f1f2), 1e-6);
      t.check(std::abs(lss_cov(f1, f3, ctx, outer, inner) - cf.cov_f1f3), 1e-6);
      t.check(std::abs(lss_cov(f2, f2, ctx, outer, inner) - cf.cov_f2f2), 1e-6);
      t.check(std::abs(lss_cov(f3, f3, ctx, outer, inner) - cf.cov_f3f3), 1e-6);
      const double scale = 1.0 / std::sqrt(ratios.c1 * ratios.c2);
      t.check(std::abs(scale * lss_centering(f1, ctx, inner) - cf.theta1), 1e-6);
      t.check(std::abs(scale * lss_centering(f2, ctx, inner) - cf.theta2), 1e-6);
      t.check(std::abs(scale * lss_centering(f3, ctx, inner) - cf.theta3), 1e-6);
    }
  }
  res.pass = t.pass;
  res.detail =
      "max |numeric - closed form| = " + fmt(t.worst) +
      " over 9 quantities x 3 dims x 3 profiles (tol 1e-6)";
  return res;
}

// ---------------------------------------------------------------- suite 5

std::vector<double> frobenius_pivots(std::int64_t p, std::int64_t n,
                                     EntryDistribution::Kind kind, int reps,
                                     std::uint64_t seed, int threads) {
  std::vector<double> out(reps);
  EntryDistribution dist;
  dist.kind = kind;
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t i) {
    auto rng = replicate_rng(seed, i);
    const Eigen::MatrixXd X = generate(p, n, dist, SigmaSpec::identity(), rng);
    const double w = frobenius_statistic(classical_spectrum(X), p, n);
    out[i] = static_cast<double>(n) * w - static_cast<double>(p);
  });
  return out;
}

SuiteResult suite_frobenius_null(const SuiteOptions& opt) {
  SuiteResult res{"frobenius-null"};
  const std::vector<std::pair<std::int64_t, std::int64_t>> dims = {
      {100, 100}, {400, 100}, {100, 400}, {5000, 50}};
  const int R = opt.replicates;
  bool pass = true;
  std::ostringstream detail;
  std::uint64_t salt = 0;
  for (const auto& [p, n] : dims) {
    const auto v = frobenius_pivots(p, n, EntryDistribution::Kind::RealGaussian,
                                    R, opt.seed + (++salt) * 1000003, opt.threads);
    const Summary s = summarize(v);
    const bool mean_ok = std::abs(s.mean - 1.0) <= 3.0 * s.se_mean;
    const bool var_ok = s.var >= 3.6 && s.var <= 4.4;
    std::vector<double> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = (v[i] - 1.0) / 2.0;
    const double d = ks_vs_normal(z);
    const double pval = kolmogorov_tail(std::sqrt(static_cast<double>(R)) * d);
    const bool ks_ok = pval > 0.01;
    pass = pass && mean_ok && var_ok && ks_ok;
    detail << " (" << p << "," << n << "): mean=" << fmt(s.mean)
           << " var=" << fmt(s.var) << " KSp=" << fmt(pval)
           << (mean_ok && var_ok && ks_ok ? "" : " FAIL");
  }
  // Rademacher entries shift the mean of nW - p to alpha + delta = -1.
  const auto v = frobenius_pivots(100, 400, EntryDistribution::Kind::Rademacher,
                                  R, opt.seed + 777, opt.threads);
  const Summary s = summarize(v);
  const bool rad_ok = std::abs(s.mean - (-1.0)) <= 3.0 * s.se_mean;
  pass = pass && rad_ok;
  detail << " rademacher mean=" << fmt(s.mean) << (rad_ok ? "" : " FAIL");
  res.pass = pass;
  res.detail = std::to_string(R) + " reps:" + detail.str();
  return res;
}

// ---------------------------------------------------------------- suite 6

SuiteResult suite_lrt_null(const SuiteOptions& opt) {
  SuiteResult res{"lrt-null"};
  const int R = opt.replicates;
  bool pass = true;
  std::ostringstream detail;
  EntryDistribution dist;  // real Gaussian
  const MomentProfile prof = make_moment_profile(1.0, 0.0);
  int salt = 0;
  for (const auto& [p, n] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {50, 500}, {500, 50}}) {
    std::vector<double> z(R);
    parallel_for(static_cast<std::size_t>(R), opt.threads, [&](std::size_t i) {
      auto rng = replicate_rng(opt.seed + 31 * (salt + 1), i);
      const Eigen::MatrixXd X = generate(p, n, dist, SigmaSpec::identity(), rng);
      std::vector<double> eigs = classical_spectrum(X);
      if (p > n) {
        // classical_spectrum yields the spectrum of X*X/n; the quasi
        // statistic wants X*X/p.
        for (double& e : eigs) e *= static_cast<double>(n) / static_cast<double>(p);
      }
      z[i] = lrt_test(eigs, p, n, prof).z_score;
    });
    ++salt;
    const Summary s = summarize(z);
    const double d = ks_vs_normal(z);
    const double pval = kolmogorov_tail(std::sqrt(static_cast<double>(R)) * d);
    const bool mean_ok = std::abs(s.mean) <= 3.0 * s.se_mean;
    const bool ks_ok = pval > 0.01;
    pass = pass && mean_ok && ks_ok;
    detail << " (" << p << "," << n << "): mean z=" << fmt(s.mean)
           << " KSp=" << fmt(pval) << (mean_ok && ks_ok ? "" : " FAIL");
  }
  res.pass = pass;
  res.detail = std::to_string(R) + " reps:" + detail.str();
  return res;
}

// ---------------------------------------------------------------- suite 7

SuiteResult suite_delta_method(const SuiteOptions&) {
  SuiteResult res{"delta-method"};
  const std::vector<std::pair<std::int64_t, std::int64_t>> dims = {
      {100, 400}, {200, 300}, {50, 5000}, {300, 700}, {64, 256}};
  const std::vector<std::pair<double, double>> profiles = {
      {1.0, 0.0}, {0.0, 0.0}, {1.0, -2.0}};
  Tracker t;
  for (const auto& [p, n] : dims) {
    for (const auto& [a, dl] : profiles) {
      const auto ratios = make_ratios(p, n);
      const auto mp = make_moment_profile(a, dl);
      const auto dm = delta_method_check(ratios, mp);
      t.check(std::abs(dm.frobenius.mean - (a + dl)), 1e-12);
      t.check(std::abs(dm.frobenius.variance - 2.0 * (1.0 + a)), 1e-12);
      const double c = ratios.c1 / ratios.c2;  // equals p/n
      t.check(std::abs(dm.lrt_pivot.mean - lrt_centering_offset(c, mp)), 1e-12);
      t.check(std::abs(dm.lrt_pivot.variance - lrt_variance(c, mp)), 1e-12);
      const double g2 = 1.0 - (1.0 - ratios.c2 / ratios.c1) * std::log(1.0 - c);
      t.check(std::abs(dm.g2_at_theta - g2), 1e-12);
    }
  }
  res.pass = t.pass;
  res.detail = "max deviation from null-law constants = " + fmt(t.worst) +
               " at 5 ratio pairs x 3 profiles (tol 1e-12)";
  return res;
}

// ---------------------------------------------------------------- suite 8

SuiteResult suite_properties(const SuiteOptions& opt) {
  SuiteResult res{"properties"};
  std::ostringstream detail;
  bool pass = true;

  // (a) solver invariants over 1000 random (z, ratios, H) triples
  {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> us(0.15, 0.85), ux(-2.0, 2.0),
        ulogv(-2.5, 0.5), ut(0.05, 1.0);
    std::uniform_int_distribution<int> uk(1, 4);
    int failures = 0, n_nev = 0, n_uniq = 0, n_res = 0, n_split = 0,
        n_norm = 0, n_throw = 0;
    double worst_split = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const double s = us(rng);
      const auto ratios = ratios_from_c(s * s, (1.0 - s) * (1.0 - s));
      std::vector<double> atoms(uk(rng));
      for (double& a : atoms) a = ut(rng);
      atoms.push_back(1.0);  // pin the sup
      const auto H = measure_from_sigma_eigenvalues(atoms);
      const cplx z(ux(rng), std::pow(10.0, ulogv(rng)));
      try {
        const auto sol = solve(z, ratios, H);
        const bool nevanlinna = sol.m.imag() > 0.0;
        const bool uniq_set = sol.m_under.imag() > 0.0;
        const bool residual_ok = sol.residual <= 1e-10;
        const auto alt = solve_from(z, cplx(0.0, 1.0), ratios, H);
        const double split = std::abs(alt.m - sol.m);
        worst_split = std::max(worst_split, split);
        const auto tail = solve(cplx(0.0, 1e6), ratios, H);
        const bool norm_ok = std::abs(cplx(0.0, 1e6) * tail.m + 1.0) < 1e-3;
        if (!nevanlinna) ++n_nev;
        if (!uniq_set) ++n_uniq;
        if (!residual_ok) ++n_res;
        if (split >= 1e-8) ++n_split;
        if (!norm_ok) ++n_norm;
        if (!(nevanlinna && uniq_set && residual_ok && split < 1e-8 && norm_ok))
          ++failures;
      } catch (const Error&) {
        ++n_throw;
        ++failures;
      }
    }
    pass = pass && failures == 0;
    detail << " solver: " << failures << "/1000 failures (nev " << n_nev
           << ", uniq " << n_uniq << ", res " << n_res << ", split " << n_split
           << ", norm " << n_norm << ", throw " << n_throw
           << "), worst start-split " << fmt(worst_split) << ";";
  }

  // (b) covariance-table symmetry and PSD
  {
    const KernelContext ctx(make_ratios(100, 400), identity_measure(),
                            make_moment_profile(1.0, 0.0));
    const auto table =
        lss_moment_table({tf_identity(), tf_square(), tf_cube()}, ctx);
    const int k = static_cast<int>(table.functions.size());
    Eigen::MatrixXd C(k, k);
    double asym = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        C(i, j) = table.cov[i][j];
        asym = std::max(asym, std::abs(table.cov[i][j] - table.cov[j][i]));
      }
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff();
    const bool ok = asym <= 1e-9 && min_eig >= -1e-8;
    pass = pass && ok;
    detail << " cov-table: asym " << fmt(asym) << ", min eig " << fmt(min_eig)
           << (ok ? ";" : " FAIL;");
  }

  // (c) orthogonal invariance of the test statistics
  {
    auto rng = replicate_rng(opt.seed, 4242);
    EntryDistribution dist;
    const Eigen::MatrixXd X = generate(40, 60, dist, SigmaSpec::identity(), rng);
    Eigen::MatrixXd G(40, 40);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) G(i, j) = nd(rng);
    const Eigen::MatrixXd Q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    const auto e1 = classical_spectrum(X);
    const auto e2 = classical_spectrum(Eigen::MatrixXd(Q * X));
    const double dw = std::abs(frobenius_statistic(e1, 40, 60) -
                               frobenius_statistic(e2, 40, 60));
    const double dl =
        std::abs(lrt_statistic(e1, 40, 60) - lrt_statistic(e2, 40, 60));
    const bool ok = dw <= 1e-8 && dl <= 1e-8;
    pass = pass && ok;
    detail << " invariance: dW " << fmt(dw) << ", dL " << fmt(dl)
           << (ok ? ";" : " FAIL;");
  }

  // (d) generator moment audits, 1e6 draws each
  {
    const std::vector<EntryDistribution::Kind> kinds = {
        EntryDistribution::Kind::RealGaussian,
        EntryDistribution::Kind::ComplexGaussian,
        EntryDistribution::Kind::Rademacher,
        EntryDistribution::Kind::UniformScaled,
        EntryDistribution::Kind::StudentTScaled};
    bool all_ok = true;
    for (auto kind : kinds) {
      EntryDistribution dist;
      dist.kind = kind;
      const MomentProfile prof = dist.profile();
      auto rng = replicate_rng(opt.seed ^ 0xa5a5a5a5ULL,
                               static_cast<std::uint64_t>(kind));
      const int N = 1000000;
      cplx sum = 0.0, sum_sq = 0.0;
      double sum_abs2 = 0.0, sum_abs4 = 0.0;
      for (int i = 0; i < N; ++i) {
        const cplx y = draw_entry(dist, rng);
        sum += y;
        sum_sq += y * y;
        const double a2 = std::norm(y);
        sum_abs2 += a2;
        sum_abs4 += a2 * a2;
      }
      const double inv = 1.0 / N;
      const double m4 = 2.0 + prof.alpha + prof.delta;
      // 5-SE tolerances using the analytic spread of each estimator
      const double se1 = std::sqrt(inv);
      const double se2 = std::sqrt(std::max(m4 - 1.0, 0.1) * inv);
      const double se4 = std::sqrt(std::max(m4 * m4, 1.0) * 30.0 * inv);
      const bool ok = std::abs(sum * inv) < 5 * se1 &&
                      std::abs(sum_abs2 * inv - 1.0) < 5 * se2 &&
                      std::abs(sum_sq * inv - prof.alpha) < 5 * se2 &&
                      std::abs(sum_abs4 * inv - m4) < 5 * se4;
      all_ok = all_ok && ok;
      if (!ok) detail << " audit FAIL " << dist.name() << ";";
    }
    pass = pass && all_ok;
    if (all_ok) detail << " generator audits: 5/5 ok;";
  }

  res.pass = pass;
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------- suite 9

SuiteResult suite_dependent_structure(const SuiteOptions& opt) {
  SuiteResult res{"dependent-structure"};
  bool pass = true;
  std::ostringstream detail;
  for (auto kind : {EntryDistribution::Kind::RealGaussian,
                    EntryDistribution::Kind::Rademacher}) {
    for (int q : {2, 4}) {
      EntryDistribution dist;
      dist.kind = kind;
      dist.seed = opt.seed + q;
      const auto r = dependent_structure_check(SigmaSpec::identity(), dist, q,
                                               200, {100, 400, 1600});
      pass = pass && r.pass;
      detail << " " << dist.name() << " q=" << q << ": slope "
             << fmt(r.slope) << (r.pass ? "" : " FAIL");
    }
  }
  res.pass = pass;
  res.detail = "normalized moment growth:" + detail.str();
  return res;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"solver-oracle",  "degenerate-limits", "esd-limit",
          "closed-form-oracle", "frobenius-null", "lrt-null",
          "delta-method",   "properties",        "dependent-structure"};
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  using Fn = SuiteResult (*)(const SuiteOptions&);
  static const std::vector<std::pair<std::string, Fn>> table = {
      {"solver-oracle", suite_solver_oracle},
      {"degenerate-limits", suite_degenerate_limits},
      {"esd-limit", suite_esd_limit},
      {"closed-form-oracle", suite_closed_form_oracle},
      {"frobenius-null", suite_frobenius_null},
      {"lrt-null", suite_lrt_null},
      {"delta-method", suite_delta_method},
      {"properties", suite_properties},
      {"dependent-structure", suite_dependent_structure}};
  for (const auto& [n, fn] : table) {
    if (n == name) {
      const auto t0 = clock_type::now();
      SuiteResult r = fn(opt);
      r.seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
      return r;
    }
  }
  throw InvalidInput("unknown verification suite: " + name);
}

std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const SuiteOptions& opt, bool print) {
  const auto selected = names.empty() ? suite_names() : names;
  std::vector<SuiteResult> out;
  out.reserve(selected.size());
  for (const auto& name : selected) {
    SuiteResult r = run_suite(name, opt);
    if (print) {
      std::printf("[%s] %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.detail.c_str(), r.seconds);
      std::fflush(stdout);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace covspec::verify
