#include "covspec/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace covspec {

namespace {

cplx companion(cplx z, cplx m, double c1, double c2) {
  return -(c2 - c1) / z + c1 * m;
}

// d/dm of the equation RHS (finite sum, used for the Newton polish).
cplx rhs_derivative(cplx z, cplx m, double c1, double c2,
                    const SpectralMeasure& H) {
  cplx d = 0.0;
  for (std::size_t i = 0; i < H.atoms().size(); ++i) {
    const double t = H.atoms()[i];
    const cplx denom = (cplx(c2 - c1) - c1 * z * m) * t - z;
    d += H.weights()[i] * c1 * z * t / (denom * denom);
  }
  return d;
}

}  // namespace

cplx equation_rhs(cplx z, cplx m, double c1, double c2,
                  const SpectralMeasure& H) {
  cplx s = 0.0;
  const cplx a = cplx(c2 - c1) - c1 * z * m;
  for (std::size_t i = 0; i < H.atoms().size(); ++i)
    s += H.weights()[i] / (a * H.atoms()[i] - z);
  return s;
}

namespace {

// RHS together with a first-order round-off floor for |m - RHS(m)|: the
// coefficient a = (c2-c1) - c1 z m cancels catastrophically near the real
// axis when c1 >> c2, so the attainable residual can exceed tol * |m|.
cplx rhs_and_floor(cplx z, cplx m, double c1, double c2,
                   const SpectralMeasure& H, double& floor_out) {
  constexpr double eps = 2.3e-16;
  const cplx a = cplx(c2 - c1) - c1 * z * m;
  const double err_a = eps * (std::abs(c2 - c1) + std::abs(c1 * z * m));
  cplx s = 0.0;
  double floor = eps * std::abs(m);
  for (std::size_t i = 0; i < H.atoms().size(); ++i) {
    const double t = H.atoms()[i];
    const cplx denom = a * t - z;
    s += H.weights()[i] / denom;
    const double ad = std::abs(denom);
    floor += H.weights()[i] * (err_a * t + eps * std::abs(z)) / (ad * ad);
  }
  floor_out = floor;
  return s;
}

}  // namespace

namespace {

// One fixed-point run without the uniqueness-set recovery.
StieltjesSolution iterate_from(cplx z, cplx m0, const AspectRatios& ratios,
                               const SpectralMeasure& H,
                               const SolverOptions& opt) {
  if (!(z.imag() > 0.0))
    throw InvalidInput("stieltjes::solve: Im(z) must be positive");
  if (!(opt.tol > 0.0)) throw InvalidInput("stieltjes::solve: tol must be > 0");

  const double c1 = ratios.c1, c2 = ratios.c2;
  cplx m = m0;
  double lambda = 1.0;       // damping factor
  int stalls = 0;            // consecutive non-contracting steps
  double prev_res = std::numeric_limits<double>::infinity();
  double res = prev_res;
  int it = 0;

  double tol_eff = opt.tol;
  for (; it < opt.max_iter; ++it) {
    double floor = 0.0;
    const cplx rhs = rhs_and_floor(z, m, c1, c2, H, floor);
    res = std::abs(m - rhs);
    // |m| grows like 1/sqrt(z) toward a hard support edge and the RHS has
    // a cancellation-limited round-off floor, so the test is relative to
    // max(1, |m|) and never tighter than that floor.
    tol_eff = std::max(opt.tol * std::max(1.0, std::abs(m)), 8.0 * floor);
    if (res <= tol_eff) break;

    if (res >= prev_res) {
      if (++stalls >= 20) {
        lambda = std::max(lambda * 0.5, 1.0 / 4096.0);
        stalls = 0;
      }
    } else {
      stalls = 0;
    }
    prev_res = res;

    cplx next = (1.0 - lambda) * m + lambda * rhs;

    // Guarded Newton step: kept only if it reduces the residual and stays
    // in C+, so it can never make the damped iteration worse.  Near the
    // real axis the plain map's contraction factor approaches 1 and Newton
    // does essentially all the work.
    const cplx fprime = 1.0 - rhs_derivative(z, m, c1, c2, H);
    if (std::abs(fprime) > 1e-14) {
      const cplx newton = m - (m - rhs) / fprime;
      if (newton.imag() > 0.0) {
        const double nres = std::abs(newton - equation_rhs(z, newton, c1, c2, H));
        if (nres < res) next = newton;
      }
    }
    m = next;
  }

  if (res > tol_eff)
    throw NonConvergence(it, res, "stieltjes::solve at z=(" +
                                      std::to_string(z.real()) + "," +
                                      std::to_string(z.imag()) + ")");

  StieltjesSolution sol;
  sol.z = z;
  sol.m = m;
  sol.m_under = companion(z, m, c1, c2);
  sol.residual = res;
  sol.iterations = it;
  return sol;
}

}  // namespace

StieltjesSolution solve_from(cplx z, cplx m0, const AspectRatios& ratios,
                             const SpectralMeasure& H,
                             const SolverOptions& opt) {
  StieltjesSolution sol;
  bool direct_ok = true;
  try {
    sol = iterate_from(z, m0, ratios, H, opt);
  } catch (const NonConvergence&) {
    direct_ok = false;  // fall through to the continuation below
  }

  // The equation has spurious fixed points outside the uniqueness set
  // (several can lie in C+ when c1 > c2), reachable from arbitrary starts
  // or through numerical error near the real axis.  Recover by homotopic
  // continuation: high above the real axis the valid root is the unique
  // attractor; track it downward, shrinking the step whenever a step hops
  // to an invalid branch.
  // Membership is tested with a cancellation allowance: when p >> n the
  // zero atom makes both terms of m_under huge and opposite in sign, and
  // near the real axis the true Im(m_under) can sit below the solver's
  // attainable absolute accuracy (tol * |m|).  Spurious branches violate
  // the set by O(1), so a tolerance-scaled slack still separates them.
  const double c1 = ratios.c1, c2 = ratios.c2;
  const auto valid = [&](const StieltjesSolution& s) {
    const double slack = 1e4 * opt.tol *
        (std::abs((c2 - c1) / s.z) + c1 * std::abs(s.m) + 1.0);
    return s.m.imag() > 0.0 && s.m_under.imag() > -slack;
  };
  if (!direct_ok || !valid(sol)) {
    const double w0 = std::max(0.0, 1.0 - c2 / c1);
    const double v_target = z.imag();
    double v = std::max(16.0 * v_target, 4.0);
    sol = iterate_from(cplx(z.real(), v), -1.0 / cplx(z.real(), v), ratios, H,
                       opt);
    int steps = 0;
    while (valid(sol) && v > v_target && ++steps < 4000) {
      bool advanced = false;
      for (double factor : {0.5, 0.75, 0.9, 0.97, 0.995}) {
        const double v_next = std::max(v_target, v * factor);
        // shift the analytic zero-atom pole so the warm start tracks the
        // bounded continuous part of m
        const cplx m_start = sol.m + w0 / cplx(z.real(), v) -
                             w0 / cplx(z.real(), v_next);
        try {
          const StieltjesSolution cand =
              iterate_from(cplx(z.real(), v_next), m_start, ratios, H, opt);
          if (valid(cand)) {
            sol = cand;
            v = v_next;
            advanced = true;
            break;
          }
        } catch (const NonConvergence&) {
          // step too aggressive for this warm start; try a smaller one
        }
      }
      if (!advanced) break;
    }
    if (!(valid(sol) && v <= v_target))
      throw NonConvergence(sol.iterations, sol.residual,
                           "stieltjes::solve: uniqueness-set violation persists");
  }
  return sol;
}

StieltjesSolution solve(cplx z, const AspectRatios& ratios,
                        const SpectralMeasure& H, const SolverOptions& opt) {
  return solve_from(z, -1.0 / z, ratios, H, opt);
}

StieltjesSolution solve_degenerate(cplx z, DegenerateLimit which,
                                   const SpectralMeasure& H) {
  if (!(z.imag() > 0.0))
    throw InvalidInput("solve_degenerate: Im(z) must be positive");
  StieltjesSolution sol;
  sol.z = z;
  sol.residual = 0.0;
  sol.iterations = 0;
  if (which == DegenerateLimit::LargeP) {
    sol.m = -1.0 / z;
    sol.m_under = -1.0 / z + sol.m;  // c1=1, c2=0
  } else {
    cplx s = 0.0;
    for (std::size_t i = 0; i < H.atoms().size(); ++i)
      s += H.weights()[i] / (H.atoms()[i] - z);
    sol.m = s;
    sol.m_under = -1.0 / z;  // c1=0, c2=1
  }
  return sol;
}

double DensityCurve::total_mass() const {
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    mass += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return mass + zero_atom;
}

std::string DensityCurve::to_json() const {
  nlohmann::json j;
  j["grid"] = grid;
  j["density"] = density;
  j["zero_atom"] = zero_atom;
  return j.dump();
}

std::string DensityCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,f\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << grid[i] << "," << density[i] << "\n";
  return os.str();
}

DensityCurve density_curve(const AspectRatios& ratios,
                           const SpectralMeasure& H,
                           const std::vector<double>& grid,
                           const std::vector<double>& epsilon_ladder,
                           const SolverOptions& opt) {
  if (grid.size() < 2) throw InvalidInput("density_curve: grid too small");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw InvalidInput("density_curve: grid must be strictly increasing");
  if (epsilon_ladder.size() < 2)
    throw InvalidInput("density_curve: ladder needs at least two rungs");
  for (std::size_t i = 0; i < epsilon_ladder.size(); ++i) {
    if (!(epsilon_ladder[i] > 0.0))
      throw InvalidInput("density_curve: ladder entries must be > 0");
    if (i > 0 && !(epsilon_ladder[i] < epsilon_ladder[i - 1]))
      throw InvalidInput("density_curve: ladder must be strictly decreasing");
  }

  const double c1 = ratios.c1, c2 = ratios.c2;
  const double w0 = std::max(0.0, 1.0 - c2 / c1);

  DensityCurve out;
  out.grid = grid;
  out.density.resize(grid.size());
  out.zero_atom = w0;

  const std::size_t L = epsilon_ladder.size();
  // Warm starts carry the previous solution with the analytic zero-atom
  // pole shifted to the new z, so only the bounded continuous part must
  // track between evaluations.
  cplx warm = cplx(0.0, 1.0);  // carried across grid points at the top rung
  cplx warm_z = cplx(grid[0], epsilon_ladder[0]);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double x = grid[gi];
    double f1 = 0.0, f2 = 0.0;  // values at the last two rungs
    cplx m = warm;
    cplx m_z = warm_z;
    for (std::size_t li = 0; li < L; ++li) {
      const double v = epsilon_ladder[li];
      const cplx z(x, v);
      StieltjesSolution sol;
      try {
        const cplx m0 = (li == 0 && gi == 0) ? -1.0 / z
                                             : m + w0 / m_z - w0 / z;
        sol = solve_from(z, m0, ratios, H, opt);
      } catch (const NonConvergence& e) {
        throw NonConvergence(e.iterations, e.last_residual,
                             "density_curve at x=" + std::to_string(x));
      }
      m = sol.m;
      m_z = z;
      if (li == 0) {
        warm = sol.m;
        warm_z = z;
      }
      // strip the analytic zero atom so extrapolation sees only the
      // continuous part
      cplx m_cont = sol.m + w0 / z;
      if (li == L - 2) f1 = m_cont.imag() / M_PI;
      if (li == L - 1) f2 = m_cont.imag() / M_PI;
    }
    // linear extrapolation to v = 0 from the last two rungs
    const double v1 = epsilon_ladder[L - 2], v2 = epsilon_ladder[L - 1];
    double f0 = (f2 * v1 - f1 * v2) / (v1 - v2);
    if (f0 < 1e-8) f0 = 0.0;  // support-edge cutoff
    out.density[gi] = f0;
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return g;
}

LimitCdf::LimitCdf(DensityCurve curve) : curve_(std::move(curve)) {
  cum_.resize(curve_.grid.size(), 0.0);
  for (std::size_t i = 1; i < curve_.grid.size(); ++i)
    cum_[i] = cum_[i - 1] + 0.5 * (curve_.density[i] + curve_.density[i - 1]) *
                                (curve_.grid[i] - curve_.grid[i - 1]);
}

double LimitCdf::operator()(double x) const {
  if (x < 0.0) return 0.0;
  const auto& g = curve_.grid;
  if (x < g.front())
    throw Error("LimitCdf: x below the density grid");
  if (x >= g.back()) return curve_.zero_atom + cum_.back();
  const auto it = std::upper_bound(g.begin(), g.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - g.begin());
  const double x0 = g[i - 1], x1 = g[i];
  const double s = (x - x0) / (x1 - x0);
  // trapezoid-consistent interpolation of the cumulative integral
  const double fx = curve_.density[i - 1] +
                    s * (curve_.density[i] - curve_.density[i - 1]);
  const double inc = 0.5 * (curve_.density[i - 1] + fx) * (x - x0);
  return std::min(1.0, curve_.zero_atom + cum_[i - 1] + inc);
}

LimitCdf limit_cdf(const AspectRatios& ratios, const SpectralMeasure& H,
                   int grid_points, const SolverOptions& opt) {
  // Graded grid clustered at both ends: square-root edge behaviour of the
  // density makes uniform trapezoid lose mass near the support edges.
  const double lo = 0.0, hi = 1.05;
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double u = static_cast<double>(i) / (grid_points - 1);
    const double warped = u - std::sin(2.0 * M_PI * u) / (2.0 * M_PI);
    grid[i] = lo + (hi - lo) * warped;
  }
  // de-duplicate endpoints flattened by the warp
  std::vector<double> g;
  g.reserve(grid.size());
  for (double x : grid)
    if (g.empty() || x > g.back() + 1e-12) g.push_back(x);
  return LimitCdf(density_curve(ratios, H, g, {1e-2, 1e-3, 1e-4, 1e-5}, opt));
}

}  // namespace covspec
