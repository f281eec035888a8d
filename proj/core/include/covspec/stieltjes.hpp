#pragma once

// Solver for the self-consistent equation of the limiting Stieltjes
// transform m(z) of the renormalized sample covariance matrix
//
//   m(z) = int dH(t) / ((c2 - c1 - c1 z m(z)) t - z),   Im z > 0,
//
// unique in { m in C+ : -(c2-c1)/z + c1 m in C+ or c2 = 0 }, together
// with Stieltjes inversion to the limiting density / CDF.

#include <complex>
#include <string>
#include <vector>

#include "covspec/spectral_core.hpp"

namespace covspec {

using cplx = std::complex<double>;

struct StieltjesSolution {
  cplx z;
  cplx m;        // m(z)
  cplx m_under;  // companion transform -(c2-c1)/z + c1 m(z)
  double residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

// Fixed-point solve of the self-consistent equation at z in C+.
// Plain iteration from m0 = -1/z; switches to damped iteration when the
// residual stops contracting, with a Newton polish once close.
StieltjesSolution solve(cplx z, const AspectRatios& ratios,
                        const SpectralMeasure& H,
                        const SolverOptions& opt = {});

// Same but with a caller-chosen starting point (used by the uniqueness
// property checks).
StieltjesSolution solve_from(cplx z, cplx m0, const AspectRatios& ratios,
                             const SpectralMeasure& H,
                             const SolverOptions& opt = {});

// Right-hand side of the self-consistent equation at a trial m.
cplx equation_rhs(cplx z, cplx m, double c1, double c2,
                  const SpectralMeasure& H);

enum class DegenerateLimit { LargeN, LargeP };

// Exact-endpoint evaluation: (c1,c2)=(0,1) gives m(z) = int dH/(t-z);
// (1,0) gives m(z) = -1/z.
StieltjesSolution solve_degenerate(cplx z, DegenerateLimit which,
                                   const SpectralMeasure& H);

struct DensityCurve {
  std::vector<double> grid;     // increasing x values
  std::vector<double> density;  // f(x) >= 0
  double zero_atom = 0.0;       // point mass at x = 0, max(0, 1 - c2/c1)

  double total_mass() const;  // trapezoid integral + zero_atom
  std::string to_json() const;
  std::string to_csv() const;  // columns x, f
};

// Stieltjes inversion f(x) = lim_{v->0} Im m(x+iv)/pi evaluated down an
// epsilon ladder with linear extrapolation from the last two rungs.
DensityCurve density_curve(const AspectRatios& ratios,
                           const SpectralMeasure& H,
                           const std::vector<double>& grid,
                           const std::vector<double>& epsilon_ladder =
                               {1e-2, 1e-3, 1e-4, 1e-5},
                           const SolverOptions& opt = {});

// Convenience: uniform grid over [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int points);

// Distribution function of the limiting law, built by integrating a
// density curve and adding the zero atom for x >= 0.
class LimitCdf {
 public:
  explicit LimitCdf(DensityCurve curve);
  double operator()(double x) const;  // monotone, range [0, 1]
  const DensityCurve& curve() const { return curve_; }

 private:
  DensityCurve curve_;
  std::vector<double> cum_;  // cumulative trapezoid integral over grid
};

// Builds a CDF for the given geometry with a default grid covering the
// support with margin.
LimitCdf limit_cdf(const AspectRatios& ratios, const SpectralMeasure& H,
                   int grid_points = 2000, const SolverOptions& opt = {});

}  // namespace covspec
