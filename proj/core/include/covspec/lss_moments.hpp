#pragma once

// CLT ingredients for linear spectral statistics of the renormalized
// sample covariance matrix: the functionals g, h, s, t, the mean
// parameter A(z), the covariance kernel B(z1,z2), and contour
// integration of E(X_f) and Cov(X_f, X_g), with the identity-case
// closed forms as built-in oracles.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covspec/spectral_core.hpp"
#include "covspec/stieltjes.hpp"

#include <Eigen/Core>

namespace covspec {

// Population input for the kernels: either the diagonal case implied by
// H (the s/t trace limits collapse to H-integrals) or an explicit
// loading matrix Gamma with Gamma Gamma* normalized to unit spectral norm.
struct KernelContext {
  AspectRatios ratios;
  SpectralMeasure H;
  MomentProfile moments;
  std::optional<Eigen::MatrixXcd> gamma;  // ExplicitGamma mode when set

  KernelContext(AspectRatios r, SpectralMeasure h, MomentProfile mp)
      : ratios(r), H(std::move(h)), moments(mp) {}
  KernelContext(AspectRatios r, SpectralMeasure h, MomentProfile mp,
                Eigen::MatrixXcd g);
};

// Analytic test function with a declared singularity set, so the
// contour builder can validate clearance.
struct TestFunction {
  std::string name;
  std::function<cplx(cplx)> eval;
  std::vector<double> singularities;  // points f is not analytic at
};

TestFunction tf_identity();   // f(x) = x
TestFunction tf_square();     // f(x) = x^2
TestFunction tf_cube();       // f(x) = x^3
TestFunction tf_log();        // f(x) = log x, singular at 0
TestFunction tf_polynomial(std::vector<double> coeffs);  // sum c_k x^k

// Closed integration contour enclosing the support of the limit law.
// Circle: the unit-circle substitution
//   z(xi) = c1 + c2 + sqrt(c1 c2) (r xi + (r xi)^-1),   |xi| = 1, r > 1,
// which encloses [(sqrt(c2)-sqrt(c1))^2, 1] and excludes 0.
// Rectangle: axis-aligned box [x_left, x_right] x [-v0, v0].
struct Contour {
  enum class Kind { Circle, Rectangle } kind = Kind::Circle;
  double radius = 1.05;  // Circle
  double x_left = -0.1, x_right = 1.1, height = 0.5;  // Rectangle
  int nodes = 2048;

  static Contour circle(double r, int nodes = 2048);
  static Contour rectangle(double x_left, double x_right, double v0,
                           int nodes = 2048);

  // z and dz/dtheta at parameter theta in [0, 2pi)
  cplx point(double theta, const AspectRatios& ratios) const;
  cplx derivative(double theta, const AspectRatios& ratios) const;
  // Smallest distance from the contour to a real point (singularity check).
  double clearance(double x0, const AspectRatios& ratios) const;
};

struct LssMomentTable {
  std::vector<std::string> functions;
  std::vector<double> means;
  std::vector<std::vector<double>> cov;

  std::string to_json() const;
  std::string to_csv() const;
};

// --- kernel building blocks (Diagonal mode integrals are exact finite sums)

// g(z) = c1 int t/(1 + t m_under) dH - z
cplx g_fun(cplx z, const KernelContext& ctx, cplx m_under);

// h(z1,z2) = int t^2 / ((1 + t m1)(1 + t m2)) dH
cplx h_fun(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2);

// s(z): diagonal mode int t^2/(1 + t m)^3 dH; ExplicitGamma mode the
// finite-p Hadamard trace.
cplx s_fun(cplx z, const KernelContext& ctx, cplx m);

// t(z1,z2): diagonal mode int t^2/((1+t m1)^2 (1+t m2)^2) dH.
cplx t_fun(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2);

// Mean parameter A(z) of the CLT (requires the solved companion transform).
cplx mean_param(cplx z, const KernelContext& ctx, cplx m_under);

// Covariance kernel B(z1, z2).
cplx cov_kernel(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2);

// --- contour integrals

struct QuadratureOptions {
  int initial_nodes = 1024;
  int max_nodes = 1 << 15;
  double stability_tol = 1e-8;   // node-doubling stability target
  double divergence_tol = 1e-6;  // doubling changes above this => diverged
  SolverOptions solver;
};

// E(X_f) = -(1/2 pi i) oint f(z) A(z) dz by periodic trapezoid.
double lss_mean(const TestFunction& f, const KernelContext& ctx,
                const Contour& contour, const QuadratureOptions& opt = {});

// Cov(X_fj, X_fk) = -(1/4 pi^2) oint oint fj(z1) fk(z2) B(z1,z2) dz2 dz1.
// contour1 must strictly enclose contour2.
double lss_cov(const TestFunction& fj, const TestFunction& fk,
               const KernelContext& ctx, const Contour& contour1,
               const Contour& contour2, const QuadratureOptions& opt = {});

// int f dF^{c1,c2,H} by contour integration of the Stieltjes transform:
// -(1/2 pi i) oint f(z) m(z) dz.  Used for LSS centering terms.
double lss_centering(const TestFunction& f, const KernelContext& ctx,
                     const Contour& contour, const QuadratureOptions& opt = {});

// Default contours for a context: circle r=1.05 when H = delta_1,
// otherwise a rectangle with 10% margins.  `enclosing` > 1 widens for
// the outer contour of a double integral.
Contour default_contour(const KernelContext& ctx, double radius = 1.05);

// --- identity-case closed forms (the built-in oracle)

struct IdentityClosedForms {
  // means of X_f for f = x, x^2, log x
  double mean_f1, mean_f2, mean_f3;
  // covariances
  double cov_f1f1, cov_f1f2, cov_f1f3, cov_f2f2, cov_f3f3;
  // centering values theta_k = nu/sqrt(pn) * int f_k dF
  double theta1, theta2, theta3;
};

// All nine identity-case quantities.  Log-based entries require c2 > c1.
IdentityClosedForms identity_closed_forms(const AspectRatios& ratios,
                                          const MomentProfile& moments);

// Moment table over a set of test functions via numeric contours.
LssMomentTable lss_moment_table(const std::vector<TestFunction>& fs,
                                const KernelContext& ctx,
                                const QuadratureOptions& opt = {});

}  // namespace covspec
