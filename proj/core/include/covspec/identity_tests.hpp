#pragma once

// Identity-covariance hypothesis tests: the Frobenius-norm (Ledoit-Wolf)
// statistic W with its harmonic null law, and the corrected LRT (p < n)
// / quasi-LRT (p > n) with theirs, standardized to z-scores / p-values.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "covspec/spectral_core.hpp"

namespace covspec {

enum class TestKind { Frobenius, CorrectedLRT, QuasiLRT };

struct TestReport {
  TestKind name = TestKind::Frobenius;
  double raw_statistic = 0.0;
  double centering = 0.0;
  double scale = 0.0;
  double z_score = 0.0;
  double p_value = 0.0;  // two-sided standard normal by default
  bool one_sided = false;
  // metadata
  std::int64_t p = 0, n = 0;
  double alpha = 1.0, delta = 0.0;
  double c_n = 0.0;  // p/n
  bool moments_estimated = false;

  std::string to_json() const;
};

const char* test_kind_name(TestKind k);

// Standard normal CDF and two-sided p-value helpers.
double normal_cdf(double x);
double two_sided_p(double z);

// W = (1/p) tr{(S0 - I)^2} - (1/np) (tr S0)^2 + p/n, computed from the
// min(p,n) nonzero eigenvalues of S0 = XX*/n.  When p > n the p - n
// structural zeros contribute (0-1)^2 = 1 each, handled analytically.
double frobenius_statistic(const std::vector<double>& eigs, std::int64_t p,
                           std::int64_t n);

TestReport frobenius_test(const std::vector<double>& eigs, std::int64_t p,
                          std::int64_t n, const MomentProfile& moments,
                          bool one_sided = false);

// L* = sum lambda - sum log lambda - p over eigenvalues of S0 (p < n);
// L = same over eigenvalues of X*X/p (p > n).  Undefined at p = n.
double lrt_statistic(const std::vector<double>& eigs, std::int64_t p,
                     std::int64_t n);

TestReport lrt_test(const std::vector<double>& eigs, std::int64_t p,
                    std::int64_t n, const MomentProfile& moments,
                    bool one_sided = false);

// Null-law constants of the LRT family: A(c), B(c), C^2(c).
double lrt_centering_shape(double c);                          // A
double lrt_centering_offset(double c, const MomentProfile& m); // B
double lrt_variance(double c, const MomentProfile& m);         // C^2

// Reconstruction of the two null laws from the closed-form LSS moments
// via the delta method; equals the theorem constants algebraically.
struct NullLaw {
  double mean;
  double variance;
};
struct DeltaMethodResult {
  NullLaw frobenius;  // law of nW - p
  NullLaw lrt_pivot;  // law of the LRT pivot before standardization
  double g2_at_theta; // consistency value 1 - (1 - c2/c1) log(1 - c1/c2)
};
DeltaMethodResult delta_method_check(const AspectRatios& ratios,
                                     const MomentProfile& moments);

// Heuristic (alpha, delta) estimate from data: alpha from the is_real
// flag, delta from the pooled fourth moment of row-standardized entries.
MomentProfile estimate_moment_profile(const Eigen::MatrixXd& data);
MomentProfile estimate_moment_profile(const Eigen::MatrixXcd& data,
                                      bool is_real);

}  // namespace covspec
