#pragma once

// Foundational domain types: discrete population spectral measures,
// (p, n) aspect ratios under the (sqrt(p)+sqrt(n))^2 renormalization,
// and fourth-moment profiles of the underlying entries.
//
// All types here are immutable after construction and safe to share
// across threads.

#include <cstdint>
#include <string>
#include <vector>

#include "covspec/errors.hpp"

namespace covspec {

// Discrete population spectral distribution H.  Atoms live in [0, 1]
// with sup of the support pinned to 1 by the spectral-norm normalization;
// weights are positive and sum to one.  Construction canonicalizes:
// atoms sorted increasing, near-duplicates (1e-12 relative) merged.
class SpectralMeasure {
 public:
  SpectralMeasure(std::vector<double> atoms, std::vector<double> weights);

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  // integral of t^k dH(t)
  double moment(int k) const;

  std::string to_json() const;
  static SpectralMeasure from_json(const std::string& text);

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

// H = delta_1, the population spectrum under the null Sigma = I.
SpectralMeasure identity_measure();

// Empirical spectral distribution of Sigma / ||Sigma|| from its eigenvalues.
SpectralMeasure measure_from_sigma_eigenvalues(const std::vector<double>& eigs);

// Geometry of a (p, n) problem: nu = (sqrt(p)+sqrt(n))^2, c1 = p/nu,
// c2 = n/nu, which satisfy sqrt(c1) + sqrt(c2) = 1.
struct AspectRatios {
  std::int64_t p = 0;
  std::int64_t n = 0;
  double nu = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

AspectRatios make_ratios(std::int64_t p, std::int64_t n);

// Ratios taken directly from (c1, c2) values rather than integer (p, n);
// used by tests probing limit behaviour.  Requires c1, c2 in (0,1) with
// sqrt(c1)+sqrt(c2) = 1 up to 1e-10.
AspectRatios ratios_from_c(double c1, double c2);

// Fourth-moment profile of the i.i.d. entries:
// alpha = E y^2 (1 real, 0 complex), delta = E|y|^4 - 2 - alpha.
struct MomentProfile {
  double alpha = 1.0;
  double delta = 0.0;
};

MomentProfile make_moment_profile(double alpha, double delta);

enum class LimitScenario { Comparable, LargeN, LargeP };

// Diagnostic classification only; no formula ever branches on it.
LimitScenario classify_scenario(const AspectRatios& r, double threshold = 0.01);

const char* scenario_name(LimitScenario s);

}  // namespace covspec
