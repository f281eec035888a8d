#include "covspec/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"

namespace covspec {

SpectralMeasure::SpectralMeasure(std::vector<double> atoms,
                                 std::vector<double> weights) {
  if (atoms.size() != weights.size() || atoms.empty())
    throw InvalidInput("SpectralMeasure: atoms/weights size mismatch or empty");

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t i : order) {
    double t = atoms[i];
    double w = weights[i];
    if (t < -1e-15 || t > 1.0 + 1e-12)
      throw InvalidInput("SpectralMeasure: atom outside [0, 1]");
    if (w <= 0.0) throw InvalidInput("SpectralMeasure: non-positive weight");
    t = std::clamp(t, 0.0, 1.0);
    // merge atoms within 1e-12 relative distance
    if (!atoms_.empty() &&
        std::abs(t - atoms_.back()) <= 1e-12 * std::max(1.0, std::abs(t))) {
      weights_.back() += w;
    } else {
      atoms_.push_back(t);
      weights_.push_back(w);
    }
  }

  double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidInput("SpectralMeasure: weights sum to " +
                       std::to_string(total) + ", expected 1");
  if (std::abs(atoms_.back() - 1.0) > 1e-12)
    throw InvalidInput("SpectralMeasure: sup of support must equal 1");
  atoms_.back() = 1.0;  // sup support = 1, so support meets R+ automatically
}

double SpectralMeasure::moment(int k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    s += weights_[i] * std::pow(atoms_[i], k);
  return s;
}

std::string SpectralMeasure::to_json() const {
  nlohmann::json j;
  j["atoms"] = atoms_;
  j["weights"] = weights_;
  return j.dump();
}

SpectralMeasure SpectralMeasure::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return SpectralMeasure(j.at("atoms").get<std::vector<double>>(),
                         j.at("weights").get<std::vector<double>>());
}

SpectralMeasure identity_measure() { return SpectralMeasure({1.0}, {1.0}); }

SpectralMeasure measure_from_sigma_eigenvalues(
    const std::vector<double>& eigs) {
  if (eigs.empty()) throw InvalidInput("measure_from_sigma_eigenvalues: empty");
  double top = 0.0;
  for (double e : eigs) {
    if (e < 0.0)
      throw InvalidInput("measure_from_sigma_eigenvalues: negative eigenvalue");
    top = std::max(top, e);
  }
  if (top == 0.0)
    throw InvalidInput("measure_from_sigma_eigenvalues: all-zero spectrum");

  std::map<double, std::size_t> counts;
  for (double e : eigs) counts[e / top]++;
  std::vector<double> atoms, weights;
  const double w = 1.0 / static_cast<double>(eigs.size());
  for (auto& [t, c] : counts) {
    atoms.push_back(t);
    weights.push_back(w * static_cast<double>(c));
  }
  return SpectralMeasure(std::move(atoms), std::move(weights));
}

AspectRatios make_ratios(std::int64_t p, std::int64_t n) {
  if (p < 1 || n < 1) throw InvalidInput("make_ratios: p and n must be >= 1");
  AspectRatios r;
  r.p = p;
  r.n = n;
  const double sp = std::sqrt(static_cast<double>(p));
  const double sn = std::sqrt(static_cast<double>(n));
  r.nu = (sp + sn) * (sp + sn);
  r.c1 = static_cast<double>(p) / r.nu;
  r.c2 = static_cast<double>(n) / r.nu;
  return r;
}

AspectRatios ratios_from_c(double c1, double c2) {
  if (!(c1 > 0.0 && c1 < 1.0 && c2 > 0.0 && c2 < 1.0))
    throw InvalidInput("ratios_from_c: c1, c2 must lie in (0, 1)");
  if (std::abs(std::sqrt(c1) + std::sqrt(c2) - 1.0) > 1e-10)
    throw InvalidInput("ratios_from_c: sqrt(c1)+sqrt(c2) != 1");
  AspectRatios r;
  r.p = 0;
  r.n = 0;
  r.nu = 0.0;
  r.c1 = c1;
  r.c2 = c2;
  return r;
}

MomentProfile make_moment_profile(double alpha, double delta) {
  if (alpha != 0.0 && alpha != 1.0)
    throw InvalidInput("MomentProfile: alpha must be exactly 0 or 1");
  if (delta < -1.0 - alpha)
    throw InvalidInput("MomentProfile: delta below -1-alpha violates E|y|^4 >= 1");
  return MomentProfile{alpha, delta};
}

LimitScenario classify_scenario(const AspectRatios& r, double threshold) {
  if (r.c1 < threshold) return LimitScenario::LargeN;
  if (r.c2 < threshold) return LimitScenario::LargeP;
  return LimitScenario::Comparable;
}

const char* scenario_name(LimitScenario s) {
  switch (s) {
    case LimitScenario::Comparable: return "comparable";
    case LimitScenario::LargeN: return "large-n";
    case LimitScenario::LargeP: return "large-p";
  }
  return "?";
}

}  // namespace covspec
