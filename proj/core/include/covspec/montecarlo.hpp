#pragma once

// Synthetic data generation under the independent-component model
// X = Gamma Y, renormalized spectra via the smaller Gram matrix, and
// replicate studies that exercise the limit laws empirically.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "covspec/lss_moments.hpp"
#include "covspec/spectral_core.hpp"
#include "covspec/stieltjes.hpp"

namespace covspec {

struct EntryDistribution {
  enum class Kind {
    RealGaussian,     // alpha=1, delta=0
    ComplexGaussian,  // alpha=0, delta=0
    Rademacher,       // alpha=1, delta=-2
    UniformScaled,    // uniform on [-sqrt(3), sqrt(3)]; alpha=1, delta=-1.2
    StudentTScaled    // t(df) scaled to unit variance; alpha=1, delta=6/(df-4)
  };
  Kind kind = Kind::RealGaussian;
  double df = 8.0;  // StudentTScaled only; requires df > 4
  std::uint64_t seed = 0;

  MomentProfile profile() const;  // analytic (alpha, delta)
  bool is_complex() const { return kind == Kind::ComplexGaussian; }
  static EntryDistribution parse(const std::string& name, std::uint64_t seed,
                                 double df = 8.0);
  const char* name() const;
};

struct SigmaSpec {
  enum class Kind { Identity, DiagonalFromMeasure, ExplicitGamma };
  Kind kind = Kind::Identity;
  std::optional<SpectralMeasure> measure;   // DiagonalFromMeasure
  std::optional<Eigen::MatrixXd> gamma;     // ExplicitGamma

  static SigmaSpec identity();
  static SigmaSpec from_measure(SpectralMeasure m);
  static SigmaSpec explicit_gamma(Eigen::MatrixXd g);

  // Diagonal of Gamma for dimension p (Identity / DiagonalFromMeasure).
  // Atom multiplicities by largest-remainder apportionment of p * w_i.
  std::vector<double> gamma_diagonal(std::int64_t p) const;
  // Population spectral measure implied for dimension p.
  SpectralMeasure implied_measure(std::int64_t p) const;
};

// Deterministic per-replicate RNG stream from (study seed, index).
std::mt19937_64 replicate_rng(std::uint64_t study_seed, std::uint64_t index);

// Draws one standardized entry.
double draw_real(EntryDistribution::Kind kind, double df, std::mt19937_64& g);
cplx draw_entry(const EntryDistribution& dist, std::mt19937_64& g);

// X = Gamma Y with i.i.d. standardized entries (real-valued kinds).
Eigen::MatrixXd generate(std::int64_t p, std::int64_t n,
                         const EntryDistribution& dist, const SigmaSpec& sigma,
                         std::mt19937_64& rng);
Eigen::MatrixXcd generate_complex(std::int64_t p, std::int64_t n,
                                  const EntryDistribution& dist,
                                  const SigmaSpec& sigma, std::mt19937_64& rng);

// Nonzero spectrum of S_n = XX*/(nu * sigma_norm), computed from the Gram
// matrix on the smaller side, ascending, clamped at 0.
std::vector<double> renormalized_spectrum(const Eigen::MatrixXd& X,
                                          double sigma_norm = 1.0);
std::vector<double> renormalized_spectrum(const Eigen::MatrixXcd& X,
                                          double sigma_norm = 1.0);

// Spectrum of S0 = XX*/n (the classical scaling used by the tests).
std::vector<double> classical_spectrum(const Eigen::MatrixXd& X);
std::vector<double> classical_spectrum(const Eigen::MatrixXcd& X);

// Kolmogorov distance between the ESD of `eigs` (plus p - |eigs|
// structural zeros) and the theoretical limit CDF.
double esd_distance(const std::vector<double>& eigs, std::int64_t p,
                    const LimitCdf& cdf);

struct ReplicateStudy {
  std::int64_t p = 0, n = 0;
  EntryDistribution dist;
  SigmaSpec sigma = SigmaSpec::identity();
  int replicates = 1;
  std::vector<TestFunction> functionals;
  int threads = 1;
};

struct LssReplicateResult {
  std::vector<std::string> functions;
  std::vector<double> centerings;            // int f dF^{c1,c2,H} per f
  std::vector<std::vector<double>> values;   // [replicate][function]
  std::vector<double> mean;                  // study-level summary
  std::vector<std::vector<double>> cov;

  std::string to_csv() const;
  std::string summary_json() const;
};

// Per-replicate values of the centered, scaled linear spectral statistics
// X_f = (nu/sqrt(pn)) (sum_i f(lambda_i) - p int f dF^{c_n1,c_n2,H_n}).
LssReplicateResult lss_replicates(const ReplicateStudy& study);

struct DependentStructureResult {
  bool pass = false;
  std::vector<std::int64_t> dims;
  std::vector<double> ratios;  // E|x*Bx - tr(B Sigma)|^q / p^{q/2}
  std::vector<double> std_errors;
  double slope = 0.0, slope_se = 0.0;
};

// Diagnostic for the quadratic-form moment condition: the q-th moment of
// x*Bx - tr(B Sigma), normalized by p^{q/2}, must not grow with p.
DependentStructureResult dependent_structure_check(
    const SigmaSpec& sigma, const EntryDistribution& dist, int q, int trials,
    const std::vector<std::int64_t>& dims = {100, 400, 1600});

}  // namespace covspec
