#include "covspec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "covspec/parallel.hpp"
#include "json.hpp"

namespace covspec {

MomentProfile EntryDistribution::profile() const {
  switch (kind) {
    case Kind::RealGaussian: return {1.0, 0.0};
    case Kind::ComplexGaussian: return {0.0, 0.0};
    case Kind::Rademacher: return {1.0, -2.0};
    case Kind::UniformScaled: return {1.0, -1.2};
    case Kind::StudentTScaled:
      if (!(df > 4.0))
        throw InvalidInput("StudentTScaled requires df > 4 for finite delta");
      return {1.0, 6.0 / (df - 4.0)};
  }
  throw InvalidInput("EntryDistribution: unknown kind");
}

const char* EntryDistribution::name() const {
  switch (kind) {
    case Kind::RealGaussian: return "real-gaussian";
    case Kind::ComplexGaussian: return "complex-gaussian";
    case Kind::Rademacher: return "rademacher";
    case Kind::UniformScaled: return "uniform";
    case Kind::StudentTScaled: return "student-t";
  }
  return "?";
}

EntryDistribution EntryDistribution::parse(const std::string& name,
                                           std::uint64_t seed, double df) {
  EntryDistribution d;
  d.seed = seed;
  d.df = df;
  if (name == "real-gaussian") d.kind = Kind::RealGaussian;
  else if (name == "complex-gaussian") d.kind = Kind::ComplexGaussian;
  else if (name == "rademacher") d.kind = Kind::Rademacher;
  else if (name == "uniform") d.kind = Kind::UniformScaled;
  else if (name == "student-t") d.kind = Kind::StudentTScaled;
  else throw InvalidInput("unknown entry distribution: " + name);
  d.profile();  // validates df
  return d;
}

SigmaSpec SigmaSpec::identity() { return SigmaSpec{}; }

SigmaSpec SigmaSpec::from_measure(SpectralMeasure m) {
  SigmaSpec s;
  s.kind = Kind::DiagonalFromMeasure;
  s.measure = std::move(m);
  return s;
}

SigmaSpec SigmaSpec::explicit_gamma(Eigen::MatrixXd g) {
  SigmaSpec s;
  s.kind = Kind::ExplicitGamma;
  s.gamma = std::move(g);
  return s;
}

std::vector<double> SigmaSpec::gamma_diagonal(std::int64_t p) const {
  if (kind == Kind::Identity) return std::vector<double>(p, 1.0);
  if (kind != Kind::DiagonalFromMeasure)
    throw InvalidInput("gamma_diagonal: explicit Gamma has no diagonal form");

  // largest-remainder apportionment of p * w_i
  const auto& atoms = measure->atoms();
  const auto& weights = measure->weights();
  const std::size_t K = atoms.size();
  std::vector<std::int64_t> counts(K);
  std::vector<double> remainders(K);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const double exact = static_cast<double>(p) * weights[i];
    counts[i] = static_cast<std::int64_t>(std::floor(exact));
    remainders[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t i = 0; assigned < p; ++i, ++assigned) counts[order[i % K]]++;

  std::vector<double> diag;
  diag.reserve(p);
  for (std::size_t i = 0; i < K; ++i)
    for (std::int64_t c = 0; c < counts[i]; ++c)
      diag.push_back(std::sqrt(atoms[i]));
  return diag;
}

SpectralMeasure SigmaSpec::implied_measure(std::int64_t p) const {
  if (kind == Kind::Identity) return identity_measure();
  if (kind == Kind::DiagonalFromMeasure) {
    auto diag = gamma_diagonal(p);
    std::vector<double> eigs(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) eigs[i] = diag[i] * diag[i];
    return measure_from_sigma_eigenvalues(eigs);
  }
  Eigen::MatrixXd sigma = (*gamma) * gamma->transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                    Eigen::EigenvaluesOnly);
  std::vector<double> eigs(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  for (double& e : eigs) e = std::max(e, 0.0);
  return measure_from_sigma_eigenvalues(eigs);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 replicate_rng(std::uint64_t study_seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(study_seed) ^ (index + 1)));
}

double draw_real(EntryDistribution::Kind kind, double df, std::mt19937_64& g) {
  switch (kind) {
    case EntryDistribution::Kind::RealGaussian: {
      std::normal_distribution<double> nd(0.0, 1.0);
      return nd(g);
    }
    case EntryDistribution::Kind::Rademacher:
      return (g() & 1ULL) ? 1.0 : -1.0;
    case EntryDistribution::Kind::UniformScaled: {
      std::uniform_real_distribution<double> ud(-std::sqrt(3.0), std::sqrt(3.0));
      return ud(g);
    }
    case EntryDistribution::Kind::StudentTScaled: {
      std::student_t_distribution<double> td(df);
      return td(g) * std::sqrt((df - 2.0) / df);
    }
    default:
      throw InvalidInput("draw_real: complex kind in real draw");
  }
}

cplx draw_entry(const EntryDistribution& dist, std::mt19937_64& g) {
  if (dist.kind == EntryDistribution::Kind::ComplexGaussian) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const double re = nd(g), im = nd(g);
    return cplx(re, im) / std::sqrt(2.0);
  }
  return cplx(draw_real(dist.kind, dist.df, g), 0.0);
}

Eigen::MatrixXd generate(std::int64_t p, std::int64_t n,
                         const EntryDistribution& dist, const SigmaSpec& sigma,
                         std::mt19937_64& rng) {
  if (dist.is_complex())
    throw InvalidInput("generate: complex distribution needs generate_complex");
  Eigen::MatrixXd Y(p, n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < p; ++i)
      Y(i, j) = draw_real(dist.kind, dist.df, rng);
  if (sigma.kind == SigmaSpec::Kind::Identity) return Y;
  if (sigma.kind == SigmaSpec::Kind::DiagonalFromMeasure) {
    auto diag = sigma.gamma_diagonal(p);
    for (std::int64_t i = 0; i < p; ++i) Y.row(i) *= diag[i];
    return Y;
  }
  if (sigma.gamma->rows() != p)
    throw DimensionMismatch("generate: Gamma rows != p");
  return (*sigma.gamma) * Y;
}

Eigen::MatrixXcd generate_complex(std::int64_t p, std::int64_t n,
                                  const EntryDistribution& dist,
                                  const SigmaSpec& sigma,
                                  std::mt19937_64& rng) {
  Eigen::MatrixXcd Y(p, n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < p; ++i) Y(i, j) = draw_entry(dist, rng);
  if (sigma.kind == SigmaSpec::Kind::Identity) return Y;
  if (sigma.kind == SigmaSpec::Kind::DiagonalFromMeasure) {
    auto diag = sigma.gamma_diagonal(p);
    for (std::int64_t i = 0; i < p; ++i) Y.row(i) *= diag[i];
    return Y;
  }
  if (sigma.gamma->rows() != p)
    throw DimensionMismatch("generate_complex: Gamma rows != p");
  return sigma.gamma->cast<cplx>() * Y;
}

namespace {

template <typename Mat>
std::vector<double> gram_spectrum(const Mat& X, double scale) {
  const Eigen::Index p = X.rows(), n = X.cols();
  Mat gram;
  if (p <= n)
    gram = X * X.adjoint();
  else
    gram = X.adjoint() * X;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("renormalized_spectrum: eigensolver failed on a " +
                std::to_string(gram.rows()) + "x" + std::to_string(gram.rows()) +
                " Gram matrix");
  std::vector<double> eigs(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(i) * scale;
    if (v < -1e-12 * std::max(1.0, std::abs(es.eigenvalues().maxCoeff() * scale)))
      throw Error("renormalized_spectrum: negative eigenvalue beyond tolerance");
    eigs[i] = std::max(v, 0.0);
  }
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

}  // namespace

std::vector<double> renormalized_spectrum(const Eigen::MatrixXd& X,
                                          double sigma_norm) {
  if (!(sigma_norm > 0.0))
    throw InvalidInput("renormalized_spectrum: sigma_norm must be > 0");
  const auto r = make_ratios(X.rows(), X.cols());
  return gram_spectrum(X, 1.0 / (r.nu * sigma_norm));
}

std::vector<double> renormalized_spectrum(const Eigen::MatrixXcd& X,
                                          double sigma_norm) {
  if (!(sigma_norm > 0.0))
    throw InvalidInput("renormalized_spectrum: sigma_norm must be > 0");
  const auto r = make_ratios(X.rows(), X.cols());
  return gram_spectrum(X, 1.0 / (r.nu * sigma_norm));
}

std::vector<double> classical_spectrum(const Eigen::MatrixXd& X) {
  return gram_spectrum(X, 1.0 / static_cast<double>(X.cols()));
}

std::vector<double> classical_spectrum(const Eigen::MatrixXcd& X) {
  return gram_spectrum(X, 1.0 / static_cast<double>(X.cols()));
}

double esd_distance(const std::vector<double>& eigs, std::int64_t p,
                    const LimitCdf& cdf) {
  std::vector<double> sorted = eigs;
  std::sort(sorted.begin(), sorted.end());
  const std::int64_t zeros = p - static_cast<std::int64_t>(sorted.size());
  if (zeros < 0) throw InvalidInput("esd_distance: more eigenvalues than p");
  const double dp = static_cast<double>(p);

  double dist = std::abs(static_cast<double>(zeros) / dp - cdf(0.0));
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = sorted[i];
    const double fe_after = (static_cast<double>(zeros) + i + 1.0) / dp;
    const double fe_before = (static_cast<double>(zeros) + i) / dp;
    const double ft = cdf(x);
    dist = std::max({dist, std::abs(fe_after - ft), std::abs(fe_before - ft)});
  }
  // also sweep the density grid between eigenvalues
  const auto& grid = cdf.curve().grid;
  for (double x : grid) {
    const std::size_t k =
        std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    const double fe = (static_cast<double>(zeros) + k) / dp;
    dist = std::max(dist, std::abs(fe - cdf(x)));
  }
  return dist;
}

LssReplicateResult lss_replicates(const ReplicateStudy& study) {
  if (study.replicates < 1)
    throw InvalidInput("lss_replicates: replicates must be >= 1");
  const auto r = make_ratios(study.p, study.n);
  const auto H = study.sigma.implied_measure(study.p);
  const std::size_t M = study.functionals.size();

  if (study.p > study.n)
    for (const auto& f : study.functionals)
      for (double s : f.singularities)
        if (s == 0.0)
          throw LogDomain("lss_replicates: " + f.name +
                          " undefined on the structural zeros (p > n)");

  // centering integrals int f dF^{c_n1,c_n2,H_n} via contour quadrature
  KernelContext ctx(r, H, study.dist.profile());
  Contour contour = default_contour(ctx);
  LssReplicateResult out;
  out.centerings.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    out.functions.push_back(study.functionals[j].name);
    out.centerings[j] = lss_centering(study.functionals[j], ctx, contour);
  }

  const double scale = r.nu / std::sqrt(static_cast<double>(study.p) *
                                        static_cast<double>(study.n));
  out.values.assign(study.replicates, std::vector<double>(M, 0.0));

  parallel_for(study.replicates, study.threads, [&](std::size_t rep) {
    auto rng = replicate_rng(study.dist.seed, rep);
    std::vector<double> eigs;
    if (study.dist.is_complex()) {
      auto X = generate_complex(study.p, study.n, study.dist, study.sigma, rng);
      eigs = renormalized_spectrum(X);
    } else {
      auto X = generate(study.p, study.n, study.dist, study.sigma, rng);
      eigs = renormalized_spectrum(X);
    }
    const double zeros = static_cast<double>(study.p) -
                         static_cast<double>(eigs.size());
    for (std::size_t j = 0; j < M; ++j) {
      double sum = zeros * study.functionals[j].eval(cplx(0.0, 0.0)).real();
      for (double l : eigs)
        sum += study.functionals[j].eval(cplx(l, 0.0)).real();
      out.values[rep][j] =
          scale * (sum - static_cast<double>(study.p) * out.centerings[j]);
    }
  });

  // summary: mean and covariance in fixed replicate order
  out.mean.assign(M, 0.0);
  for (const auto& row : out.values)
    for (std::size_t j = 0; j < M; ++j) out.mean[j] += row[j];
  for (double& m : out.mean) m /= study.replicates;
  out.cov.assign(M, std::vector<double>(M, 0.0));
  if (study.replicates > 1) {
    for (const auto& row : out.values)
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < M; ++k)
          out.cov[j][k] += (row[j] - out.mean[j]) * (row[k] - out.mean[k]);
    for (auto& rowc : out.cov)
      for (double& v : rowc) v /= (study.replicates - 1);
  }
  return out;
}

std::string LssReplicateResult::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "replicate";
  for (const auto& f : functions) os << "," << f;
  os << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << i;
    for (double v : values[i]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

std::string LssReplicateResult::summary_json() const {
  nlohmann::json j;
  j["functions"] = functions;
  j["centerings"] = centerings;
  j["replicates"] = values.size();
  j["mean"] = mean;
  j["cov"] = cov;
  return j.dump();
}

DependentStructureResult dependent_structure_check(
    const SigmaSpec& sigma, const EntryDistribution& dist, int q, int trials,
    const std::vector<std::int64_t>& dims) {
  if (q != 2 && q != 4)
    throw InvalidInput("dependent_structure_check: q must be 2 or 4");
  if (dist.is_complex())
    throw InvalidInput("dependent_structure_check: real entry kinds only");

  DependentStructureResult out;
  out.dims = dims;
  for (std::size_t di = 0; di < dims.size(); ++di) {
    const std::int64_t p = dims[di];
    auto rng = replicate_rng(dist.seed ^ 0xB0B5ULL, di);

    // fixed symmetric test matrix with bounded spectral norm (~1)
    Eigen::MatrixXd B(p, p);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::int64_t i = 0; i < p; ++i) {
      B(i, i) = nd(rng) * std::sqrt(2.0);
      for (std::int64_t j = i + 1; j < p; ++j) B(i, j) = B(j, i) = nd(rng);
    }
    B /= 2.0 * std::sqrt(static_cast<double>(p));

    const auto diag = sigma.gamma_diagonal(p);
    double tr_b_sigma = 0.0;
    for (std::int64_t i = 0; i < p; ++i)
      tr_b_sigma += B(i, i) * diag[i] * diag[i];

    std::vector<double> samples(trials);
    Eigen::VectorXd x(p);
    for (int t = 0; t < trials; ++t) {
      for (std::int64_t i = 0; i < p; ++i)
        x(i) = diag[i] * draw_real(dist.kind, dist.df, rng);
      const double quad = x.dot(B * x);
      samples[t] = std::pow(std::abs(quad - tr_b_sigma), q);
    }
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / trials;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= std::max(1, trials - 1);
    const double norm = std::pow(static_cast<double>(p), q / 2.0);
    out.ratios.push_back(mean / norm);
    out.std_errors.push_back(std::sqrt(var / trials) / norm);
  }

  // one-sided slope test of ratio against log p at the 5% level
  const std::size_t K = dims.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const double x = std::log(static_cast<double>(dims[i]));
    sx += x;
    sy += out.ratios[i];
    sxx += x * x;
    sxy += x * out.ratios[i];
  }
  const double denom = K * sxx - sx * sx;
  out.slope = (K * sxy - sx * sy) / denom;
  double se2 = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double x = std::log(static_cast<double>(dims[i]));
    const double w = (K * x - sx) / denom;
    se2 += w * w * out.std_errors[i] * out.std_errors[i];
  }
  out.slope_se = std::sqrt(se2);
  out.pass = out.slope <= 1.645 * out.slope_se;
  return out;
}

}  // namespace covspec
