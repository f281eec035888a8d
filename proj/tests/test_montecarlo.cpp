#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "covspec/montecarlo.hpp"

using namespace covspec;

TEST_SUITE("montecarlo") {

TEST_CASE("same seed gives bitwise-identical draws") {
  EntryDistribution dist;
  dist.kind = EntryDistribution::Kind::StudentTScaled;
  dist.df = 8.0;
  auto g1 = replicate_rng(123, 7);
  auto g2 = replicate_rng(123, 7);
  const auto x1 = generate(40, 60, dist, SigmaSpec::identity(), g1);
  const auto x2 = generate(40, 60, dist, SigmaSpec::identity(), g2);
  CHECK(x1.cwiseEqual(x2).all());
  auto g3 = replicate_rng(123, 8);
  const auto x3 = generate(40, 60, dist, SigmaSpec::identity(), g3);
  CHECK(!x1.cwiseEqual(x3).all());
}

TEST_CASE("rademacher entries are exactly +-1") {
  EntryDistribution dist;
  dist.kind = EntryDistribution::Kind::Rademacher;
  auto g = replicate_rng(5, 0);
  const auto x = generate(20, 30, dist, SigmaSpec::identity(), g);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      CHECK(std::abs(x(i, j)) == 1.0);
}

TEST_CASE("renormalized spectrum of the identity data matrix") {
  // X = I (p = n): XX* = I, nu = 4p, all eigenvalues 1/(4p)
  const std::int64_t p = 16;
  const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(p, p);
  const auto eigs = renormalized_spectrum(X);
  REQUIRE(eigs.size() == static_cast<std::size_t>(p));
  for (double l : eigs)
    CHECK(l == doctest::Approx(1.0 / (4.0 * p)).epsilon(1e-12));
}

TEST_CASE("smaller-side Gram computation matches the direct p-side solve") {
  EntryDistribution dist;
  auto g = replicate_rng(99, 1);
  const auto X = generate(150, 60, dist, SigmaSpec::identity(), g);
  const auto eigs = renormalized_spectrum(X);  // via the 60x60 Gram matrix
  const auto r = make_ratios(150, 60);
  Eigen::MatrixXd S = X * X.transpose() / r.nu;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const auto full = es.eigenvalues();  // ascending, with 90 near-zeros first
  REQUIRE(eigs.size() == 60);
  for (int i = 0; i < 60; ++i)
    CHECK(std::abs(eigs[static_cast<std::size_t>(i)] - full(90 + i)) < 1e-10);
}

TEST_CASE("largest-remainder apportionment of atom multiplicities") {
  const auto sigma =
      SigmaSpec::from_measure(SpectralMeasure({0.5, 1.0}, {0.6, 0.4}));
  const auto diag = sigma.gamma_diagonal(5);
  // 5 * 0.6 = 3.0 and 5 * 0.4 = 2.0 -> 3 copies of sqrt(0.5), 2 of 1
  REQUIRE(diag.size() == 5);
  int small = 0, big = 0;
  for (double d : diag) {
    if (std::abs(d - std::sqrt(0.5)) < 1e-12) ++small;
    if (std::abs(d - 1.0) < 1e-12) ++big;
  }
  CHECK(small == 3);
  CHECK(big == 2);
  const auto implied = sigma.implied_measure(5);
  CHECK(implied.weights()[0] == doctest::Approx(0.6));
}

TEST_CASE("replicate study is reproducible and thread-count invariant") {
  ReplicateStudy study;
  study.p = 30;
  study.n = 50;
  study.dist.kind = EntryDistribution::Kind::RealGaussian;
  study.dist.seed = 2024;
  study.replicates = 8;
  study.functionals = {tf_identity(), tf_square()};
  study.threads = 1;
  const auto a = lss_replicates(study);
  const auto b = lss_replicates(study);
  study.threads = 4;
  const auto c = lss_replicates(study);
  REQUIRE(a.values.size() == 8);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    for (std::size_t j = 0; j < a.values[i].size(); ++j) {
      CHECK(a.values[i][j] == b.values[i][j]);
      CHECK(a.values[i][j] == c.values[i][j]);
    }
  CHECK(!a.to_csv().empty());
  CHECK(!a.summary_json().empty());
}

TEST_CASE("complex gaussian study: X_{x^2} mean is near its null value") {
  ReplicateStudy study;
  study.p = 60;
  study.n = 240;
  study.dist.kind = EntryDistribution::Kind::ComplexGaussian;
  study.dist.seed = 77;
  study.replicates = 400;
  study.functionals = {tf_square()};
  const auto res = lss_replicates(study);
  // complex-gaussian profile has alpha = delta = 0, so E X_{x^2} = 0
  double var = 0.0;
  for (const auto& row : res.values) var += row[0] * row[0];
  var /= static_cast<double>(res.values.size());
  const double se = std::sqrt(var / res.values.size());
  CHECK(std::abs(res.mean[0]) < 4.0 * se + 0.05);
}

TEST_CASE("spectrum stays below the renormalized edge under the null") {
  EntryDistribution dist;
  auto g = replicate_rng(11, 0);
  const auto X = generate(500, 500, dist, SigmaSpec::identity(), g);
  const auto eigs = renormalized_spectrum(X);
  CHECK(eigs.back() < 1.1);
  CHECK(eigs.front() > -1e-12);
}

TEST_CASE("esd distance is small for a large null replicate") {
  const auto r = make_ratios(400, 400);
  const auto cdf = limit_cdf(r, identity_measure(), 800);
  EntryDistribution dist;
  auto g = replicate_rng(21, 3);
  const auto X = generate(400, 400, dist, SigmaSpec::identity(), g);
  const auto eigs = renormalized_spectrum(X);
  CHECK(esd_distance(eigs, 400, cdf) < 0.08);
  // a point mass far from the bulk is far in Kolmogorov distance
  CHECK(esd_distance(std::vector<double>(400, 0.999), 400, cdf) > 0.3);
}

TEST_CASE("entry distribution parsing round trip") {
  for (const char* name : {"real-gaussian", "complex-gaussian", "rademacher",
                           "uniform", "student-t"}) {
    const auto d = EntryDistribution::parse(name, 1);
    CHECK(std::string(d.name()) == name);
  }
  CHECK_THROWS_AS(EntryDistribution::parse("cauchy", 1), InvalidInput);
  CHECK_THROWS_AS(EntryDistribution::parse("student-t", 1, 3.0), InvalidInput);
}

TEST_CASE("analytic moment profiles per distribution") {
  EntryDistribution d;
  d.kind = EntryDistribution::Kind::Rademacher;
  CHECK(d.profile().alpha == 1.0);
  CHECK(d.profile().delta == doctest::Approx(-2.0));
  d.kind = EntryDistribution::Kind::StudentTScaled;
  d.df = 10.0;
  CHECK(d.profile().delta == doctest::Approx(1.0));
  d.kind = EntryDistribution::Kind::ComplexGaussian;
  CHECK(d.profile().alpha == 0.0);
}

}  // TEST_SUITE
