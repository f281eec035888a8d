#include <cmath>
#include <random>

#include "doctest.h"

#include "covspec/spectral_core.hpp"

using namespace covspec;

TEST_SUITE("spectral_core") {

TEST_CASE("aspect ratios: smallest symmetric case") {
  const auto r = make_ratios(1, 1);
  CHECK(r.nu == doctest::Approx(4.0));
  CHECK(r.c1 == doctest::Approx(0.25));
  CHECK(r.c2 == doctest::Approx(0.25));
}

TEST_CASE("aspect ratios: p = n gives c1 = c2 = 1/4 for any p") {
  for (std::int64_t p : {2, 7, 100, 12345}) {
    const auto r = make_ratios(p, p);
    CHECK(r.c1 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r.c2 == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("aspect ratios: perfect squares") {
  const auto r = make_ratios(400, 100);
  CHECK(r.nu == doctest::Approx(900.0));
  CHECK(r.c1 == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(r.c2 == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(std::sqrt(r.c1) + std::sqrt(r.c2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("aspect ratios: sqrt identity over random pairs up to 1e9") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> u(1, 1000000000LL);
  for (int i = 0; i < 1000; ++i) {
    const auto r = make_ratios(u(rng), u(rng));
    CHECK(std::abs(std::sqrt(r.c1) + std::sqrt(r.c2) - 1.0) < 1e-14);
    CHECK(r.nu > static_cast<double>(std::max(r.p, r.n)));
  }
}

TEST_CASE("aspect ratios: rejects zero dimensions") {
  CHECK_THROWS_AS(make_ratios(0, 10), InvalidInput);
  CHECK_THROWS_AS(make_ratios(10, 0), InvalidInput);
}

TEST_CASE("identity measure") {
  const auto H = identity_measure();
  REQUIRE(H.atoms().size() == 1);
  CHECK(H.atoms()[0] == 1.0);
  CHECK(H.weights()[0] == 1.0);
  CHECK(H.moment(1) == doctest::Approx(1.0));
}

TEST_CASE("measure from eigenvalues: scaling invariance") {
  const auto H = measure_from_sigma_eigenvalues({2.0, 2.0, 2.0});
  REQUIRE(H.atoms().size() == 1);
  CHECK(H.atoms()[0] == 1.0);
  CHECK(H.weights()[0] == doctest::Approx(1.0));
}

TEST_CASE("measure from eigenvalues: direct count") {
  const auto H = measure_from_sigma_eigenvalues({1.0, 2.0, 2.0, 4.0});
  REQUIRE(H.atoms().size() == 3);
  CHECK(H.atoms()[0] == doctest::Approx(0.25));
  CHECK(H.atoms()[1] == doctest::Approx(0.5));
  CHECK(H.atoms()[2] == doctest::Approx(1.0));
  CHECK(H.weights()[0] == doctest::Approx(0.25));
  CHECK(H.weights()[1] == doctest::Approx(0.5));
  CHECK(H.weights()[2] == doctest::Approx(0.25));
}

TEST_CASE("measure from eigenvalues: zero atom kept") {
  const auto H = measure_from_sigma_eigenvalues({5.0, 0.0});
  REQUIRE(H.atoms().size() == 2);
  CHECK(H.atoms()[0] == 0.0);
  CHECK(H.atoms()[1] == 1.0);
  CHECK(H.weights()[0] == doctest::Approx(0.5));
}

TEST_CASE("measure from eigenvalues: rejects all-zero input") {
  CHECK_THROWS_AS(measure_from_sigma_eigenvalues({0.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(measure_from_sigma_eigenvalues({}), InvalidInput);
}

TEST_CASE("measure moments stay in [0,1] for support in [0,1]") {
  const auto H = measure_from_sigma_eigenvalues({0.2, 0.7, 1.0, 1.0});
  for (int k = 1; k <= 6; ++k) {
    CHECK(H.moment(k) >= 0.0);
    CHECK(H.moment(k) <= 1.0);
  }
}

TEST_CASE("measure canonicalization merges near-duplicates") {
  const SpectralMeasure H({0.5, 0.5 + 1e-14, 1.0}, {0.3, 0.3, 0.4});
  CHECK(H.atoms().size() == 2);
  CHECK(H.weights()[0] == doctest::Approx(0.6));
}

TEST_CASE("measure invariant violations rejected") {
  CHECK_THROWS_AS(SpectralMeasure({0.5, 1.0}, {0.6, 0.6}), InvalidInput);
  CHECK_THROWS_AS(SpectralMeasure({0.5, 1.0}, {1.0, -0.0}), InvalidInput);
  CHECK_THROWS_AS(SpectralMeasure({0.0}, {1.0}), InvalidInput);  // no mass on R+
}

TEST_CASE("measure JSON round trip") {
  const auto H = measure_from_sigma_eigenvalues({1.0, 2.0, 4.0});
  const auto H2 = SpectralMeasure::from_json(H.to_json());
  REQUIRE(H2.atoms().size() == H.atoms().size());
  for (std::size_t i = 0; i < H.atoms().size(); ++i) {
    CHECK(H2.atoms()[i] == H.atoms()[i]);
    CHECK(H2.weights()[i] == H.weights()[i]);
  }
}

TEST_CASE("moment profile validation") {
  CHECK_NOTHROW(make_moment_profile(1.0, 0.0));
  CHECK_NOTHROW(make_moment_profile(0.0, -1.0));
  CHECK_THROWS_AS(make_moment_profile(0.5, 0.0), InvalidInput);
  CHECK_THROWS_AS(make_moment_profile(1.0, -2.5), InvalidInput);
}

TEST_CASE("scenario classification") {
  CHECK(classify_scenario(make_ratios(100, 100)) == LimitScenario::Comparable);
  CHECK(classify_scenario(make_ratios(5, 1000000)) == LimitScenario::LargeN);
  CHECK(classify_scenario(make_ratios(1000000, 5)) == LimitScenario::LargeP);
}

}  // TEST_SUITE
