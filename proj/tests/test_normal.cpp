#include <catch2/catch_amalgamated.hpp>

#include "sddo/normal.hpp"
#include "sddo/rng.hpp"

using namespace sddo;

TEST_CASE("normal_cdf reference values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THAT(normal_cdf(-1.959964), Catch::Matchers::WithinAbs(0.025, 1e-6));
  CHECK_THAT(normal_cdf(-1.281552), Catch::Matchers::WithinAbs(0.10, 1e-6));
  CHECK_THAT(normal_cdf(1.0), Catch::Matchers::WithinAbs(0.8413447460685429, 1e-12));
}

TEST_CASE("normal_cdf symmetry and monotonicity") {
  RandomStream rs(42, 0, 0);
  for (int i = 0; i < 2000; ++i) {
    const double x = (rs.next_double() - 0.5) * 16.0;
    CHECK_THAT(normal_cdf(-x) + normal_cdf(x), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  double prev = -1.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    const double v = normal_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("normal_cdf saturates in extreme tails") {
  CHECK(normal_cdf(-40.0) == 0.0);
  CHECK(normal_cdf(40.0) == 1.0);
}

TEST_CASE("normal_quantile reference values") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK_THAT(normal_quantile(0.025), Catch::Matchers::WithinAbs(-1.959964, 1e-6));
  CHECK_THAT(normal_quantile(0.9), Catch::Matchers::WithinAbs(1.281552, 1e-6));
  CHECK_THAT(normal_quantile(0.1), Catch::Matchers::WithinAbs(-1.281552, 1e-6));
}

TEST_CASE("normal_quantile domain errors") {
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.7), std::domain_error);
}

TEST_CASE("cdf/quantile round-trip over 1000 probabilities") {
  RandomStream rs(7, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    const double p = lo + (hi - lo) * rs.next_double();
    CHECK_THAT(normal_cdf(normal_quantile(p)), Catch::Matchers::WithinAbs(p, 1e-9));
  }
}
