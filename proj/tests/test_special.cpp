#include "blockorder/special.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace blockorder;

TEST_CASE("digamma matches known values", "[special]") {
  constexpr double euler = 0.57721566490153286061;
  REQUIRE(digamma(1.0) == Catch::Approx(-euler).margin(1e-13));
  REQUIRE(digamma(0.5) == Catch::Approx(-euler - 2.0 * std::log(2.0)).margin(1e-13));
  REQUIRE(digamma(2.0) == Catch::Approx(1.0 - euler).margin(1e-13));
  // recurrence psi(x+1) = psi(x) + 1/x across a grid
  for (double x = 0.25; x < 30.0; x += 0.37)
    REQUIRE(digamma(x + 1.0) == Catch::Approx(digamma(x) + 1.0 / x).margin(1e-12));
  REQUIRE_THROWS_AS(digamma(0.0), std::invalid_argument);
}

TEST_CASE("log-sum-exp accumulator agrees with direct evaluation", "[special]") {
  const std::vector<double> xs{-700.0, -1.5, 0.0, 3.2, -2.7, 10.0, 9.999};
  LogSumExpAcc acc;
  double direct = 0.0;
  for (double x : xs) acc.add(x);
  const double mx = 10.0;
  for (double x : xs) direct += std::exp(x - mx);
  REQUIRE(acc.value() == Catch::Approx(mx + std::log(direct)).margin(1e-12));
  REQUIRE(acc.count() == xs.size());

  LogSumExpAcc huge;  // overflow-safe far outside double exp range
  huge.add(-30000.0);
  huge.add(-30001.0);
  REQUIRE(std::isfinite(huge.value()));
  REQUIRE(huge.value() == Catch::Approx(-30000.0 + std::log1p(std::exp(-1.0))).margin(1e-12));
}

TEST_CASE("gamma tables reproduce direct lgamma evaluation", "[special]") {
  GammaTables t(50);
  for (long long j = 1; j <= 50; ++j) {
    REQUIRE(t.lg_int(j) == Catch::Approx(std::lgamma(static_cast<double>(j))).margin(1e-13));
    REQUIRE(t.lg_half(j) == Catch::Approx(std::lgamma(j + 0.5)).margin(1e-13));
  }
  // single Bernoulli cell with one pair: mass 1/2 for either outcome
  REQUIRE(t.kt_beta_term(0, 1) == Catch::Approx(std::log(0.5)).margin(1e-13));
  REQUIRE(t.kt_beta_term(1, 1) == Catch::Approx(std::log(0.5)).margin(1e-13));
  REQUIRE(t.kt_beta_term(0, 0) == 0.0);
  // Dirichlet-multinomial of a single observation is uniform over k cells
  const std::vector<long long> one_obs{1, 0};
  REQUIRE(t.kt_dirichlet_term(one_obs, 2) == Catch::Approx(std::log(0.5)).margin(1e-13));
  const std::vector<long long> empty{0, 0, 0};
  REQUIRE(t.kt_dirichlet_term(empty, 3) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("wilson interval brackets the point estimate", "[special]") {
  const auto wi = wilson_interval(18, 20);
  REQUIRE(wi.lo < 0.9);
  REQUIRE(wi.hi > 0.9);
  REQUIRE(wi.lo > 0.65);
  REQUIRE(wi.hi <= 1.0);
  const auto degenerate = wilson_interval(0, 0);
  REQUIRE(degenerate.lo == 0.0);
  REQUIRE(degenerate.hi == 1.0);
}

namespace {

// independent quadrature oracle: with p = sin^2(theta) the Beta integrand
// becomes the smooth 2 sin^{2o}(t) cos^{2(m-o)}(t) on [0, pi/2]
double beta_ratio_by_quadrature(long long o, long long m) {
  const int steps = 20000;  // Simpson
  const double h = 1.5707963267948966 / steps;
  auto f = [&](double t) {
    return 2.0 * std::pow(std::sin(t), 2.0 * static_cast<double>(o)) *
           std::pow(std::cos(t), 2.0 * static_cast<double>(m - o));
  };
  double acc = f(0.0) + f(1.5707963267948966);
  for (int i = 1; i < steps; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0 / 3.14159265358979323846;
}

}  // namespace

TEST_CASE("beta mass agrees with direct quadrature", "[special]") {
  GammaTables t(40);
  for (auto [o, m] : std::vector<std::pair<long long, long long>>{
           {0, 1}, {1, 1}, {2, 5}, {0, 7}, {7, 7}, {13, 30}, {4, 12}}) {
    REQUIRE(std::exp(t.kt_beta_term(o, m)) ==
            Catch::Approx(beta_ratio_by_quadrature(o, m)).epsilon(1e-9));
  }
}
