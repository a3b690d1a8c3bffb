#include "doctest.h"

#include <cmath>
#include <random>

#include "thermoform/markov.hpp"
#include "thermoform/pressure.hpp"

using namespace thermoform;

namespace {

const double kLog2 = std::log(2.0);
const double kLogGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

MarkovMeasure bernoulli(double p0) {
  Eigen::MatrixXd p(2, 2);
  p << p0, 1.0 - p0, p0, 1.0 - p0;
  return MarkovMeasure::from_transition(fixtures::full2(), p);
}

MarkovMeasure random_measure(const Sft& sft, std::mt19937_64& rng) {
  const RowLogitMap map(sft);
  std::normal_distribution<double> n(0.0, 1.5);
  std::vector<double> x(map.dimension());
  for (double& v : x) v = n(rng);
  return MarkovMeasure::from_transition(sft, map.transition(x));
}

}  // namespace

TEST_CASE("stationary_distribution examples") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const auto a = stationary_distribution(half, fixtures::full2());
  CHECK(a(0) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::MatrixXd flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  const auto b = stationary_distribution(flip, fixtures::cycle2());
  CHECK(b(0) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::MatrixXd skew(2, 2);
  skew << 0.9, 0.1, 0.5, 0.5;
  // Hand solve: 0.1 π0 = 0.5 π1.
  const auto c = stationary_distribution(skew, fixtures::full2());
  CHECK(std::abs(c(0) - 5.0 / 6.0) < 1e-13);
  CHECK(std::abs(c(1) - 1.0 / 6.0) < 1e-13);

  Eigen::MatrixXd absorbing(2, 2);
  absorbing << 1.0, 0.0, 0.5, 0.5;
  try {
    stationary_distribution(absorbing, fixtures::full2());
    FAIL("expected ReducibleSupport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ReducibleSupport);
  }
}

TEST_CASE("MarkovMeasure invariants are enforced") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.5, 1.0, 0.0;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  CHECK_THROWS_AS(MarkovMeasure(fixtures::golden(), bad, pi), Error);  // not stationary
  Eigen::MatrixXd forbidden(2, 2);
  forbidden << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(MarkovMeasure(fixtures::golden(), forbidden, pi), Error);
}

TEST_CASE("entropy examples") {
  CHECK(entropy(bernoulli(0.5)) == doctest::Approx(kLog2).epsilon(1e-14));
  CHECK(entropy(cycle_measure(fixtures::cycle2(), Cycle(fixtures::cycle2(), {0, 1}))) == 0.0);
  const double oracle = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  CHECK(oracle == doctest::Approx(0.5623351).epsilon(1e-7));
  CHECK(entropy(bernoulli(0.25)) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("integrate_potential examples") {
  const Sft full = fixtures::full2();
  const auto phi = Potential::from_symbol_values(full, {1.0, 0.0});
  CHECK(integrate_potential(bernoulli(0.5), phi) == doctest::Approx(0.5));
  CHECK(integrate_potential(bernoulli(0.25), phi) == doctest::Approx(0.25));
  CHECK(integrate_potential(bernoulli(0.3), Potential::constant(full, 2.5)) == doctest::Approx(2.5));
  // Range-2 window probabilities.
  const auto pair = Potential::from_table(full, 2, {{{0, 0}, 1.0}, {{0, 1}, 0.0}, {{1, 0}, 0.0}, {{1, 1}, 0.0}});
  CHECK(integrate_potential(bernoulli(0.25), pair) == doctest::Approx(0.0625));
  const auto other = Potential::from_symbol_values(fixtures::golden(), {1.0, 0.0});
  CHECK_THROWS_AS(integrate_potential(bernoulli(0.5), other), Error);
}

TEST_CASE("cycle_measure") {
  const Sft full = fixtures::full2();
  const auto fixed = cycle_measure(full, Cycle(full, {0}));
  CHECK(fixed.stationary()(0) == 1.0);
  CHECK(entropy(fixed) == 0.0);
  const auto two = cycle_measure(full, Cycle(full, {0, 1}));
  CHECK(two.stationary()(0) == 0.5);
  CHECK(entropy(two) == 0.0);
  CHECK(integrate_potential(two, Potential::from_symbol_values(full, {1.0, 0.0})) == 0.5);
  CHECK_THROWS_AS(cycle_measure(fixtures::golden(), Cycle(full, {1})), Error);
}

TEST_CASE("cycle_measure ratio equals the periodic ratio") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  const Sft k3(3, {{1, 1, 0}, {0, 1, 1}, {1, 1, 1}});
  for (const Sft& sft : {fixtures::full2(), fixtures::golden(), fixtures::cycle2(), k3}) {
    const auto phi = Potential::from_function(sft, 2, [&](std::span<const Symbol>) { return u(rng); });
    const auto psi = Potential::from_function(sft, 2, [&](std::span<const Symbol>) { return pos(rng); });
    for (const auto& c : enumerate_simple_cycles(sft, sft.alphabet_size())) {
      const auto mu = cycle_measure(sft, c);
      const double lhs = integrate_potential(mu, phi) / integrate_potential(mu, psi);
      const double rhs = periodic_birkhoff(phi, c) / periodic_birkhoff(psi, c);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("integration is monotone in the potential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> nonneg(0.0, 1.0);
  for (const Sft& sft : {fixtures::full2(), fixtures::golden(), fixtures::cycle2()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto phi = Potential::from_function(sft, 1, [&](std::span<const Symbol>) { return u(rng); });
      const auto bump = Potential::from_function(sft, 1, [&](std::span<const Symbol>) { return nonneg(rng); });
      const auto mu = random_measure(sft, rng);
      CHECK(integrate_potential(mu, phi) <= integrate_potential(mu, phi + bump) + 1e-15);
    }
  }
}

TEST_CASE("nelder_mead minimizes a quadratic") {
  const auto res = nelder_mead(
      [](const std::vector<double>& x) { return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0); },
      {0.0, 0.0});
  CHECK(res.converged);
  CHECK(res.argmin[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.argmin[1] == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("optimize_markov examples") {
  const Sft full = fixtures::full2();
  const auto ent = optimize_markov(full, [](const MarkovMeasure& m) { return entropy(m); });
  CHECK(std::abs(ent.value - kLog2) <= 1e-6);

  const auto golden = optimize_markov(fixtures::golden(), [](const MarkovMeasure& m) { return entropy(m); });
  CHECK(std::abs(golden.value - kLogGolden) <= 1e-5);

  const auto phi = Potential::from_symbol_values(full, {1.0, 0.0});
  const auto pres =
      optimize_markov(full, [&](const MarkovMeasure& m) { return entropy(m) + integrate_potential(m, phi); });
  CHECK(std::abs(pres.value - std::log(1.0 + std::exp(1.0))) <= 1e-5);

  // Deterministic for a fixed seed.
  const auto again =
      optimize_markov(full, [&](const MarkovMeasure& m) { return entropy(m) + integrate_potential(m, phi); });
  CHECK(again.value == pres.value);
  CHECK(again.measure.transition() == pres.measure.transition());

  CHECK_THROWS_AS(optimize_markov(full, [](const MarkovMeasure&) { return std::nan(""); }), Error);
  CHECK_THROWS_AS(optimize_markov(full, [](const MarkovMeasure& m) { return entropy(m); }, {.restarts = 0}), Error);
}

TEST_CASE("optimize_markov never beats the spectral pressure") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const Sft& sft : {fixtures::full2(), fixtures::golden(), fixtures::cycle2()}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto phi = Potential::from_function(sft, 1, [&](std::span<const Symbol>) { return u(rng); });
      const auto res = optimize_markov(
          sft, [&](const MarkovMeasure& m) { return entropy(m) + integrate_potential(m, phi); },
          {.restarts = 5, .seed = static_cast<std::uint64_t>(trial)});
      const double p = spectral_pressure(sft, phi).value;
      CHECK(res.value <= p + 1e-6);
      CHECK(res.value >= p - 1e-6);
    }
  }
}
