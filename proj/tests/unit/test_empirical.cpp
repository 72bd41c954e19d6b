#include <doctest.h>

#include <sstream>

#include "homdyn/empirical.hpp"
#include "homdyn/errors.hpp"
#include "homdyn/linalg.hpp"

using namespace homdyn;

TEST_CASE("wasserstein-1 on the line") {
  const EmpiricalMeasure a(MetricSpace::kLine, {0.0, 1.0});
  const EmpiricalMeasure b(MetricSpace::kLine, {0.5, 1.5});
  CHECK(a.wasserstein1(b) == doctest::Approx(0.5));
  CHECK(a.wasserstein1(a) == 0.0);
  const EmpiricalMeasure weighted(MetricSpace::kLine, {0.0, 1.0}, {0.25, 0.75});
  CHECK(weighted.wasserstein1(EmpiricalMeasure(MetricSpace::kLine, {1.0})) == doctest::Approx(0.25));
}

TEST_CASE("wasserstein-1 on the circle uses the shorter way round") {
  const EmpiricalMeasure a(MetricSpace::kCircle, {0.1});
  const EmpiricalMeasure b(MetricSpace::kCircle, {2.0 * kPi - 0.1});
  CHECK(a.wasserstein1(b) == doctest::Approx(0.2));
  std::vector<double> grid, shifted;
  for (int i = 0; i < 100; ++i) {
    grid.push_back(2.0 * kPi * i / 100.0);
    shifted.push_back(2.0 * kPi * i / 100.0 + 0.01);
  }
  CHECK(EmpiricalMeasure(MetricSpace::kCircle, grid).wasserstein1(EmpiricalMeasure(MetricSpace::kCircle, shifted)) ==
        doctest::Approx(0.01));
}

TEST_CASE("periodic values are wrapped") {
  const EmpiricalMeasure a(MetricSpace::kProjective, {-0.5, kPi + 0.25});
  CHECK(a.values()[0] == doctest::Approx(kPi - 0.5));
  CHECK(a.values()[1] == doctest::Approx(0.25));
  CHECK(a.period() == doctest::Approx(kPi));
}

TEST_CASE("kolmogorov-smirnov distance") {
  CHECK(ks_statistic({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_statistic({0.0, 1.0}, {2.0, 3.0}) == 1.0);
  CHECK(ks_statistic({0.0, 1.0, 2.0, 3.0}, {1.5}) == doctest::Approx(0.5));
  const EmpiricalMeasure a(MetricSpace::kLine, {0.0, 1.0, 2.0, 3.0});
  CHECK(a.ks_distance(EmpiricalMeasure(MetricSpace::kLine, {1.5})) == doctest::Approx(0.5));
}

TEST_CASE("quantiles and integrals") {
  const EmpiricalMeasure a(MetricSpace::kLine, {3.0, 1.0, 2.0, 4.0});
  CHECK(a.quantile(0.0) == 1.0);
  CHECK(a.quantile(0.5) == 2.0);
  CHECK(a.quantile(1.0) == 4.0);
  CHECK(a.quantile_table(5).size() == 5);
  CHECK(a.integrate([](double x) { return x; }) == doctest::Approx(2.5));
  CHECK_THROWS_AS(a.quantile(1.5), PreconditionError);
  CHECK_THROWS_AS(EmpiricalMeasure().quantile(0.5), PreconditionError);
}

TEST_CASE("weights are validated and normalized") {
  CHECK_THROWS_AS(EmpiricalMeasure(MetricSpace::kLine, {0.0, 1.0}, {0.5}), PreconditionError);
  CHECK_THROWS_AS(EmpiricalMeasure(MetricSpace::kLine, {0.0, 1.0}, {0.5, -0.1}), PreconditionError);
  const EmpiricalMeasure a(MetricSpace::kLine, {0.0, 1.0}, {1.0, 3.0});
  CHECK(a.weight(0) == doctest::Approx(0.25));
  CHECK(a.weight(0) + a.weight(1) == doctest::Approx(1.0));
}

TEST_CASE("csv output") {
  std::ostringstream out;
  EmpiricalMeasure(MetricSpace::kLine, {1.0, 2.0}).write_csv(out);
  const std::string text = out.str();
  CHECK(text.rfind("value,weight\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
