#ifndef HOMDYN_EMPIRICAL_HPP_
#define HOMDYN_EMPIRICAL_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace homdyn {

enum class MetricSpace {
  kLine,        // real line
  kCircle,      // angles mod 2*pi
  kProjective,  // angles mod pi
};

// Weighted point cloud on the line, the circle or the projective line.
//
// Values on the circle/projective line are angles reduced to [0, period).
// An empty weight vector means equal weights, which keeps large Monte Carlo
// samples compact.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  EmpiricalMeasure(MetricSpace space, std::vector<double> values, std::vector<double> weights = {});

  MetricSpace space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double weight(std::size_t i) const;
  // Circumference for periodic spaces, 0 on the line.
  double period() const;

  // Wasserstein-1 distance. On periodic spaces this is the circle transport
  // cost min_c int |F - G - c|.
  double wasserstein1(const EmpiricalMeasure& other) const;
  // Kolmogorov-Smirnov distance sup |F - G| in the [0, period) chart.
  double ks_distance(const EmpiricalMeasure& other) const;

  // Smallest value whose cumulative weight reaches p, in the [0, period)
  // chart; p = 0 gives the minimum.
  double quantile(double p) const;
  // quantile(i / (points - 1)) for i = 0, ..., points - 1.
  std::vector<double> quantile_table(std::size_t points = 101) const;
  double integrate(const std::function<double(double)>& f) const;
  EmpiricalMeasure map(const std::function<double(double)>& f, MetricSpace target) const;

  // One "value,weight" row per sample, with a header line.
  void write_csv(std::ostream& out) const;

 private:
  MetricSpace space_ = MetricSpace::kLine;
  std::vector<double> values_;
  std::vector<double> weights_;
};

// Two-sample Kolmogorov-Smirnov statistic for equally weighted samples.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace homdyn

#endif  // HOMDYN_EMPIRICAL_HPP_
