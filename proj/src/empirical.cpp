#include "homdyn/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "homdyn/errors.hpp"
#include "homdyn/linalg.hpp"

namespace homdyn {

namespace {

double period_of(MetricSpace s) {
  switch (s) {
    case MetricSpace::kCircle:
      return 2.0 * kPi;
    case MetricSpace::kProjective:
      return kPi;
    case MetricSpace::kLine:
      break;
  }
  return 0.0;
}

struct Weighted {
  double value;
  double weight;
};

std::vector<Weighted> sorted_points(const EmpiricalMeasure& m) {
  std::vector<Weighted> pts(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) pts[i] = {m.values()[i], m.weight(i)};
  std::sort(pts.begin(), pts.end(), [](const Weighted& a, const Weighted& b) { return a.value < b.value; });
  return pts;
}

// Piecewise-constant difference F - G between consecutive breakpoints.
struct Segment {
  double length;
  double diff;
};

std::vector<Segment> cdf_difference(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double lo, double hi) {
  const auto pa = sorted_points(a);
  const auto pb = sorted_points(b);
  std::vector<Segment> segs;
  segs.reserve(pa.size() + pb.size() + 1);
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, x = lo;
  while (i < pa.size() || j < pb.size()) {
    const double next = (j >= pb.size() || (i < pa.size() && pa[i].value <= pb[j].value)) ? pa[i].value : pb[j].value;
    if (next > x) segs.push_back({next - x, fa - fb});
    x = std::max(x, next);
    while (i < pa.size() && pa[i].value == next) fa += pa[i++].weight;
    while (j < pb.size() && pb[j].value == next) fb += pb[j++].weight;
  }
  if (hi > x) segs.push_back({hi - x, fa - fb});
  return segs;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(MetricSpace space, std::vector<double> values, std::vector<double> weights)
    : space_(space), values_(std::move(values)), weights_(std::move(weights)) {
  if (!weights_.empty()) {
    if (weights_.size() != values_.size()) throw PreconditionError("EmpiricalMeasure: weight count mismatch");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw PreconditionError("EmpiricalMeasure: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw PreconditionError("EmpiricalMeasure: zero total weight");
    for (double& w : weights_) w /= total;
  }
  const double p = period_of(space_);
  if (p > 0.0) {
    for (double& v : values_) {
      v = std::fmod(v, p);
      if (v < 0.0) v += p;
      if (v >= p) v -= p;
    }
  }
}

double EmpiricalMeasure::weight(std::size_t i) const {
  return weights_.empty() ? 1.0 / static_cast<double>(values_.size()) : weights_[i];
}

double EmpiricalMeasure::period() const { return period_of(space_); }

double EmpiricalMeasure::wasserstein1(const EmpiricalMeasure& other) const {
  if (other.space_ != space_) throw PreconditionError("wasserstein1: measures live on different spaces");
  if (size() == 0 || other.size() == 0) throw PreconditionError("wasserstein1: empty measure");
  const double p = period();
  if (p == 0.0) {
    const double lo = std::min(*std::min_element(values_.begin(), values_.end()),
                               *std::min_element(other.values_.begin(), other.values_.end()));
    double total = 0.0;
    for (const auto& s : cdf_difference(*this, other, lo, lo)) total += s.length * std::abs(s.diff);
    return total;
  }
  auto segs = cdf_difference(*this, other, 0.0, p);
  // The optimal shift is a weighted median of F - G with respect to length.
  auto order = segs;
  std::sort(order.begin(), order.end(), [](const Segment& a, const Segment& b) { return a.diff < b.diff; });
  double acc = 0.0, shift = 0.0;
  for (const auto& s : order) {
    acc += s.length;
    if (acc >= 0.5 * p) {
      shift = s.diff;
      break;
    }
  }
  double total = 0.0;
  for (const auto& s : segs) total += s.length * std::abs(s.diff - shift);
  return total;
}

double EmpiricalMeasure::ks_distance(const EmpiricalMeasure& other) const {
  if (other.space_ != space_) throw PreconditionError("ks_distance: measures live on different spaces");
  if (size() == 0 || other.size() == 0) throw PreconditionError("ks_distance: empty measure");
  double lo = 0.0;
  if (space_ == MetricSpace::kLine) {
    lo = std::min(*std::min_element(values_.begin(), values_.end()),
                  *std::min_element(other.values_.begin(), other.values_.end()));
  }
  double best = 0.0;
  for (const auto& s : cdf_difference(*this, other, lo, lo)) best = std::max(best, std::abs(s.diff));
  // The final jump leaves F - G = 0, so the last plateau is covered above.
  return best;
}

double EmpiricalMeasure::quantile(double p) const {
  if (values_.empty()) throw PreconditionError("quantile: empty measure");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile: p must lie in [0, 1]");
  std::vector<std::size_t> order(values_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weight(i);
    if (cumulative >= p) return values_[i];
  }
  return values_[order.back()];
}

std::vector<double> EmpiricalMeasure::quantile_table(std::size_t points) const {
  if (points < 2) throw PreconditionError("quantile_table: need at least two points");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) out[i] = quantile(static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

double EmpiricalMeasure::integrate(const std::function<double(double)>& f) const {
  std::vector<double> terms(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) terms[i] = weight(i) * f(values_[i]);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

EmpiricalMeasure EmpiricalMeasure::map(const std::function<double(double)>& f, MetricSpace target) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), f);
  return EmpiricalMeasure(target, std::move(out), weights_);
}

void EmpiricalMeasure::write_csv(std::ostream& out) const {
  out << "value,weight\n";
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) out << values_[i] << ',' << weight(i) << '\n';
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace homdyn
