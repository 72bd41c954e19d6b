#ifndef HOMDYN_PARALLEL_HPP_
#define HOMDYN_PARALLEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <functional>

namespace homdyn {

// Worker count: HOMDYN_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
unsigned thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() threads. Each
// index is handled exactly once; results must be written to per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Pairwise summation over a fixed binary tree: the result depends only on
// the values and their order, never on scheduling.
double pairwise_sum(std::span<const double> values);

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Sample mean and standard error (sample standard deviation / sqrt(count)).
MeanAndError mean_and_error(std::span<const double> values);

}  // namespace homdyn

#endif  // HOMDYN_PARALLEL_HPP_
