#ifndef HOMDYN_LINALG_HPP_
#define HOMDYN_LINALG_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace homdyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

// A finite sequence of 2x2 matrices, read left to right as drawn from a walk.
using Word = std::vector<Matrix2>;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Rescales `m` by a power of two so that its largest entry lies in [0.5, 1)
// and returns the exponent removed. Power-of-two scaling is exact, so
// accumulated logarithms do not pick up rounding from the renormalization.
template <typename Derived>
int renormalize_pow2(Eigen::MatrixBase<Derived>& m) {
  const double peak = m.cwiseAbs().maxCoeff();
  if (peak == 0.0 || !std::isfinite(peak)) return 0;
  int exponent = 0;
  std::frexp(peak, &exponent);
  m *= std::ldexp(1.0, -exponent);
  return exponent;
}

inline double log_two() { return 0.69314718055994530942; }

// Unit vector at angle `theta` on the circle.
inline Vector2 unit_at(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Angle of `v` in [0, 2*pi).
double circle_angle(const Vector2& v);

// Angle of the line through `v` in [0, pi).
double projective_angle(const Vector2& v);

// Distance between angles on a circle of circumference `period`.
double arc_distance(double a, double b, double period);

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace homdyn

#endif  // HOMDYN_LINALG_HPP_
