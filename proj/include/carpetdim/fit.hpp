#pragma once

#include <cstddef>
#include <vector>

namespace carpetdim {

// Ordinary least squares y = slope * x + intercept.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;        // clamped to [0, 1]; 1 when y has no spread
  double residual = 0.0;  // root mean square of the residuals
  std::size_t points = 0;
};

// Throws DegenerateFit with fewer than min_points points or no spread in x.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points = 3);

}  // namespace carpetdim
