#include "carpetdim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "carpetdim/errors.hpp"

namespace carpetdim {

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points) {
  if (x.size() != y.size()) fail(ErrorKind::DegenerateFit, "x and y differ in length");
  const std::size_t n = x.size();
  if (n < min_points || n < 2)
    fail(ErrorKind::DegenerateFit, "need " + std::to_string(min_points) + " points, got " + std::to_string(n));

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) fail(ErrorKind::DegenerateFit, "x values are all equal");

  SlopeFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (f.slope * x[i] + f.intercept);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  f.r2 = syy > 0 ? std::clamp(1.0 - ss / syy, 0.0, 1.0) : 1.0;
  return f;
}

}  // namespace carpetdim
