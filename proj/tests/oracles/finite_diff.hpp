#pragma once

#include <cstddef>
#include <vector>

namespace oracle {

/// (f(x + h d) - f(x - h d)) / (2 h)
template<class F>
double central_directional(F &&f, const std::vector<double> &x, const std::vector<double> &d,
                           double h)
{
  std::vector<double> xp(x);
  std::vector<double> xm(x);
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    xp[i] += h * d[i];
    xm[i] -= h * d[i];
  }
  return (f(xp) - f(xm)) / (2.0 * h);
}

/// (-f(x + 2h d) + 8 f(x + h d) - 8 f(x - h d) + f(x - 2h d)) / (12 h), exact for quintics.
template<class F>
double five_point_directional(F &&f, const std::vector<double> &x, const std::vector<double> &d,
                              double h)
{
  auto at = [&](double t) {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      y[i] += t * d[i];
    }
    return f(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

}  // namespace oracle
