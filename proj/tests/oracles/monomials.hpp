#pragma once

#include <array>
#include <cmath>

namespace oracle {

inline double factorial(int k)
{
  double f = 1.0;
  for (int i = 2; i <= k; ++i)
  {
    f *= i;
  }
  return f;
}

/// int_T x^a y^b over the reference triangle (0,0), (1,0), (0,1).
inline double reference_monomial(int a, int b)
{
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

/// int_T (c0 + c1 x + c2 y)^k over the reference triangle, by multinomial expansion.
inline double reference_linear_power(double c0, double c1, double c2, int k)
{
  double total = 0.0;
  for (int i = 0; i <= k; ++i)
  {
    for (int j = 0; i + j <= k; ++j)
    {
      const int l = k - i - j;
      const double coef = factorial(k) / (factorial(i) * factorial(j) * factorial(l));
      total += coef * std::pow(c0, l) * std::pow(c1, i) * std::pow(c2, j) *
               reference_monomial(i, j);
    }
  }
  return total;
}

/// int_T u^k for the linear u with vertex values v over a triangle of area `area`:
/// the affine map to the reference triangle has Jacobian 2 * area.
inline double triangle_linear_power(std::array<double, 3> v, double area, int k)
{
  return 2.0 * area * reference_linear_power(v[0], v[1] - v[0], v[2] - v[0], k);
}

}  // namespace oracle
