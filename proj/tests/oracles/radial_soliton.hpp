#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

struct RadialResult
{
  double f0 = 0.0;
  double mass = 0.0;
};

/// P1 elements on [0, R] with weight r for the radial reduced action
///   J(f) = 2 pi int (f'^2 / 2 + f^2 / 2 - |f|^p / p) r dr.
/// Nehari-projected fixed-point descent followed by Newton polishing.
class RadialSoliton
{
public:
  RadialSoliton(double p, double radius, int elements)
    : p_(p), n_(elements), h_(radius / elements), kd_(elements + 1), ko_(elements),
      md_(elements + 1), mo_(elements)
  {
    for (int e = 0; e < n_; ++e)
    {
      const double a = e * h_;
      const double b = a + h_;
      const double k = (a + b) / (2.0 * h_);
      kd_[e] += k;
      kd_[e + 1] += k;
      ko_[e] -= k;
      for (int q = 0; q < 4; ++q)
      {
        const double s = 0.5 * (1.0 + kX[q]);
        const double w = 0.5 * h_ * kW[q] * (a + s * h_);
        md_[e] += w * (1 - s) * (1 - s);
        md_[e + 1] += w * s * s;
        mo_[e] += w * s * (1 - s);
      }
    }
  }

  RadialResult solve() const
  {
    std::vector<double> f(n_ + 1);
    for (int i = 0; i <= n_; ++i)
    {
      const double r = i * h_;
      f[i] = std::exp(-0.25 * r * r);
    }
    project(f);
    for (int it = 0; it < 300; ++it)
    {
      f = thomas(plus(kd_, md_), plus(ko_, mo_), load(f));
      project(f);
    }
    for (int it = 0; it < 50; ++it)
    {
      std::vector<double> jd;
      std::vector<double> jo;
      jacobian(f, jd, jo);
      auto g = apply(plus(kd_, md_), plus(ko_, mo_), f);
      const auto nl = load(f);
      double big = 0.0;
      for (int i = 0; i <= n_; ++i)
      {
        g[i] -= nl[i];
      }
      const auto d = thomas(jd, jo, g);
      for (int i = 0; i <= n_; ++i)
      {
        f[i] -= d[i];
        big = std::max(big, std::abs(d[i]));
      }
      if (big < 1e-14)
      {
        break;
      }
    }
    const auto mf = apply(md_, mo_, f);
    double m = 0.0;
    for (int i = 0; i <= n_; ++i)
    {
      m += f[i] * mf[i];
    }
    return {f[0], 2.0 * std::numbers::pi * m};
  }

private:
  static constexpr std::array<double, 4> kX{-0.8611363115940526, -0.3399810435848563,
                                            0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> kW{0.3478548451374538, 0.6521451548625461,
                                            0.6521451548625461, 0.3478548451374538};

  static std::vector<double> plus(const std::vector<double> &a, const std::vector<double> &b)
  {
    std::vector<double> c(a);
    for (std::size_t i = 0; i < c.size(); ++i)
    {
      c[i] += b[i];
    }
    return c;
  }

  std::vector<double> apply(const std::vector<double> &d, const std::vector<double> &o,
                            const std::vector<double> &x) const
  {
    std::vector<double> y(n_ + 1);
    for (int i = 0; i <= n_; ++i)
    {
      y[i] = d[i] * x[i];
      if (i > 0)
      {
        y[i] += o[i - 1] * x[i - 1];
      }
      if (i < n_)
      {
        y[i] += o[i] * x[i + 1];
      }
    }
    return y;
  }

  /// Tridiagonal elimination without pivoting.
  std::vector<double> thomas(std::vector<double> d, const std::vector<double> &o,
                             std::vector<double> b) const
  {
    for (int i = 1; i <= n_; ++i)
    {
      const double m = o[i - 1] / d[i - 1];
      d[i] -= m * o[i - 1];
      b[i] -= m * b[i - 1];
    }
    if (d[n_] == 0.0)
    {
      throw std::runtime_error("radial oracle: singular tridiagonal system");
    }
    std::vector<double> x(n_ + 1);
    x[n_] = b[n_] / d[n_];
    for (int i = n_ - 1; i >= 0; --i)
    {
      x[i] = (b[i] - o[i] * x[i + 1]) / d[i];
    }
    return x;
  }

  template<class Fn>
  void each_point(const std::vector<double> &f, Fn &&fn) const
  {
    for (int e = 0; e < n_; ++e)
    {
      const double a = e * h_;
      for (int q = 0; q < 4; ++q)
      {
        const double s = 0.5 * (1.0 + kX[q]);
        const double w = 0.5 * h_ * kW[q] * (a + s * h_);
        const double v = (1 - s) * f[e] + s * f[e + 1];
        fn(e, s, w, v);
      }
    }
  }

  std::vector<double> load(const std::vector<double> &f) const
  {
    std::vector<double> out(n_ + 1, 0.0);
    each_point(f, [&](int e, double s, double w, double v) {
      const double g = std::pow(std::abs(v), p_ - 2.0) * v * w;
      out[e] += g * (1 - s);
      out[e + 1] += g * s;
    });
    return out;
  }

  double lp(const std::vector<double> &f) const
  {
    double total = 0.0;
    each_point(f, [&](int, double, double w, double v) { total += w * std::pow(std::abs(v), p_); });
    return total;
  }

  void jacobian(const std::vector<double> &f, std::vector<double> &d, std::vector<double> &o) const
  {
    d = plus(kd_, md_);
    o = plus(ko_, mo_);
    each_point(f, [&](int e, double s, double w, double v) {
      const double g = (p_ - 1.0) * std::pow(std::abs(v), p_ - 2.0) * w;
      d[e] -= g * (1 - s) * (1 - s);
      d[e + 1] -= g * s * s;
      o[e] -= g * s * (1 - s);
    });
  }

  void project(std::vector<double> &f) const
  {
    const auto pf = apply(plus(kd_, md_), plus(ko_, mo_), f);
    double q = 0.0;
    for (int i = 0; i <= n_; ++i)
    {
      q += f[i] * pf[i];
    }
    const double sigma = std::pow(q / lp(f), 1.0 / (p_ - 2.0));
    for (auto &v : f)
    {
      v *= sigma;
    }
  }

  double p_;
  int n_;
  double h_;
  std::vector<double> kd_, ko_, md_, mo_;
};

/// Richardson extrapolation of the O(h^2) radial FEM values from n and 2n elements.
inline RadialResult radial_soliton(double p = 4.0, double radius = 25.0, int elements = 1000)
{
  const auto c = RadialSoliton(p, radius, elements).solve();
  const auto f = RadialSoliton(p, radius, 2 * elements).solve();
  return {(4.0 * f.f0 - c.f0) / 3.0, (4.0 * f.mass - c.mass) / 3.0};
}

}  // namespace oracle
