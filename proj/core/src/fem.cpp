#include "nlsgs/fem.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

struct ElementGeometry
{
  double area;
  std::array<Point2, 3> grad;  // gradients of the barycentric coordinates
};

ElementGeometry element_geometry(const TriMesh &mesh, std::size_t t)
{
  const auto &tri = mesh.triangles()[t];
  const Point2 a = mesh.nodes()[tri[0]];
  const Point2 b = mesh.nodes()[tri[1]];
  const Point2 c = mesh.nodes()[tri[2]];
  const double twice = orient(a, b, c);
  if (!(twice > 0.0))
  {
    throw DegenerateTriangle("triangle " + std::to_string(t) + " has non-positive area");
  }
  ElementGeometry g;
  g.area = 0.5 * twice;
  g.grad[0] = {(b.y - c.y) / twice, (c.x - b.x) / twice};
  g.grad[1] = {(c.y - a.y) / twice, (a.x - c.x) / twice};
  g.grad[2] = {(a.y - b.y) / twice, (b.x - a.x) / twice};
  return g;
}

/// |u|^{p-2} u
inline double power_term(double u, double p)
{
  if (p == 4.0)
  {
    return u * u * u;
  }
  if (p == 3.0)
  {
    return std::abs(u) * u;
  }
  return std::pow(std::abs(u), p - 2.0) * u;
}

/// |u|^p
inline double power_abs(double u, double p)
{
  if (p == 4.0)
  {
    const double u2 = u * u;
    return u2 * u2;
  }
  if (p == 3.0)
  {
    return std::abs(u) * u * u;
  }
  return std::pow(std::abs(u), p);
}

}  // namespace

Quadrature Quadrature::degree5()
{
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0;
  const double b1 = (9.0 + 2.0 * s15) / 21.0;
  const double a2 = (6.0 + s15) / 21.0;
  const double b2 = (9.0 - 2.0 * s15) / 21.0;
  const double w1 = (155.0 - s15) / 1200.0;
  const double w2 = (155.0 + s15) / 1200.0;
  Quadrature q;
  q.degree = 5;
  q.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
              {b2, a2, a2},                {a2, b2, a2}, {a2, a2, b2}};
  q.weights = {9.0 / 40, w1, w1, w1, w2, w2, w2};
  return q;
}

SparseSym assemble_stiffness(const TriMesh &mesh)
{
  std::vector<Triplet> t;
  t.reserve(9 * mesh.triangle_count());
  for (std::size_t e = 0; e < mesh.triangle_count(); ++e)
  {
    const auto g = element_geometry(mesh, e);
    const auto &tri = mesh.triangles()[e];
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        t.push_back({tri[i], tri[j], g.area * dot(g.grad[i], g.grad[j])});
      }
    }
  }
  return SparseSym(mesh.node_count(), std::move(t));
}

SparseSym assemble_mass(const TriMesh &mesh, bool lumped)
{
  std::vector<Triplet> t;
  t.reserve(9 * mesh.triangle_count());
  for (std::size_t e = 0; e < mesh.triangle_count(); ++e)
  {
    const double area = element_geometry(mesh, e).area;
    const auto &tri = mesh.triangles()[e];
    for (int i = 0; i < 3; ++i)
    {
      if (lumped)
      {
        t.push_back({tri[i], tri[i], area / 3.0});
        continue;
      }
      for (int j = 0; j < 3; ++j)
      {
        t.push_back({tri[i], tri[j], i == j ? area / 6.0 : area / 12.0});
      }
    }
  }
  return SparseSym(mesh.node_count(), std::move(t));
}

FemSpace::FemSpace(std::shared_ptr<const TriMesh> mesh)
  : mesh_(std::move(mesh)),
    stiffness_(assemble_stiffness(*mesh_)),
    mass_(assemble_mass(*mesh_, false)),
    lumped_(mass_.row_sums()),
    quad_(Quadrature::degree5()),
    area_(mesh_->area())
{
}

std::shared_ptr<const FemSpace> FemSpace::create(TriMesh mesh)
{
  return std::make_shared<const FemSpace>(std::make_shared<const TriMesh>(std::move(mesh)));
}

Field::Field(std::shared_ptr<const FemSpace> space, std::vector<double> values)
  : space_(std::move(space)), values_(std::move(values))
{
  if (!space_)
  {
    throw InvalidInput("field needs a finite-element space");
  }
  if (values_.size() != space_->size())
  {
    throw DimensionMismatch("field length does not match the mesh node count");
  }
}

Field Field::zeros(std::shared_ptr<const FemSpace> space)
{
  const std::size_t n = space->size();
  return Field(std::move(space), std::vector<double>(n, 0.0));
}

Field Field::constant(std::shared_ptr<const FemSpace> space, double c)
{
  const std::size_t n = space->size();
  return Field(std::move(space), std::vector<double>(n, c));
}

Field Field::scaled(double s) const
{
  std::vector<double> v(values_);
  for (auto &x : v)
  {
    x *= s;
  }
  return Field(space_, std::move(v));
}

bool Field::finite() const
{
  for (const double v : values_)
  {
    if (!std::isfinite(v))
    {
      return false;
    }
  }
  return true;
}

void require_exponent(double p)
{
  if (!(p > 2.0 && p <= 4.0))
  {
    throw InvalidInput("exponent p must lie in (2, 4]");
  }
}

double lp_integral(const Field &u, double p, const Quadrature &quad)
{
  require_exponent(p);
  const auto &mesh = u.mesh();
  const auto vals = u.values();
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.triangle_count(); ++e)
  {
    const auto &tri = mesh.triangles()[e];
    const double u0 = vals[tri[0]];
    const double u1 = vals[tri[1]];
    const double u2 = vals[tri[2]];
    double s = 0.0;
    for (std::size_t q = 0; q < quad.weights.size(); ++q)
    {
      const auto &b = quad.points[q];
      s += quad.weights[q] * power_abs(b[0] * u0 + b[1] * u1 + b[2] * u2, p);
    }
    total += mesh.triangle_area(e) * s;
  }
  return total;
}

double lp_integral(const Field &u, double p) { return lp_integral(u, p, u.space().quadrature()); }

double mass(const Field &u) { return u.space().mass().quadratic_form(u.values()); }

double dirichlet(const Field &u) { return u.space().stiffness().quadratic_form(u.values()); }

FieldTerms field_terms(const Field &u, double p)
{
  return {dirichlet(u), mass(u), lp_integral(u, p)};
}

double energy(const Field &u, double p)
{
  require_exponent(p);
  return 0.5 * dirichlet(u) - lp_integral(u, p) / p;
}

double action(const Field &u, double lambda, double p)
{
  const auto t = field_terms(u, p);
  return 0.5 * t.dirichlet + 0.5 * lambda * t.mass - t.lp / p;
}

double lambda_of(const Field &u, double p)
{
  const auto t = field_terms(u, p);
  if (!(t.mass > 0.0))
  {
    throw ZeroMass("lambda_of: field has zero mass");
  }
  return (t.lp - t.dirichlet) / t.mass;
}

std::vector<double> nonlinear_load(const Field &u, double p)
{
  require_exponent(p);
  const auto &mesh = u.mesh();
  const auto &quad = u.space().quadrature();
  const auto vals = u.values();
  std::vector<double> load(vals.size(), 0.0);
  for (std::size_t e = 0; e < mesh.triangle_count(); ++e)
  {
    const auto &tri = mesh.triangles()[e];
    const double u0 = vals[tri[0]];
    const double u1 = vals[tri[1]];
    const double u2 = vals[tri[2]];
    double l0 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    for (std::size_t q = 0; q < quad.weights.size(); ++q)
    {
      const auto &b = quad.points[q];
      const double f = quad.weights[q] * power_term(b[0] * u0 + b[1] * u1 + b[2] * u2, p);
      l0 += f * b[0];
      l1 += f * b[1];
      l2 += f * b[2];
    }
    const double area = mesh.triangle_area(e);
    load[tri[0]] += area * l0;
    load[tri[1]] += area * l1;
    load[tri[2]] += area * l2;
  }
  return load;
}

std::vector<double> grad_energy(const Field &u, double p)
{
  auto g = matvec(u.space().stiffness(), u.values());
  const auto n = nonlinear_load(u, p);
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    g[i] -= n[i];
  }
  return g;
}

std::vector<double> grad_action(const Field &u, double lambda, double p)
{
  auto g = grad_energy(u, p);
  const auto mu = matvec(u.space().mass(), u.values());
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    g[i] += lambda * mu[i];
  }
  return g;
}

double dual_norm(const FemSpace &space, std::span<const double> r)
{
  const auto &lumped = space.lumped_mass();
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    s += r[i] * r[i] / lumped[i];
  }
  return std::sqrt(s);
}

double euler_lagrange_residual(const Field &u, double p)
{
  const double lambda = lambda_of(u, p);
  return dual_norm(u.space(), grad_action(u, lambda, p));
}

double gn_ratio(const Field &u, double p)
{
  const auto t = field_terms(u, p);
  const double h1 = t.dirichlet + t.mass;
  return t.lp / (t.mass * std::pow(h1, 0.5 * (p - 2.0)));
}

void write_field(std::ostream &out, const Field &u)
{
  out << std::setprecision(17) << "field " << u.size() << '\n';
  for (const double v : u.values())
  {
    out << v << '\n';
  }
}

std::vector<double> read_field_values(std::istream &in)
{
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != "field")
  {
    throw InvalidInput("field file: expected 'field <count>'");
  }
  std::vector<double> v(n);
  for (auto &x : v)
  {
    if (!(in >> x))
    {
      throw InvalidInput("field file: truncated values");
    }
  }
  return v;
}

void save_field(const std::string &path, const Field &u)
{
  std::ofstream out(path);
  if (!out)
  {
    throw InvalidInput("cannot write field file '" + path + "'");
  }
  write_field(out, u);
}

}  // namespace nlsgs
