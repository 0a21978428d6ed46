#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlsgs/linalg.hpp"
#include "nlsgs/mesh.hpp"

namespace nlsgs {

/// Symmetric quadrature rule on the reference triangle in barycentric
/// coordinates; weights sum to one.
struct Quadrature
{
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  /// 7-point rule exact for polynomials of degree 5.
  static Quadrature degree5();
};

SparseSym assemble_stiffness(const TriMesh &mesh);
SparseSym assemble_mass(const TriMesh &mesh, bool lumped);

/// P1 space over a fixed mesh: owns the mesh and the assembled operators
/// every functional needs.
class FemSpace
{
public:
  explicit FemSpace(std::shared_ptr<const TriMesh> mesh);
  static std::shared_ptr<const FemSpace> create(TriMesh mesh);

  const TriMesh &mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const noexcept { return mesh_; }
  std::size_t size() const noexcept { return mesh_->node_count(); }

  const SparseSym &stiffness() const noexcept { return stiffness_; }
  const SparseSym &mass() const noexcept { return mass_; }
  const std::vector<double> &lumped_mass() const noexcept { return lumped_; }
  const Quadrature &quadrature() const noexcept { return quad_; }
  double area() const noexcept { return area_; }

  /// stiffness + shift * mass, on the shared pattern.
  SparseSym shifted(double shift) const { return SparseSym::combine(1.0, stiffness_, shift, mass_); }

private:
  std::shared_ptr<const TriMesh> mesh_;
  SparseSym stiffness_;
  SparseSym mass_;
  std::vector<double> lumped_;
  Quadrature quad_;
  double area_ = 0.0;
};

/// Nodal coefficient vector of a P1 function.
class Field
{
public:
  Field() = default;
  Field(std::shared_ptr<const FemSpace> space, std::vector<double> values);
  static Field zeros(std::shared_ptr<const FemSpace> space);
  static Field constant(std::shared_ptr<const FemSpace> space, double c);

  const FemSpace &space() const { return *space_; }
  const std::shared_ptr<const FemSpace> &space_ptr() const noexcept { return space_; }
  const TriMesh &mesh() const { return space_->mesh(); }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> &mutable_values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  Field scaled(double s) const;
  bool finite() const;

private:
  std::shared_ptr<const FemSpace> space_;
  std::vector<double> values_;
};

void require_exponent(double p);

/// int |u|^p over the mesh, 7-point rule per triangle.
double lp_integral(const Field &u, double p, const Quadrature &quad);
double lp_integral(const Field &u, double p);

/// u^T M u (consistent mass).
double mass(const Field &u);
/// u^T S u = ||grad u||^2.
double dirichlet(const Field &u);

/// The three integrals every functional here is built from.
struct FieldTerms
{
  double dirichlet = 0.0;
  double mass = 0.0;
  double lp = 0.0;
};
FieldTerms field_terms(const Field &u, double p);

/// E_p(u) = 1/2 ||grad u||^2 - 1/p ||u||_p^p
double energy(const Field &u, double p);
/// J_p(u, lambda) = E_p(u) + lambda/2 ||u||_2^2
double action(const Field &u, double lambda, double p);
/// (||u||_p^p - ||grad u||^2) / ||u||_2^2; throws ZeroMass.
double lambda_of(const Field &u, double p);

/// N(u)_i = int |u|^{p-2} u phi_i
std::vector<double> nonlinear_load(const Field &u, double p);
/// S u - N(u)
std::vector<double> grad_energy(const Field &u, double p);
/// S u + lambda M u - N(u)
std::vector<double> grad_action(const Field &u, double lambda, double p);

/// sqrt(r^T diag(lumped)^-1 r)
double dual_norm(const FemSpace &space, std::span<const double> r);

/// Euler-Lagrange residual ||S u + lambda_u M u - N(u)|| in the lumped M^-1 norm.
double euler_lagrange_residual(const Field &u, double p);

/// ||u||_p^p / (||u||_2^2 ||u||_{H^1}^{p-2}); the discrete Gagliardo-Nirenberg ratio.
double gn_ratio(const Field &u, double p);

void write_field(std::ostream &out, const Field &u);
std::vector<double> read_field_values(std::istream &in);
void save_field(const std::string &path, const Field &u);

}  // namespace nlsgs
