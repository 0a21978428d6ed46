#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlsgs/errors.hpp"
#include "nlsgs/mesh.hpp"

namespace nlsgs {

namespace {

constexpr const char *kArcTag = "truncation-arc";

void expect_header(std::istream &in, const std::string &word, std::size_t &count)
{
  std::string got;
  if (!(in >> got >> count) || got != word)
  {
    throw InvalidInput("mesh file: expected '" + word + " <count>'");
  }
}

}  // namespace

void write_mesh(std::ostream &out, const TriMesh &mesh)
{
  out << std::setprecision(17);
  out << "nodes " << mesh.node_count() << '\n';
  for (const auto &p : mesh.nodes())
  {
    out << p.x << ' ' << p.y << '\n';
  }
  out << "triangles " << mesh.triangle_count() << '\n';
  for (const auto &t : mesh.triangles())
  {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  out << "boundary " << mesh.boundary_edges().size() << '\n';
  for (const auto &e : mesh.boundary_edges())
  {
    out << e.a << ' ' << e.b << ' ';
    if (e.tag == kTruncationArc)
    {
      out << kArcTag;
    }
    else
    {
      out << e.tag;
    }
    out << '\n';
  }
}

TriMesh read_mesh(std::istream &in)
{
  std::size_t n = 0;
  expect_header(in, "nodes", n);
  std::vector<Point2> nodes(n);
  for (auto &p : nodes)
  {
    if (!(in >> p.x >> p.y))
    {
      throw InvalidInput("mesh file: truncated node list");
    }
  }
  std::size_t m = 0;
  expect_header(in, "triangles", m);
  std::vector<Triangle> tris(m);
  for (auto &t : tris)
  {
    if (!(in >> t[0] >> t[1] >> t[2]))
    {
      throw InvalidInput("mesh file: truncated triangle list");
    }
  }
  std::size_t b = 0;
  expect_header(in, "boundary", b);
  std::vector<BoundaryEdge> boundary(b);
  for (auto &e : boundary)
  {
    std::string tag;
    if (!(in >> e.a >> e.b >> tag))
    {
      throw InvalidInput("mesh file: truncated boundary list");
    }
    if (tag == kArcTag)
    {
      e.tag = kTruncationArc;
    }
    else
    {
      try
      {
        e.tag = std::stoi(tag);
      }
      catch (const std::exception &)
      {
        throw InvalidInput("mesh file: bad boundary tag '" + tag + "'");
      }
    }
  }
  return TriMesh(std::move(nodes), std::move(tris), std::move(boundary));
}

void save_mesh(const std::string &path, const TriMesh &mesh)
{
  std::ofstream out(path);
  if (!out)
  {
    throw InvalidInput("cannot write mesh file '" + path + "'");
  }
  write_mesh(out, mesh);
}

TriMesh load_mesh(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidInput("cannot open mesh file '" + path + "'");
  }
  return read_mesh(in);
}

}  // namespace nlsgs
