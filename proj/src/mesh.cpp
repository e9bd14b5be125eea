#include "pqlap/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

namespace pqlap {

Mesh::Mesh(DomainKind kind, Eigen::MatrixXd nodes, Eigen::MatrixXi elements,
           std::vector<bool> boundary, Eigen::VectorXd distance,
           Eigen::VectorXd center)
    : kind_(kind),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      distance_(std::move(distance)),
      center_(std::move(center)) {
  const int d = dim();
  if (d != 1 && d != 2) throw std::invalid_argument("mesh: only 1D and 2D meshes are supported");
  if (elements_.rows() != d + 1) throw std::invalid_argument("mesh: element arity does not match dimension");
  if (static_cast<int>(boundary_.size()) != num_nodes() || distance_.size() != num_nodes())
    throw std::invalid_argument("mesh: per-node arrays have wrong length");

  const int ne = num_elements();
  const int npe = nodes_per_element();
  measure_.resize(ne);
  basis_grad_.resize(d, static_cast<Eigen::Index>(ne) * npe);
  lumped_mass_ = Eigen::VectorXd::Zero(num_nodes());

  for (int e = 0; e < ne; ++e) {
    if (d == 1) {
      const double h = nodes_(0, elements_(1, e)) - nodes_(0, elements_(0, e));
      if (!(h > 0.0)) throw std::invalid_argument("mesh: element with nonpositive length");
      measure_[e] = h;
      basis_grad_(0, e * npe + 0) = -1.0 / h;
      basis_grad_(0, e * npe + 1) = 1.0 / h;
      max_diameter_ = std::max(max_diameter_, h);
    } else {
      const Eigen::Vector2d p0 = nodes_.col(elements_(0, e));
      const Eigen::Vector2d p1 = nodes_.col(elements_(1, e));
      const Eigen::Vector2d p2 = nodes_.col(elements_(2, e));
      Eigen::Matrix2d jac;
      jac.col(0) = p1 - p0;
      jac.col(1) = p2 - p0;
      const double det = jac.determinant();
      if (!(det > 0.0)) throw std::invalid_argument("mesh: element with nonpositive area");
      measure_[e] = 0.5 * det;
      const Eigen::Matrix2d inv_t = jac.inverse().transpose();
      const Eigen::Vector2d g1 = inv_t.col(0);
      const Eigen::Vector2d g2 = inv_t.col(1);
      basis_grad_.col(e * npe + 0) = -(g1 + g2);
      basis_grad_.col(e * npe + 1) = g1;
      basis_grad_.col(e * npe + 2) = g2;
      const double diam = std::max({(p1 - p0).norm(), (p2 - p0).norm(), (p2 - p1).norm()});
      max_diameter_ = std::max(max_diameter_, diam);
    }
    for (int k = 0; k < npe; ++k) lumped_mass_[elements_(k, e)] += measure_[e] / npe;
  }

  dof_.assign(num_nodes(), -1);
  for (int i = 0; i < num_nodes(); ++i) {
    const bool on_boundary = boundary_[i];
    if (on_boundary != (distance_[i] == 0.0))
      throw std::invalid_argument("mesh: distance must vanish exactly on boundary nodes");
    if (!on_boundary) {
      dof_[i] = static_cast<int>(interior_.size());
      interior_.push_back(i);
    }
  }
  if (interior_.empty()) throw std::invalid_argument("mesh: no interior nodes");
}

double Mesh::circumradius() const {
  return (nodes_.colwise() - center_).colwise().norm().maxCoeff();
}

MeshPtr build_interval_mesh(double a, double b, int n) {
  if (!(a < b)) throw std::invalid_argument("interval mesh: need a < b");
  if (n < 2) throw std::invalid_argument("interval mesh: need n >= 2 subintervals");

  Eigen::MatrixXd nodes(1, n + 1);
  Eigen::VectorXd dist(n + 1);
  std::vector<bool> boundary(n + 1, false);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = (i == n) ? b : a + i * h;
    nodes(0, i) = x;
    dist[i] = std::min(x - a, b - x);
  }
  boundary.front() = boundary.back() = true;
  dist[0] = dist[n] = 0.0;

  Eigen::MatrixXi elems(2, n);
  for (int e = 0; e < n; ++e) elems.col(e) << e, e + 1;

  Eigen::VectorXd center(1);
  center << 0.5 * (a + b);
  return std::make_shared<const Mesh>(DomainKind::Interval, std::move(nodes), std::move(elems),
                                      std::move(boundary), std::move(dist), std::move(center));
}

MeshPtr build_unit_square_mesh(double h_target) {
  if (!(h_target > 0.0)) throw std::invalid_argument("square mesh: h_target must be positive");
  if (!(h_target < std::sqrt(2.0))) throw std::invalid_argument("square mesh: h_target exceeds the domain diameter");
  const int m = std::max(1, static_cast<int>(std::ceil(1.0 / h_target - 1e-12)));
  const int side = m + 1;
  const int nn = side * side;

  Eigen::MatrixXd nodes(2, nn);
  Eigen::VectorXd dist(nn);
  std::vector<bool> boundary(nn, false);
  auto id = [side](int i, int j) { return j * side + i; };
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      const double x = static_cast<double>(i) / m;
      const double y = static_cast<double>(j) / m;
      const int k = id(i, j);
      nodes.col(k) << x, y;
      const bool on_b = i == 0 || j == 0 || i == m || j == m;
      boundary[k] = on_b;
      dist[k] = on_b ? 0.0 : std::min({x, 1.0 - x, y, 1.0 - y});
    }
  }

  Eigen::MatrixXi elems(3, 2 * m * m);
  int e = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      elems.col(e++) << id(i, j), id(i + 1, j), id(i + 1, j + 1);
      elems.col(e++) << id(i, j), id(i + 1, j + 1), id(i, j + 1);
    }
  }

  Eigen::VectorXd center(2);
  center << 0.5, 0.5;
  return std::make_shared<const Mesh>(DomainKind::UnitSquare, std::move(nodes), std::move(elems),
                                      std::move(boundary), std::move(dist), std::move(center));
}

namespace {

void push_triangle(std::vector<Eigen::Vector3i>& tris, const Eigen::MatrixXd& nodes, int a, int b, int c) {
  const Eigen::Vector2d pa = nodes.col(a), pb = nodes.col(b), pc = nodes.col(c);
  const double cross = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
  if (cross > 0.0)
    tris.emplace_back(a, b, c);
  else
    tris.emplace_back(a, c, b);
}

}  // namespace

MeshPtr build_disk_mesh(double radius, double h_target) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk mesh: radius must be positive");
  if (!(h_target > 0.0)) throw std::invalid_argument("disk mesh: h_target must be positive");
  if (!(h_target < 2.0 * radius)) throw std::invalid_argument("disk mesh: h_target exceeds the domain diameter");

  // Ring k sits at radius k*dr and carries 6k equally spaced nodes.
  const int rings = std::max(1, static_cast<int>(std::ceil(radius / h_target - 1e-12)));
  const double dr = radius / rings;
  std::vector<int> ring_start(rings + 2, 0);
  ring_start[1] = 1;
  for (int k = 1; k <= rings; ++k) ring_start[k + 1] = ring_start[k] + 6 * k;
  const int nn = ring_start[rings + 1];

  Eigen::MatrixXd nodes(2, nn);
  Eigen::VectorXd dist(nn);
  std::vector<bool> boundary(nn, false);
  nodes.col(0).setZero();
  dist[0] = radius;
  for (int k = 1; k <= rings; ++k) {
    const int count = 6 * k;
    const double r = (k == rings) ? radius : k * dr;
    for (int j = 0; j < count; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / count;
      const int id = ring_start[k] + j;
      nodes.col(id) << r * std::cos(theta), r * std::sin(theta);
      boundary[id] = (k == rings);
      dist[id] = (k == rings) ? 0.0 : radius - nodes.col(id).norm();
    }
  }

  std::vector<Eigen::Vector3i> tris;
  tris.reserve(6 * rings * rings);
  for (int j = 0; j < 6; ++j) push_triangle(tris, nodes, 0, 1 + j, 1 + (j + 1) % 6);

  for (int k = 1; k < rings; ++k) {
    // Zip ring k (inner) with ring k+1 (outer) by advancing along whichever
    // ring has the smaller next angle.
    const int na = 6 * k, nb = 6 * (k + 1);
    const int sa = ring_start[k], sb = ring_start[k + 1];
    int i = 0, j = 0;
    while (i < na || j < nb) {
      const double next_a = (i < na) ? static_cast<double>(i + 1) / na : 2.0;
      const double next_b = (j < nb) ? static_cast<double>(j + 1) / nb : 2.0;
      if (next_a < next_b) {
        push_triangle(tris, nodes, sa + i, sa + (i + 1) % na, sb + j % nb);
        ++i;
      } else {
        push_triangle(tris, nodes, sa + i % na, sb + j, sb + (j + 1) % nb);
        ++j;
      }
    }
  }

  Eigen::MatrixXi elems(3, static_cast<Eigen::Index>(tris.size()));
  for (std::size_t e = 0; e < tris.size(); ++e) elems.col(static_cast<Eigen::Index>(e)) = tris[e];

  Eigen::VectorXd center = Eigen::VectorXd::Zero(2);
  return std::make_shared<const Mesh>(DomainKind::Disk, std::move(nodes), std::move(elems),
                                      std::move(boundary), std::move(dist), std::move(center));
}

MeshPtr build_2d_mesh(const Domain2D& shape, double h_target) {
  switch (shape.kind) {
    case DomainKind::UnitSquare:
      return build_unit_square_mesh(h_target);
    case DomainKind::Disk:
      return build_disk_mesh(shape.radius, h_target);
    case DomainKind::Interval:
      break;
  }
  throw std::invalid_argument("build_2d_mesh: shape must be unit_square or disk");
}

void write_mesh_csv(const Mesh& mesh, const std::string& prefix) {
  std::ofstream nodes_out(prefix + "_nodes.csv");
  std::ofstream elems_out(prefix + "_elements.csv");
  if (!nodes_out || !elems_out) throw std::runtime_error("cannot open mesh CSV files at " + prefix);
  nodes_out << std::setprecision(17);
  nodes_out << (mesh.dim() == 1 ? "id,x,boundary,distance\n" : "id,x,y,boundary,distance\n");
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    nodes_out << i;
    for (int c = 0; c < mesh.dim(); ++c) nodes_out << ',' << mesh.nodes()(c, i);
    nodes_out << ',' << (mesh.is_boundary(i) ? 1 : 0) << ',' << mesh.distance(i) << '\n';
  }
  elems_out << (mesh.dim() == 1 ? "id,n0,n1\n" : "id,n0,n1,n2\n");
  for (int e = 0; e < mesh.num_elements(); ++e) {
    elems_out << e;
    for (int k = 0; k < mesh.nodes_per_element(); ++k) elems_out << ',' << mesh.element_node(e, k);
    elems_out << '\n';
  }
}

}  // namespace pqlap
