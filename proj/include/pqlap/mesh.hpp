#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace pqlap {

enum class DomainKind { Interval, UnitSquare, Disk };

/// Simplicial mesh of an interval, the unit square or a disk.
///
/// Nodes are stored column-wise (dim x n_nodes), elements as columns of node
/// indices ((dim+1) x n_elements). Geometry that the assembly loops need
/// (element measures, basis-function gradients, lumped nodal mass) is
/// precomputed at construction; the mesh is immutable afterwards.
class Mesh {
public:
  Mesh(DomainKind kind, Eigen::MatrixXd nodes, Eigen::MatrixXi elements,
       std::vector<bool> boundary, Eigen::VectorXd distance,
       Eigen::VectorXd center);

  DomainKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(nodes_.rows()); }
  int num_nodes() const { return static_cast<int>(nodes_.cols()); }
  int num_elements() const { return static_cast<int>(elements_.cols()); }
  int nodes_per_element() const { return dim() + 1; }

  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const Eigen::MatrixXi& elements() const { return elements_; }
  auto node(int i) const { return nodes_.col(i); }
  int element_node(int e, int k) const { return elements_(k, e); }

  bool is_boundary(int i) const { return boundary_[i]; }
  const std::vector<bool>& boundary_flags() const { return boundary_; }

  /// Distance to the boundary of the generated geometry (analytic, not the
  /// polygonal approximation).
  double distance(int i) const { return distance_[i]; }
  const Eigen::VectorXd& distances() const { return distance_; }

  double element_measure(int e) const { return measure_[e]; }
  const Eigen::VectorXd& element_measures() const { return measure_; }

  /// Gradient of the k-th local hat function on element e (length dim).
  auto basis_gradient(int e, int k) const {
    return basis_grad_.col(e * nodes_per_element() + k);
  }

  double lumped_mass(int i) const { return lumped_mass_[i]; }
  const Eigen::VectorXd& lumped_masses() const { return lumped_mass_; }

  // Interior (free) nodes in increasing node order, and the inverse map.
  const std::vector<int>& interior_nodes() const { return interior_; }
  int num_interior() const { return static_cast<int>(interior_.size()); }
  /// Interior index of node i, or -1 on the boundary.
  int dof(int i) const { return dof_[i]; }

  double max_element_diameter() const { return max_diameter_; }
  double total_measure() const { return measure_.sum(); }

  /// Centroid of the generated geometry.
  const Eigen::VectorXd& center() const { return center_; }
  /// Largest node distance from the centroid.
  double circumradius() const;
  /// Largest boundary distance over the nodes.
  double inradius() const { return distance_.maxCoeff(); }

private:
  DomainKind kind_;
  Eigen::MatrixXd nodes_;
  Eigen::MatrixXi elements_;
  std::vector<bool> boundary_;
  Eigen::VectorXd distance_;
  Eigen::VectorXd center_;

  Eigen::VectorXd measure_;
  Eigen::MatrixXd basis_grad_;
  Eigen::VectorXd lumped_mass_;
  std::vector<int> interior_;
  std::vector<int> dof_;
  double max_diameter_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// n equal subintervals of [a, b].
MeshPtr build_interval_mesh(double a, double b, int n);

/// Structured right-triangle mesh of [0,1]^2 with ceil(1/h) cells per side.
MeshPtr build_unit_square_mesh(double h_target);

/// Concentric-ring triangulation of the disk of radius R about the origin.
/// Boundary nodes lie on |x| = R.
MeshPtr build_disk_mesh(double radius, double h_target);

struct Domain2D {
  DomainKind kind = DomainKind::UnitSquare;
  double radius = 1.0;  // disks only

  static Domain2D unit_square() { return {DomainKind::UnitSquare, 1.0}; }
  static Domain2D disk(double r) { return {DomainKind::Disk, r}; }
};

MeshPtr build_2d_mesh(const Domain2D& shape, double h_target);

/// Writes `<prefix>_nodes.csv` (id,x[,y],boundary,distance) and
/// `<prefix>_elements.csv` (id,n0,n1[,n2]).
void write_mesh_csv(const Mesh& mesh, const std::string& prefix);

}  // namespace pqlap
