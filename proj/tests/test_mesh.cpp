#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pqlap/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

using namespace pqlap;

namespace {

void check_invariants(const Mesh& m) {
  for (int e = 0; e < m.num_elements(); ++e) CHECK(m.element_measure(e) > 0.0);
  for (int i = 0; i < m.num_nodes(); ++i) {
    CHECK((m.distance(i) == 0.0) == m.is_boundary(i));
    CHECK(m.distance(i) >= 0.0);
  }
  // d is 1-Lipschitz along edges.
  for (int e = 0; e < m.num_elements(); ++e)
    for (int a = 0; a < m.nodes_per_element(); ++a)
      for (int b = a + 1; b < m.nodes_per_element(); ++b) {
        const int i = m.element_node(e, a), j = m.element_node(e, b);
        CHECK(std::abs(m.distance(i) - m.distance(j)) <= (m.node(i) - m.node(j)).norm() + 1e-14);
      }
}

// Every edge is shared by two triangles, or by one if both ends are on the boundary.
void check_conforming(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (int e = 0; e < m.num_elements(); ++e)
    for (int a = 0; a < 3; ++a) {
      int i = m.element_node(e, a), j = m.element_node(e, (a + 1) % 3);
      if (i > j) std::swap(i, j);
      ++count[{i, j}];
    }
  for (const auto& [edge, c] : count) {
    CHECK(c <= 2);
    if (c == 1) {
      CHECK(m.is_boundary(edge.first));
      CHECK(m.is_boundary(edge.second));
    }
  }
}

}  // namespace

TEST_CASE("interval mesh (0,1,4)") {
  auto m = build_interval_mesh(0.0, 1.0, 4);
  REQUIRE(m->num_nodes() == 5);
  const double expected[] = {0, 0.25, 0.5, 0.75, 1};
  for (int i = 0; i < 5; ++i) CHECK(m->node(i)[0] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(m->is_boundary(0));
  CHECK(m->is_boundary(4));
  for (int i = 1; i < 4; ++i) CHECK_FALSE(m->is_boundary(i));
  CHECK(m->distance(1) == doctest::Approx(0.25));
  CHECK(m->interior_nodes().size() == 3);
  CHECK(m->total_measure() == doctest::Approx(1.0).epsilon(1e-14));
  check_invariants(*m);
}

TEST_CASE("interval mesh distance is min(x-a, b-x)") {
  auto m = build_interval_mesh(-1.0, 3.0, 40);
  for (int i = 0; i < m->num_nodes(); ++i) {
    const double x = m->node(i)[0];
    CHECK(m->distance(i) == doctest::Approx(std::min(x + 1.0, 3.0 - x)).epsilon(1e-12));
  }
  CHECK(m->inradius() == doctest::Approx(2.0));
}

TEST_CASE("interval mesh rejects bad input") {
  CHECK_THROWS_AS(build_interval_mesh(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_interval_mesh(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_interval_mesh(2.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("unit square h=0.5") {
  auto m = build_2d_mesh(Domain2D::unit_square(), 0.5);
  CHECK(m->num_elements() >= 8);
  int corners = 0;
  for (int i = 0; i < m->num_nodes(); ++i) {
    const auto x = m->node(i);
    const bool corner = (x[0] == 0.0 || x[0] == 1.0) && (x[1] == 0.0 || x[1] == 1.0);
    if (corner) {
      ++corners;
      CHECK(m->is_boundary(i));
    }
  }
  CHECK(corners == 4);
  CHECK(m->max_element_diameter() <= 2 * 0.5);
  check_invariants(*m);
  check_conforming(*m);
}

TEST_CASE("unit square distance and area") {
  auto m = build_unit_square_mesh(0.125);
  bool found = false;
  for (int i = 0; i < m->num_nodes(); ++i) {
    const auto x = m->node(i);
    CHECK(m->distance(i) == doctest::Approx(std::min({x[0], x[1], 1 - x[0], 1 - x[1]})).epsilon(1e-14));
    if (std::abs(x[0] - 0.5) < 1e-12 && std::abs(x[1] - 0.25) < 1e-12) {
      found = true;
      CHECK(m->distance(i) == doctest::Approx(0.25));
    }
  }
  CHECK(found);
  CHECK(std::abs(m->total_measure() - 1.0) <= 1e-10);
  CHECK(m->max_element_diameter() <= 2 * 0.125);
  check_invariants(*m);
  check_conforming(*m);
}

TEST_CASE("disk mesh") {
  const double R = 1.5;
  auto m = build_2d_mesh(Domain2D::disk(R), 0.1);
  bool origin = false;
  for (int i = 0; i < m->num_nodes(); ++i) {
    const double r = m->node(i).norm();
    if (m->is_boundary(i)) CHECK(r == doctest::Approx(R).epsilon(1e-13));
    CHECK(m->distance(i) == doctest::Approx(R - r).epsilon(1e-12));
    if (r == 0.0) {
      origin = true;
      CHECK(m->distance(i) == doctest::Approx(R));
    }
  }
  CHECK(origin);
  CHECK(m->max_element_diameter() <= 2 * 0.1);
  // Inscribed polygon area: sum over boundary chords.
  int nb = 0;
  for (int i = 0; i < m->num_nodes(); ++i) nb += m->is_boundary(i);
  const double polygon = 0.5 * nb * R * R * std::sin(2 * std::numbers::pi / nb);
  CHECK(std::abs(m->total_measure() - polygon) <= 1e-10 * polygon);
  check_invariants(*m);
  check_conforming(*m);
}

TEST_CASE("disk area converges to pi R^2") {
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05}) {
    auto m = build_disk_mesh(1.0, h);
    const double err = std::numbers::pi - m->total_measure();
    CHECK(err > 0.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("2D meshes reject nonpositive h") {
  CHECK_THROWS_AS(build_unit_square_mesh(0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_disk_mesh(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("lumped mass sums to the domain measure") {
  for (auto m : {build_interval_mesh(0, 2, 17), build_unit_square_mesh(0.1), build_disk_mesh(1.0, 0.1)}) {
    double s = 0;
    for (int i = 0; i < m->num_nodes(); ++i) s += m->lumped_mass(i);
    CHECK(s == doctest::Approx(m->total_measure()).epsilon(1e-12));
  }
}

TEST_CASE("basis gradients sum to zero per element") {
  auto m = build_disk_mesh(1.0, 0.2);
  for (int e = 0; e < m->num_elements(); ++e) {
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) s += m->basis_gradient(e, a);
    CHECK(s.norm() <= 1e-10);
  }
}

TEST_CASE("mesh constructor rejects inconsistent distance") {
  Eigen::MatrixXd nodes(1, 3);
  nodes << 0, 0.5, 1;
  Eigen::MatrixXi el(2, 2);
  el << 0, 1, 1, 2;
  Eigen::VectorXd d(3);
  d << 0, 0.5, 0.1;
  Eigen::VectorXd c(1);
  c << 0.5;
  CHECK_THROWS(Mesh(DomainKind::Interval, nodes, el, {true, false, true}, d, c));
}

TEST_CASE("mesh csv export") {
  auto m = build_unit_square_mesh(0.5);
  const auto dir = std::filesystem::temp_directory_path() / "pqlap_mesh_csv";
  std::filesystem::create_directories(dir);
  write_mesh_csv(*m, (dir / "sq").string());
  std::ifstream nodes(dir / "sq_nodes.csv"), els(dir / "sq_elements.csv");
  REQUIRE(nodes.good());
  REQUIRE(els.good());
  int lines = 0;
  for (std::string s; std::getline(nodes, s);) ++lines;
  CHECK(lines == m->num_nodes() + 1);
}
