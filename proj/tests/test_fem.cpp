#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ihsim/error.hpp"
#include "ihsim/fem.hpp"
#include "ihsim/geometry.hpp"

using namespace ihsim;

namespace {

Mesh unit_right_triangle() {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Workpiece};
  m.boundary_edges = {{{0, 1}, EdgeTag::Outer}, {{1, 2}, EdgeTag::Outer}, {{2, 0}, EdgeTag::Outer}};
  return m;
}

Mesh sample_mesh() {
  DomainSpec s;
  s.box_max = {1.0, 0.8};
  s.workpiece = {{0.3, 0.2}, {0.7, 0.25}, {0.6, 0.6}, {0.35, 0.5}};
  s.h = 0.08;
  return build_domain(s);
}

double total(const SparseMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return s;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace

TEST_CASE("mass matrix on the unit right triangle") {
  const Mesh m = unit_right_triangle();
  const SparseMatrix mass = assemble_mass(m, CoefficientField::constant(m, 1.0));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = 0.5 / 12.0 * (i == j ? 2.0 : 1.0);
      CHECK(mass.at(i, j) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  const SparseMatrix zero = assemble_mass(m, CoefficientField::constant(m, 0.0));
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("mass entries sum to the coefficient integral and lumping keeps row sums") {
  const Mesh m = sample_mesh();
  CoefficientField c{std::vector<double>(m.num_triangles())};
  double integral = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    c.values[t] = 1.0 + m.centroid(t).x;
    integral += c.values[t] * m.signed_area(t);
  }
  const SparseMatrix mass = assemble_mass(m, c);
  CHECK(std::abs(total(mass) - integral) <= 1e-12);
  const SparseMatrix lumped = assemble_mass(m, c, true);
  const std::vector<double> ones(m.num_vertices(), 1.0);
  const std::vector<double> rc = mass.multiply(ones);
  const std::vector<double> rl = lumped.multiply(ones);
  for (std::size_t i = 0; i < rc.size(); ++i) CHECK(rl[i] == doctest::Approx(rc[i]).epsilon(1e-14));
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    const auto off = lumped.row_offsets();
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      if (static_cast<std::size_t>(lumped.columns()[p]) != i) CHECK(lumped.values()[p] == 0.0);
    }
  }
}

TEST_CASE("stiffness matrix on the unit right triangle") {
  const Mesh m = unit_right_triangle();
  const SparseMatrix k = assemble_stiffness(m, CoefficientField::constant(m, 1.0));
  const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(k.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(assemble_stiffness(m, CoefficientField::constant(m, 0.0)), Error);
}

TEST_CASE("stiffness kernel, linearity and Galerkin consistency") {
  const Mesh m = sample_mesh();
  CoefficientField c{std::vector<double>(m.num_triangles())};
  for (std::size_t t = 0; t < m.num_triangles(); ++t) c.values[t] = 2.0 + std::sin(5.0 * m.centroid(t).y);
  const SparseMatrix k = assemble_stiffness(m, c);
  const std::vector<double> ones(m.num_vertices(), 1.0);
  for (double v : k.multiply(ones)) CHECK(std::abs(v) <= 1e-12);

  CoefficientField c2 = c;
  for (double& v : c2.values) v *= 2.0;
  const SparseMatrix k2 = assemble_stiffness(m, c2);
  for (std::size_t p = 0; p < k.nonzeros(); ++p) CHECK(k2.values()[p] == 2.0 * k.values()[p]);

  // u = 1 + 2x - y, v = 3 - x + 4y: grad u . grad v = -2 - 4 = -6
  std::vector<double> u(m.num_vertices()), v(m.num_vertices());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = 1.0 + 2.0 * m.vertices[i].x - m.vertices[i].y;
    v[i] = 3.0 - m.vertices[i].x + 4.0 * m.vertices[i].y;
  }
  double exact = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) exact += -6.0 * c[t] * m.signed_area(t);
  const std::vector<double> ku = k.multiply(u);
  double vku = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) vku += v[i] * ku[i];
  CHECK(std::abs(vku - exact) <= 1e-12);
  CHECK(k.asymmetry() <= 1e-15);
}

TEST_CASE("assembly is deterministic") {
  const Mesh m = sample_mesh();
  const CoefficientField c = CoefficientField::constant(m, 3.0);
  const SparseMatrix a = assemble_stiffness(m, c);
  const SparseMatrix b = assemble_stiffness(m, c);
  REQUIRE(a.same_pattern(b));
  for (std::size_t p = 0; p < a.nonzeros(); ++p) CHECK(a.values()[p] == b.values()[p]);
  const SparseMatrix ma = assemble_mass(m, c);
  const SparseMatrix mb = assemble_mass(m, c);
  for (std::size_t p = 0; p < ma.nonzeros(); ++p) CHECK(ma.values()[p] == mb.values()[p]);
}

TEST_CASE("Robin edge block and load") {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {3.0, 4.0}, {0.0, 4.0}};
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Workpiece};
  m.boundary_edges = {{{0, 1}, EdgeTag::Outer}, {{1, 2}, EdgeTag::Symmetry}, {{2, 0}, EdgeTag::Symmetry}};
  const RobinSystem r = assemble_robin(m, EdgeTag::Outer, 1.0, 0.0);
  const double len = 5.0;
  CHECK(r.matrix.at(0, 0) == doctest::Approx(2.0 * len / 6.0).epsilon(1e-15));
  CHECK(r.matrix.at(0, 1) == doctest::Approx(len / 6.0).epsilon(1e-15));
  CHECK(r.matrix.at(1, 1) == doctest::Approx(2.0 * len / 6.0).epsilon(1e-15));
  CHECK(r.matrix.at(2, 2) == 0.0);
  for (double v : r.load) CHECK(v == 0.0);

  const Mesh s = sample_mesh();
  double perimeter = 0.0;
  for (const BoundaryEdge& e : s.boundary_edges) {
    if (e.tag != EdgeTag::Outer) continue;
    const Point d = s.vertices[e.v[1]] - s.vertices[e.v[0]];
    perimeter += std::sqrt(dot(d, d));
  }
  const RobinSystem rs = assemble_robin(s, EdgeTag::Outer, 2.0, 7.5);
  double sum = 0.0;
  for (double v : rs.load) sum += v;
  CHECK(std::abs(sum - 7.5 * perimeter) <= 1e-12 * 7.5 * perimeter);
  const RobinSystem lumped = assemble_robin(s, EdgeTag::Outer, 2.0, 7.5, true);
  CHECK(std::abs(total(lumped.matrix) - total(rs.matrix)) <= 1e-12);
}

TEST_CASE("Dirichlet elimination") {
  SUBCASE("everything pinned to zero") {
    const Mesh m = sample_mesh();
    const SparseMatrix k = assemble_stiffness(m, CoefficientField::constant(m, 1.0));
    std::vector<int> nodes(m.num_vertices());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<int>(i);
    const std::vector<double> zeros(nodes.size(), 0.0);
    const LinearSystem sys = apply_dirichlet(k, zeros, nodes, zeros);
    const SolveResult r = solve_spd(sys.matrix, sys.rhs, 1e-12, 100);
    for (double v : r.x) CHECK(v == 0.0);
  }
  SUBCASE("three-node chain") {
    const double dense[9] = {1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0};
    const SparseMatrix k = SparseMatrix::from_dense(3, dense);
    const std::vector<double> rhs(3, 0.0);
    const std::vector<int> nodes{0, 2};
    const std::vector<double> values{0.0, 1.0};
    const LinearSystem sys = apply_dirichlet(k, rhs, nodes, values);
    CHECK(sys.matrix.asymmetry() <= 1e-14);
    const SolveResult r = solve_spd(sys.matrix, sys.rhs, 1e-14, 10);
    CHECK(r.x[0] == 0.0);
    CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.x[2] == 1.0);
  }
  SUBCASE("symmetry is preserved on a mesh") {
    const Mesh m = sample_mesh();
    DirichletConstraints bc(m.num_vertices(), m.tagged_nodes(EdgeTag::Outer));
    const SparseMatrix a = bc.apply_matrix(assemble_stiffness(m, CoefficientField::constant(m, 1.0)));
    CHECK(a.asymmetry() <= 1e-14);
  }
  SUBCASE("conflicting duplicates are rejected") {
    const std::vector<int> nodes{1, 1};
    const std::vector<double> values{0.0, 1.0};
    CHECK_THROWS_AS(DirichletConstraints(3, nodes, values), Error);
  }
}

TEST_CASE("conjugate gradients") {
  SUBCASE("identity") {
    const SparseMatrix id = SparseMatrix::identity(5);
    const std::vector<double> b{1.0, -2.0, 3.0, 0.5, 4.0};
    const SolveResult r = solve_spd(id, b, 1e-14, 10);
    CHECK(r.converged);
    CHECK(r.iterations <= 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-15));
  }
  SUBCASE("zero right-hand side") {
    const Mesh m = sample_mesh();
    const SparseMatrix a = SparseMatrix::combine(1.0, assemble_mass(m, CoefficientField::constant(m, 1.0)), 1.0,
                                                 assemble_stiffness(m, CoefficientField::constant(m, 1.0)));
    const std::vector<double> b(m.num_vertices(), 0.0);
    const SolveResult r = solve_spd(a, b, 1e-12, 100);
    for (double v : r.x) CHECK(v == 0.0);
  }
  SUBCASE("random SPD systems against a dense solve") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 2; n <= 10; ++n) {
      std::vector<double> g(n * n), a(n * n, 0.0), b(n);
      for (double& v : g) v = u(rng);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) a[i * n + j] += g[k * n + i] * g[k * n + j];
        }
        a[i * n + i] += 0.5;
        b[i] = u(rng);
      }
      const SolveResult r = solve_spd(SparseMatrix::from_dense(n, a), b, 1e-15, 10 * n);
      const std::vector<double> x = dense_solve(a, b);
      for (int i = 0; i < n; ++i) CHECK(std::abs(r.x[i] - x[i]) <= 1e-10);
    }
  }
  SUBCASE("non-finite input is rejected") {
    const SparseMatrix id = SparseMatrix::identity(2);
    const std::vector<double> b{1.0, std::nan("")};
    CHECK_THROWS_AS(solve_spd(id, b, 1e-12, 10), Error);
  }
}
