#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ihsim/geometry.hpp"

namespace ihsim {

/// Compressed-row sparse matrix. Column indices are sorted and unique per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Pattern from explicit rows; values zero-initialised.
  SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<int> columns);

  /// Vertex-adjacency pattern of a P1 mesh (diagonal included).
  static SparseMatrix pattern(const Mesh& mesh);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(std::size_t n, std::span<const double> row_major);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return cols_.size(); }
  std::span<const std::size_t> row_offsets() const { return offsets_; }
  std::span<const int> columns() const { return cols_; }
  std::span<const double> values() const { return vals_; }
  std::span<double> values() { return vals_; }

  /// Entry (i, j); zero when outside the pattern.
  double at(std::size_t i, std::size_t j) const;
  /// Adds v to entry (i, j); the entry must be in the pattern.
  void add(std::size_t i, std::size_t j, double v);
  std::vector<double> diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// this * a + other * b over an identical pattern.
  static SparseMatrix combine(double a, const SparseMatrix& x, double b, const SparseMatrix& y);
  bool same_pattern(const SparseMatrix& other) const;
  /// max |A_ij - A_ji|
  double asymmetry() const;

 private:
  long find(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// One value per vertex.
using NodalField = std::vector<double>;

/// One value per triangle (piecewise constant).
struct CoefficientField {
  std::vector<double> values;

  static CoefficientField constant(const Mesh& mesh, double c) {
    return {std::vector<double>(mesh.num_triangles(), c)};
  }
  double operator[](std::size_t t) const { return values[t]; }
  std::size_t size() const { return values.size(); }
};

/// Gradients of the three P1 basis functions on triangle t (constant per element).
std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t t);

/// M_ij = sum_T c_T int_T phi_i phi_j. With `lumped`, row sums on the diagonal.
SparseMatrix assemble_mass(const Mesh& mesh, const CoefficientField& c, bool lumped = false);

/// K_ij = sum_T c_T int_T grad phi_i . grad phi_j. Throws on c <= 0.
SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& c);

/// Load vector int c phi_i for piecewise-constant c.
std::vector<double> assemble_load(const Mesh& mesh, const CoefficientField& c);

struct RobinSystem {
  SparseMatrix matrix;
  std::vector<double> load;
};

/// eta * int_edge phi_i phi_j over edges tagged `tag`, and load int_edge g phi_i
/// (two-point Gauss per edge, exact for affine g). With `lumped`, the edge
/// mass goes to the diagonal.
RobinSystem assemble_robin(const Mesh& mesh, EdgeTag tag, double eta,
                           const std::function<double(Point)>& g, bool lumped = false);
RobinSystem assemble_robin(const Mesh& mesh, EdgeTag tag, double eta, double g, bool lumped = false);

/// Symmetric elimination of Dirichlet constraints. Keeps the original
/// coupling columns so that right-hand sides can be corrected per solve.
class DirichletConstraints {
 public:
  DirichletConstraints() = default;
  /// Throws on out-of-range nodes or duplicate nodes with conflicting values.
  DirichletConstraints(std::size_t n, std::span<const int> nodes, std::span<const double> values);
  DirichletConstraints(std::size_t n, std::span<const int> nodes, double value = 0.0);

  /// Rows and columns of constrained nodes zeroed, unit diagonal. Records the
  /// removed column entries for `apply_rhs`.
  SparseMatrix apply_matrix(const SparseMatrix& a);
  /// rhs_j -= A_jc * value_c for unconstrained j, rhs_c = value_c.
  void apply_rhs(std::span<double> rhs) const;
  /// Sets constrained entries of x to their values.
  void impose(std::span<double> x) const;

  bool constrained(std::size_t i) const { return mask_.empty() ? false : mask_[i] != 0; }
  const std::vector<int>& nodes() const { return nodes_; }

 private:
  std::vector<int> nodes_;
  std::vector<double> values_;
  std::vector<char> mask_;
  std::vector<double> node_value_;
  struct Coupling {
    int row;
    int col;
    double a;
  };
  std::vector<Coupling> couplings_;
  bool all_zero_ = true;
};

struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// One-shot form of DirichletConstraints for a single system.
LinearSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs,
                             std::span<const int> nodes, std::span<const double> values);

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients. Returns the best iterate and a
/// convergence flag when maxit is exhausted; throws on non-finite input.
SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, double tol, int maxit,
                      std::span<const double> x0 = {});

}  // namespace ihsim
