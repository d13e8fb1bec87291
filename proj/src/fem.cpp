#include "ihsim/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ihsim/error.hpp"

namespace ihsim {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<int> columns)
    : n_(n), offsets_(std::move(row_offsets)), cols_(std::move(columns)), vals_(cols_.size(), 0.0) {
  if (offsets_.size() != n_ + 1 || offsets_.back() != cols_.size()) {
    fail(ErrorKind::InvalidArgument, "inconsistent CSR row offsets");
  }
}

SparseMatrix SparseMatrix::pattern(const Mesh& mesh) {
  const std::size_t n = mesh.num_vertices();
  std::vector<std::vector<int>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].push_back(static_cast<int>(i));
  for (const Triangle& tr : mesh.triangles) {
    for (int a : tr) {
      for (int b : tr) {
        if (a != b) rows[a].push_back(b);
      }
    }
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<int> cols;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    cols.insert(cols.end(), r.begin(), r.end());
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(n, std::move(offsets), std::move(cols));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<int> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = static_cast<int>(i);
  }
  SparseMatrix m(n, std::move(offsets), std::move(cols));
  std::fill(m.vals_.begin(), m.vals_.end(), 1.0);
  return m;
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, std::span<const double> a) {
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i * n + j] != 0.0 || i == j) {
        cols.push_back(static_cast<int>(j));
        vals.push_back(a[i * n + j]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  SparseMatrix m(n, std::move(offsets), std::move(cols));
  m.vals_ = std::move(vals);
  return m;
}

long SparseMatrix::find(std::size_t i, std::size_t j) const {
  const auto begin = cols_.begin() + static_cast<long>(offsets_[i]);
  const auto end = cols_.begin() + static_cast<long>(offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return -1;
  return it - cols_.begin();
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const long k = find(i, j);
  return k < 0 ? 0.0 : vals_[static_cast<std::size_t>(k)];
}

void SparseMatrix::add(std::size_t i, std::size_t j, double v) {
  const long k = find(i, j);
  if (k < 0) fail(ErrorKind::InvalidArgument, "entry outside the sparsity pattern");
  vals_[static_cast<std::size_t>(k)] += v;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return n_ == other.n_ && offsets_ == other.offsets_ && cols_ == other.cols_;
}

SparseMatrix SparseMatrix::combine(double a, const SparseMatrix& x, double b, const SparseMatrix& y) {
  if (!x.same_pattern(y)) fail(ErrorKind::InvalidArgument, "sparsity patterns differ");
  SparseMatrix out = x;
  for (std::size_t k = 0; k < out.vals_.size(); ++k) out.vals_[k] = a * x.vals_[k] + b * y.vals_[k];
  return out;
}

double SparseMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      worst = std::max(worst, std::abs(vals_[k] - at(static_cast<std::size_t>(cols_[k]), i)));
    }
  }
  return worst;
}

std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t t) {
  const Triangle& tr = mesh.triangles[t];
  const Point a = mesh.vertices[tr[0]];
  const Point b = mesh.vertices[tr[1]];
  const Point c = mesh.vertices[tr[2]];
  const double twice_area = cross(b - a, c - a);
  // grad phi_i = rot90(opposite edge) / (2 area)
  return {Point{(b.y - c.y) / twice_area, (c.x - b.x) / twice_area},
          Point{(c.y - a.y) / twice_area, (a.x - c.x) / twice_area},
          Point{(a.y - b.y) / twice_area, (b.x - a.x) / twice_area}};
}

namespace {

void check_coefficient(const Mesh& mesh, const CoefficientField& c) {
  if (c.size() != mesh.num_triangles()) {
    fail(ErrorKind::InvalidArgument, "coefficient field length differs from triangle count");
  }
  for (double v : c.values) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
  }
}

}  // namespace

SparseMatrix assemble_mass(const Mesh& mesh, const CoefficientField& c, bool lumped) {
  check_coefficient(mesh, c);
  SparseMatrix m = SparseMatrix::pattern(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double w = c[t] * mesh.signed_area(t) / 12.0;
    const Triangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (lumped) {
        m.add(tr[i], tr[i], 4.0 * w);
        continue;
      }
      for (int j = 0; j < 3; ++j) m.add(tr[i], tr[j], i == j ? 2.0 * w : w);
    }
  }
  return m;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& c) {
  check_coefficient(mesh, c);
  for (double v : c.values) {
    if (!(v > 0.0)) fail(ErrorKind::InvalidArgument, "stiffness coefficient must be positive");
  }
  SparseMatrix k = SparseMatrix::pattern(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = basis_gradients(mesh, t);
    const double w = c[t] * mesh.signed_area(t);
    const Triangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) k.add(tr[i], tr[j], w * dot(g[i], g[j]));
    }
  }
  return k;
}

std::vector<double> assemble_load(const Mesh& mesh, const CoefficientField& c) {
  check_coefficient(mesh, c);
  std::vector<double> b(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (c[t] == 0.0) continue;
    const double w = c[t] * mesh.signed_area(t) / 3.0;
    for (int v : mesh.triangles[t]) b[v] += w;
  }
  return b;
}

RobinSystem assemble_robin(const Mesh& mesh, EdgeTag tag, double eta,
                           const std::function<double(Point)>& g, bool lumped) {
  if (!(eta >= 0.0)) fail(ErrorKind::InvalidArgument, "Robin coefficient must be nonnegative");
  if (!mesh.has_tag(tag)) {
    fail(ErrorKind::InvalidArgument, std::string("no edges tagged ") + to_string(tag));
  }
  RobinSystem out{SparseMatrix::pattern(mesh), std::vector<double>(mesh.num_vertices(), 0.0)};
  const double gp = 0.5 / std::sqrt(3.0);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    const int a = e.v[0];
    const int b = e.v[1];
    const Point pa = mesh.vertices[a];
    const Point pb = mesh.vertices[b];
    const Point d = pb - pa;
    const double len = std::sqrt(dot(d, d));
    const double w = eta * len / 6.0;
    if (lumped) {
      out.matrix.add(a, a, 3.0 * w);
      out.matrix.add(b, b, 3.0 * w);
    } else {
      out.matrix.add(a, a, 2.0 * w);
      out.matrix.add(b, b, 2.0 * w);
      out.matrix.add(a, b, w);
      out.matrix.add(b, a, w);
    }
    for (double s : {0.5 - gp, 0.5 + gp}) {
      const double gv = g(pa + s * d);
      out.load[a] += 0.5 * len * gv * (1.0 - s);
      out.load[b] += 0.5 * len * gv * s;
    }
  }
  return out;
}

RobinSystem assemble_robin(const Mesh& mesh, EdgeTag tag, double eta, double g, bool lumped) {
  return assemble_robin(mesh, tag, eta, [g](Point) { return g; }, lumped);
}

DirichletConstraints::DirichletConstraints(std::size_t n, std::span<const int> nodes,
                                           std::span<const double> values)
    : mask_(n, 0), node_value_(n, 0.0) {
  if (nodes.size() != values.size()) {
    fail(ErrorKind::InvalidArgument, "Dirichlet node and value counts differ");
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = nodes[k];
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
      fail(ErrorKind::InvalidArgument, "Dirichlet node index out of range");
    }
    if (mask_[i]) {
      if (node_value_[i] != values[k]) {
        fail(ErrorKind::InvalidArgument, "conflicting Dirichlet values for node " + std::to_string(i));
      }
      continue;
    }
    mask_[i] = 1;
    node_value_[i] = values[k];
    nodes_.push_back(i);
    values_.push_back(values[k]);
    if (values[k] != 0.0) all_zero_ = false;
  }
}

DirichletConstraints::DirichletConstraints(std::size_t n, std::span<const int> nodes, double value)
    : DirichletConstraints(n, nodes, std::vector<double>(nodes.size(), value)) {}

SparseMatrix DirichletConstraints::apply_matrix(const SparseMatrix& a) {
  if (a.size() != mask_.size()) fail(ErrorKind::InvalidArgument, "matrix size mismatch");
  SparseMatrix out = a;
  auto vals = out.values();
  const auto offs = out.row_offsets();
  const auto cols = out.columns();
  couplings_.clear();
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = offs[i]; k < offs[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols[k]);
      if (mask_[i] || mask_[j]) {
        if (!mask_[i] && mask_[j] && vals[k] != 0.0) {
          couplings_.push_back({static_cast<int>(i), static_cast<int>(j), vals[k]});
        }
        vals[k] = (i == j) ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

void DirichletConstraints::apply_rhs(std::span<double> rhs) const {
  if (!all_zero_) {
    for (const Coupling& c : couplings_) rhs[c.row] -= c.a * node_value_[c.col];
  }
  impose(rhs);
}

void DirichletConstraints::impose(std::span<double> x) const {
  for (std::size_t k = 0; k < nodes_.size(); ++k) x[nodes_[k]] = values_[k];
}

LinearSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs,
                             std::span<const int> nodes, std::span<const double> values) {
  DirichletConstraints bc(a.size(), nodes, values);
  LinearSystem sys{bc.apply_matrix(a), std::vector<double>(rhs.begin(), rhs.end())};
  bc.apply_rhs(sys.rhs);
  return sys;
}

SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, double tol, int maxit,
                      std::span<const double> x0) {
  const std::size_t n = a.size();
  if (b.size() != n) fail(ErrorKind::InvalidArgument, "right-hand side length mismatch");
  for (double v : a.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::Solver, "non-finite matrix entry");
  }
  for (double v : b) {
    if (!std::isfinite(v)) fail(ErrorKind::Solver, "non-finite right-hand side");
  }
  SolveResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
  const double bnorm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) fail(ErrorKind::Solver, "matrix diagonal is not positive");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(res.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double rnorm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
  res.relative_residual = rnorm / bnorm;
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  for (int it = 1; it <= maxit; ++it) {
    a.multiply(p, q);
    const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    if (!(pq > 0.0)) fail(ErrorKind::Solver, "matrix is not positive definite");
    const double alpha = rz / pq;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rr += r[i] * r[i];
    }
    res.iterations = it;
    res.relative_residual = std::sqrt(rr) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace ihsim
