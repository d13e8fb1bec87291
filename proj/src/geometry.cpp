#include "ihsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ihsim/error.hpp"
#include "triangulator.hpp"

namespace ihsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = detail::orient(q1, q2, p1);
  const double d2 = detail::orient(q1, q2, p2);
  const double d3 = detail::orient(p1, p2, q1);
  const double d4 = detail::orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](Point a, Point b, Point p, double o) {
    return o == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
  };
  return on_segment(q1, q2, p1, d1) || on_segment(q1, q2, p2, d2) || on_segment(p1, p2, q1, d3) ||
         on_segment(p1, p2, q2, d4);
}

void check_polygon(const Polygon& poly, const std::string& name) {
  if (poly.size() < 3) fail(ErrorKind::Geometry, name + " polygon needs at least 3 vertices");
  for (const Point& p : poly) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorKind::Geometry, name + " polygon has a non-finite vertex");
    }
  }
  if (polygon_signed_area(poly) == 0.0) fail(ErrorKind::Geometry, name + " polygon is degenerate");
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        fail(ErrorKind::Geometry, name + " polygon self-intersects");
      }
    }
  }
}

bool polygons_touch(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
    }
  }
  return point_in_polygon(a.front(), b) || point_in_polygon(b.front(), a);
}

Polygon ccw(Polygon p) {
  if (polygon_signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
  return p;
}

bool on_side(Point p, int side, Point lo, Point hi, double tol) {
  switch (static_cast<BoxSide>(side)) {
    case BoxSide::Bottom: return std::abs(p.y - lo.y) <= tol;
    case BoxSide::Right: return std::abs(p.x - hi.x) <= tol;
    case BoxSide::Top: return std::abs(p.y - hi.y) <= tol;
    case BoxSide::Left: return std::abs(p.x - lo.x) <= tol;
  }
  return false;
}

constexpr int kWorkpieceMarker = 10;
constexpr int kCoilMarker = 20;

}  // namespace

const char* to_string(Region r) {
  switch (r) {
    case Region::Air: return "AIR";
    case Region::Coil: return "COIL";
    case Region::Workpiece: return "WORKPIECE";
  }
  return "?";
}

const char* to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::Outer: return "OUTER";
    case EdgeTag::WorkpieceSurface: return "WORKPIECE_SURFACE";
    case EdgeTag::Symmetry: return "SYMMETRY";
  }
  return "?";
}

Region region_from_string(const std::string& s) {
  if (s == "AIR") return Region::Air;
  if (s == "COIL") return Region::Coil;
  if (s == "WORKPIECE") return Region::Workpiece;
  fail(ErrorKind::Parse, "unknown region label '" + s + "'");
}

EdgeTag edge_tag_from_string(const std::string& s) {
  if (s == "OUTER") return EdgeTag::Outer;
  if (s == "WORKPIECE_SURFACE") return EdgeTag::WorkpieceSurface;
  if (s == "SYMMETRY") return EdgeTag::Symmetry;
  fail(ErrorKind::Parse, "unknown edge tag '" + s + "'");
}

double Mesh::signed_area(std::size_t t) const {
  const Triangle& tr = triangles[t];
  return 0.5 * detail::orient(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

Point Mesh::centroid(std::size_t t) const {
  const Triangle& tr = triangles[t];
  const Point s = vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]];
  return (1.0 / 3.0) * s;
}

double Mesh::region_area(Region r) const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    if (regions[t] == r) a += signed_area(t);
  }
  return a;
}

bool Mesh::has_tag(EdgeTag tag) const {
  return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                     [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

std::vector<int> Mesh::tagged_nodes(EdgeTag tag) const {
  std::vector<int> nodes;
  for (const BoundaryEdge& e : boundary_edges) {
    if (e.tag == tag) {
      nodes.push_back(e.v[0]);
      nodes.push_back(e.v[1]);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

void validate(const Mesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  if (mesh.regions.size() != mesh.triangles.size()) {
    fail(ErrorKind::Geometry, "region label count differs from triangle count");
  }
  struct EdgeUse {
    int count = 0;
    bool coil = false;
    bool workpiece = false;
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    for (int v : tr) {
      if (v < 0 || v >= nv) fail(ErrorKind::Geometry, "triangle references a missing vertex");
    }
    if (!(mesh.signed_area(t) > 0.0)) {
      fail(ErrorKind::Geometry, "triangle " + std::to_string(t) + " is not positively oriented");
    }
    for (int i = 0; i < 3; ++i) {
      EdgeUse& e = edges[edge_key(tr[i], tr[(i + 1) % 3])];
      ++e.count;
      e.coil |= mesh.regions[t] == Region::Coil;
      e.workpiece |= mesh.regions[t] == Region::Workpiece;
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.count > 2) fail(ErrorKind::Geometry, "edge shared by more than two triangles");
    if (use.coil && use.workpiece) fail(ErrorKind::Geometry, "coil and workpiece share an edge");
  }
  std::unordered_map<std::uint64_t, int> tags;
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    const auto key = edge_key(be.v[0], be.v[1]);
    const auto it = edges.find(key);
    if (it == edges.end()) fail(ErrorKind::Geometry, "tagged edge is not a mesh edge");
    if (++tags[key] > 1) fail(ErrorKind::Geometry, "edge carries more than one tag");
    if (be.tag == EdgeTag::WorkpieceSurface && it->second.count != 2) {
      fail(ErrorKind::Geometry, "workpiece surface edge on the outer boundary");
    }
  }
  for (const auto& [key, use] : edges) {
    if (use.count == 1 && tags.find(key) == tags.end()) {
      fail(ErrorKind::Geometry, "untagged boundary edge");
    }
  }
}

void DomainSpec::set_symmetry(bool on) {
  const EdgeTag t = on ? EdgeTag::Symmetry : EdgeTag::Outer;
  side_tags[static_cast<int>(BoxSide::Left)] = t;
  side_tags[static_cast<int>(BoxSide::Right)] = t;
}

double polygon_signed_area(std::span<const Point> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point d = p - (a + t * ab);
  return std::sqrt(dot(d, d));
}

void validate(const DomainSpec& spec) {
  if (!(spec.h > 0.0) || !std::isfinite(spec.h)) {
    fail(ErrorKind::InvalidArgument, "mesh size h must be positive");
  }
  if (!(spec.box_max.x > spec.box_min.x) || !(spec.box_max.y > spec.box_min.y)) {
    fail(ErrorKind::Geometry, "outer box is empty");
  }
  std::vector<std::pair<const Polygon*, std::string>> polys;
  if (!spec.workpiece.empty()) polys.emplace_back(&spec.workpiece, "workpiece");
  for (std::size_t i = 0; i < spec.coils.size(); ++i) {
    polys.emplace_back(&spec.coils[i], "coil " + std::to_string(i));
  }
  const double tol = 1e-12 * std::max(spec.box_max.x - spec.box_min.x, spec.box_max.y - spec.box_min.y);
  for (const auto& [poly, name] : polys) {
    check_polygon(*poly, name);
    for (const Point& p : *poly) {
      if (p.x < spec.box_min.x - tol || p.x > spec.box_max.x + tol || p.y < spec.box_min.y - tol ||
          p.y > spec.box_max.y + tol) {
        fail(ErrorKind::Geometry, name + " polygon leaves the outer box");
      }
    }
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (std::size_t j = i + 1; j < polys.size(); ++j) {
      if (polygons_touch(*polys[i].first, *polys[j].first)) {
        fail(ErrorKind::Geometry, polys[i].second + " and " + polys[j].second + " polygons overlap");
      }
    }
  }
}

Mesh build_domain(const DomainSpec& spec) {
  validate(spec);
  const Point lo = spec.box_min;
  const Point hi = spec.box_max;
  const double scale = std::max(hi.x - lo.x, hi.y - lo.y);
  const double tol = 1e-12 * scale;
  const double h = spec.h;
  const double h_air = spec.h_air > 0.0 ? spec.h_air : h;

  std::vector<std::pair<Polygon, int>> polys;
  if (!spec.workpiece.empty()) polys.emplace_back(ccw(spec.workpiece), kWorkpieceMarker);
  for (std::size_t i = 0; i < spec.coils.size(); ++i) {
    polys.emplace_back(ccw(spec.coils[i]), kCoilMarker + static_cast<int>(i));
  }

  detail::Triangulator tri(lo, hi);

  auto on_polygon_boundary = [&](Point p) {
    for (const auto& [poly, marker] : polys) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        if (point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
      }
    }
    return false;
  };

  auto add_split = [&](Point a, Point b, double target, int marker) {
    const double len = std::sqrt(dot(b - a, b - a));
    const int n = std::max(1, static_cast<int>(std::ceil(len / target - 1e-9)));
    int prev = tri.insert(a);
    for (int k = 1; k <= n; ++k) {
      const Point p = k == n ? b : a + (static_cast<double>(k) / n) * (b - a);
      const int cur = tri.insert(p);
      tri.add_segment(prev, cur, marker);
      prev = cur;
    }
  };

  // Box sides, split at every polygon vertex lying on them.
  const std::array<Point, 4> corners{lo, Point{hi.x, lo.y}, hi, Point{lo.x, hi.y}};
  for (int side = 0; side < 4; ++side) {
    const Point a = corners[side];
    const Point b = corners[(side + 1) % 4];
    std::vector<double> params{0.0, 1.0};
    const Point ab = b - a;
    for (const auto& [poly, marker] : polys) {
      for (const Point& p : poly) {
        if (on_side(p, side, lo, hi, tol)) params.push_back(dot(p - a, ab) / dot(ab, ab));
      }
    }
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                 params.end());
    for (std::size_t k = 0; k + 1 < params.size(); ++k) {
      const Point p0 = a + params[k] * ab;
      const Point p1 = a + params[k + 1] * ab;
      const double target = on_polygon_boundary(0.5 * (p0 + p1)) ? h : h_air;
      add_split(p0, p1, target, side);
    }
  }

  for (const auto& [poly, marker] : polys) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i];
      const Point b = poly[(i + 1) % poly.size()];
      bool on_box = false;
      for (int side = 0; side < 4; ++side) on_box = on_box || (on_side(a, side, lo, hi, tol) && on_side(b, side, lo, hi, tol));
      if (on_box) continue;  // covered by the box side
      add_split(a, b, h, marker);
    }
  }

  tri.recover_segments();

  auto region_at = [&](Point c) {
    for (const auto& [poly, marker] : polys) {
      if (point_in_polygon(c, poly)) return marker == kWorkpieceMarker ? Region::Workpiece : Region::Coil;
    }
    return Region::Air;
  };
  const double ratio = 1.0 / (2.0 * std::sin(25.0 * kPi / 180.0));
  tri.refine(
      ratio,
      [&](const std::array<Point, 3>& p) {
        const Point c = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
        const double target = region_at(c) == Region::Air ? h_air : h;
        const Point cc = detail::circumcenter(p[0], p[1], p[2]);
        const Point d = cc - p[0];
        return std::sqrt(dot(d, d)) <= 0.65 * target;
      },
      4'000'000);

  Mesh mesh;
  mesh.vertices = tri.points();
  for (const auto& t : tri.triangles()) {
    if (!t.alive) continue;
    mesh.triangles.push_back({t.v[0], t.v[1], t.v[2]});
    mesh.regions.push_back(region_at(mesh.centroid(mesh.triangles.size() - 1)));
  }
  for (const auto& s : tri.segments()) {
    if (!s.alive) continue;
    if (s.marker < 4) {
      mesh.boundary_edges.push_back({{s.a, s.b}, spec.side_tags[s.marker]});
    } else if (s.marker == kWorkpieceMarker) {
      mesh.boundary_edges.push_back({{s.a, s.b}, EdgeTag::WorkpieceSurface});
    }
  }
  validate(mesh);
  return mesh;
}

Mesh refine_boundary_layer(const Mesh& mesh, EdgeTag tag, double depth, int levels) {
  if (levels < 0) fail(ErrorKind::InvalidArgument, "refinement levels must be nonnegative");
  if (!(depth > 0.0)) fail(ErrorKind::InvalidArgument, "refinement depth must be positive");
  if (!mesh.has_tag(tag)) {
    fail(ErrorKind::InvalidArgument, std::string("no edges tagged ") + to_string(tag));
  }
  if (levels == 0) return mesh;

  std::vector<std::pair<Point, Point>> tagged;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.tag == tag) tagged.emplace_back(mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
  }

  std::vector<Point> verts = mesh.vertices;
  std::vector<Triangle> leaves = mesh.triangles;
  std::vector<Region> regions = mesh.regions;
  std::unordered_map<std::uint64_t, int> mid;

  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    mid.emplace(key, id);
    return id;
  };
  auto split_at = [&](int a, int b) {
    auto it = mid.find(edge_key(a, b));
    return it == mid.end() ? -1 : it->second;
  };
  auto red = [&](std::size_t t) {
    const Triangle tr = leaves[t];
    const int mab = midpoint(tr[0], tr[1]);
    const int mbc = midpoint(tr[1], tr[2]);
    const int mca = midpoint(tr[2], tr[0]);
    leaves[t] = {tr[0], mab, mca};
    leaves.push_back({mab, tr[1], mbc});
    leaves.push_back({mca, mbc, tr[2]});
    leaves.push_back({mab, mbc, mca});
    regions.push_back(regions[t]);
    regions.push_back(regions[t]);
    regions.push_back(regions[t]);
  };
  auto near_tagged = [&](Point c) {
    for (const auto& [a, b] : tagged) {
      if (point_segment_distance(c, a, b) <= depth) return true;
    }
    return false;
  };

  for (int level = 0; level < levels; ++level) {
    std::vector<std::size_t> marked;
    for (std::size_t t = 0; t < leaves.size(); ++t) {
      const Triangle& tr = leaves[t];
      const Point c = (1.0 / 3.0) * (verts[tr[0]] + verts[tr[1]] + verts[tr[2]]);
      if (near_tagged(c)) marked.push_back(t);
    }
    for (std::size_t t : marked) red(t);
    // Closure: at most one hanging node per triangle, on its longest edge.
    bool changed = true;
    while (changed) {
      changed = false;
      const std::size_t n = leaves.size();
      for (std::size_t t = 0; t < n; ++t) {
        const Triangle tr = leaves[t];
        int split = 0;
        bool irregular = false;
        for (int i = 0; i < 3; ++i) {
          const int a = tr[i];
          const int b = tr[(i + 1) % 3];
          const int m = split_at(a, b);
          if (m < 0) continue;
          ++split;
          if (split_at(a, m) >= 0 || split_at(m, b) >= 0) irregular = true;
        }
        bool short_edge = false;
        if (split == 1) {
          // green closure bisects only the longest edge
          double longest = 0.0;
          double split_len = 0.0;
          for (int i = 0; i < 3; ++i) {
            const Point d = verts[tr[(i + 1) % 3]] - verts[tr[i]];
            const double len = dot(d, d);
            longest = std::max(longest, len);
            if (split_at(tr[i], tr[(i + 1) % 3]) >= 0) split_len = len;
          }
          short_edge = split_len < longest * (1.0 - 1e-12);
        }
        if (split >= 2 || irregular || short_edge) {
          red(t);
          changed = true;
        }
      }
    }
  }

  Mesh out;
  out.vertices = std::move(verts);
  for (std::size_t t = 0; t < leaves.size(); ++t) {
    const Triangle tr = leaves[t];
    int edge = -1;
    int m = -1;
    for (int i = 0; i < 3; ++i) {
      const int s = split_at(tr[i], tr[(i + 1) % 3]);
      if (s >= 0) {
        edge = i;
        m = s;
      }
    }
    if (edge < 0) {
      out.triangles.push_back(tr);
      out.regions.push_back(regions[t]);
      continue;
    }
    const int a = tr[edge];
    const int b = tr[(edge + 1) % 3];
    const int c = tr[(edge + 2) % 3];
    out.triangles.push_back({a, m, c});
    out.triangles.push_back({m, b, c});
    out.regions.push_back(regions[t]);
    out.regions.push_back(regions[t]);
  }

  std::function<void(int, int, EdgeTag)> expand = [&](int a, int b, EdgeTag t) {
    const int m = split_at(a, b);
    if (m < 0) {
      out.boundary_edges.push_back({{a, b}, t});
      return;
    }
    expand(a, m, t);
    expand(m, b, t);
  };
  for (const BoundaryEdge& e : mesh.boundary_edges) expand(e.v[0], e.v[1], e.tag);
  validate(out);
  return out;
}

std::vector<double> Submesh::restrict_field(std::span<const double> parent_values) const {
  std::vector<double> out(parent_vertex.size());
  for (std::size_t i = 0; i < parent_vertex.size(); ++i) out[i] = parent_values[parent_vertex[i]];
  return out;
}

std::vector<double> Submesh::prolong_field(std::span<const double> child_values,
                                           std::span<const double> parent_values) const {
  std::vector<double> out(parent_values.begin(), parent_values.end());
  for (std::size_t i = 0; i < parent_vertex.size(); ++i) out[parent_vertex[i]] = child_values[i];
  return out;
}

Submesh submesh(const Mesh& mesh, Region region) {
  Submesh sub;
  sub.child_vertex.assign(mesh.vertices.size(), -1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != region) continue;
    for (int v : mesh.triangles[t]) {
      if (sub.child_vertex[v] < 0) sub.child_vertex[v] = 0;
    }
  }
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (sub.child_vertex[v] < 0) continue;
    sub.child_vertex[v] = static_cast<int>(sub.parent_vertex.size());
    sub.parent_vertex.push_back(static_cast<int>(v));
    sub.mesh.vertices.push_back(mesh.vertices[v]);
  }
  std::unordered_map<std::uint64_t, int> edge_count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != region) continue;
    const Triangle& tr = mesh.triangles[t];
    sub.mesh.triangles.push_back(
        {sub.child_vertex[tr[0]], sub.child_vertex[tr[1]], sub.child_vertex[tr[2]]});
    sub.mesh.regions.push_back(region);
    sub.parent_triangle.push_back(static_cast<int>(t));
    for (int i = 0; i < 3; ++i) ++edge_count[edge_key(tr[i], tr[(i + 1) % 3])];
  }
  if (sub.mesh.triangles.empty()) {
    fail(ErrorKind::InvalidArgument, std::string("region ") + to_string(region) + " has no triangles");
  }
  std::unordered_map<std::uint64_t, EdgeTag> parent_tags;
  for (const BoundaryEdge& e : mesh.boundary_edges) parent_tags[edge_key(e.v[0], e.v[1])] = e.tag;
  // Keep a deterministic order: walk triangles, emit boundary edges as met.
  for (const Triangle& tr : sub.mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const int a = sub.parent_vertex[tr[i]];
      const int b = sub.parent_vertex[tr[(i + 1) % 3]];
      const auto key = edge_key(a, b);
      if (edge_count[key] != 1) continue;
      const auto it = parent_tags.find(key);
      const EdgeTag tag =
          (it != parent_tags.end() && it->second == EdgeTag::Symmetry) ? EdgeTag::Symmetry : EdgeTag::Outer;
      sub.mesh.boundary_edges.push_back({{tr[i], tr[(i + 1) % 3]}, tag});
    }
  }
  return sub;
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  q.min_edge = std::numeric_limits<double>::infinity();
  for (const Triangle& tr : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Point p = mesh.vertices[tr[i]];
      const Point u = mesh.vertices[tr[(i + 1) % 3]] - p;
      const Point w = mesh.vertices[tr[(i + 2) % 3]] - p;
      const double ang = std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / kPi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      const double len = std::sqrt(dot(u, u));
      q.max_edge = std::max(q.max_edge, len);
      q.min_edge = std::min(q.min_edge, len);
    }
  }
  return q;
}

double max_edge_near(const Mesh& mesh, EdgeTag tag, double distance) {
  std::vector<std::pair<Point, Point>> tagged;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.tag == tag) tagged.emplace_back(mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
  }
  double worst = 0.0;
  for (const Triangle& tr : mesh.triangles) {
    bool near = false;
    for (int v : tr) {
      for (const auto& [a, b] : tagged) {
        if (point_segment_distance(mesh.vertices[v], a, b) <= distance) {
          near = true;
          break;
        }
      }
      if (near) break;
    }
    if (!near) continue;
    for (int i = 0; i < 3; ++i) {
      const Point d = mesh.vertices[tr[i]] - mesh.vertices[tr[(i + 1) % 3]];
      worst = std::max(worst, std::sqrt(dot(d, d)));
    }
  }
  return worst;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "MESH2D v1\n" << mesh.vertices.size() << '\n';
  for (const Point& p : mesh.vertices) buf << p.x << ' ' << p.y << '\n';
  buf << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    buf << tr[0] << ' ' << tr[1] << ' ' << tr[2] << ' ' << to_string(mesh.regions[t]) << '\n';
  }
  buf << mesh.boundary_edges.size() << '\n';
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    buf << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.tag) << '\n';
  }
  os << buf.str();
  if (!os) fail(ErrorKind::Io, "failed to write mesh");
}

Mesh read_mesh(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("MESH2D v1", 0) != 0) {
    fail(ErrorKind::Parse, "missing MESH2D v1 header");
  }
  Mesh mesh;
  auto count = [&](const char* what) {
    long long n = -1;
    if (!(is >> n) || n < 0) fail(ErrorKind::Parse, std::string("bad ") + what + " count");
    return static_cast<std::size_t>(n);
  };
  const std::size_t nv = count("vertex");
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices) {
    if (!(is >> p.x >> p.y)) fail(ErrorKind::Parse, "truncated vertex list");
  }
  const std::size_t nt = count("triangle");
  mesh.triangles.resize(nt);
  mesh.regions.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    std::string label;
    auto& tr = mesh.triangles[t];
    if (!(is >> tr[0] >> tr[1] >> tr[2] >> label)) fail(ErrorKind::Parse, "truncated triangle list");
    mesh.regions[t] = region_from_string(label);
  }
  const std::size_t ne = count("edge");
  mesh.boundary_edges.resize(ne);
  for (auto& e : mesh.boundary_edges) {
    std::string label;
    if (!(is >> e.v[0] >> e.v[1] >> label)) fail(ErrorKind::Parse, "truncated edge list");
    e.tag = edge_tag_from_string(label);
  }
  validate(mesh);
  return mesh;
}

}  // namespace ihsim
