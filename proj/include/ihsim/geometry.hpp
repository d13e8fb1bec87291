#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ihsim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

enum class Region : std::uint8_t { Air = 0, Coil = 1, Workpiece = 2 };
enum class EdgeTag : std::uint8_t { Outer = 0, WorkpieceSurface = 1, Symmetry = 2 };

const char* to_string(Region r);
const char* to_string(EdgeTag t);
Region region_from_string(const std::string& s);
EdgeTag edge_tag_from_string(const std::string& s);

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  std::array<int, 2> v{};
  EdgeTag tag = EdgeTag::Outer;
};

using Polygon = std::vector<Point>;

/// Conforming triangulation of the computational domain. Triangles are
/// positively oriented and each carries one region label. `boundary_edges`
/// lists the outer boundary of the triangulation (OUTER / SYMMETRY) and the
/// workpiece interface (WORKPIECE_SURFACE).
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<Region> regions;
  std::vector<BoundaryEdge> boundary_edges;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
  double region_area(Region r) const;
  bool has_tag(EdgeTag tag) const;
  /// Vertex indices on edges carrying `tag`, sorted and unique.
  std::vector<int> tagged_nodes(EdgeTag tag) const;
};

/// Throws Error(Geometry) describing the first violated mesh invariant.
void validate(const Mesh& mesh);

/// Sides of the outer box, counter-clockwise from the bottom.
enum class BoxSide { Bottom = 0, Right = 1, Top = 2, Left = 3 };

struct DomainSpec {
  Point box_min{0.0, 0.0};
  Point box_max{1.0, 1.0};
  Polygon workpiece;
  std::vector<Polygon> coils;
  double h = 0.05;
  /// Target size in air triangles; <= 0 means "same as h".
  double h_air = 0.0;
  /// Tag per box side. The symmetry flag of a half-tooth cut sets Left and Right to SYMMETRY.
  std::array<EdgeTag, 4> side_tags{EdgeTag::Outer, EdgeTag::Outer, EdgeTag::Outer, EdgeTag::Outer};

  void set_symmetry(bool on);
};

double polygon_signed_area(std::span<const Point> poly);
bool point_in_polygon(Point p, std::span<const Point> poly);

/// Checks the DomainSpec invariants; throws Error(Geometry | InvalidArgument).
void validate(const DomainSpec& spec);

/// Conforming Delaunay triangulation of the box, resolving every polygon edge
/// by mesh edges, with quality refinement (min angle ~25 degrees) and sizing.
Mesh build_domain(const DomainSpec& spec);

/// Red (quadrisection) refinement of every triangle whose centroid is within
/// `depth` of an edge tagged `tag`, repeated `levels` times, with green
/// closure applied once at the end so the result is conforming.
Mesh refine_boundary_layer(const Mesh& mesh, EdgeTag tag, double depth, int levels);

struct Submesh {
  Mesh mesh;
  std::vector<int> parent_vertex;    ///< child vertex -> parent vertex
  std::vector<int> child_vertex;     ///< parent vertex -> child vertex or -1
  std::vector<int> parent_triangle;  ///< child triangle -> parent triangle

  std::vector<double> restrict_field(std::span<const double> parent_values) const;
  /// Writes child values into a copy of `parent_values` at the shared nodes.
  std::vector<double> prolong_field(std::span<const double> child_values,
                                    std::span<const double> parent_values) const;
};

Submesh submesh(const Mesh& mesh, Region region);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_edge = 0.0;
  double min_edge = 0.0;
};
MeshQuality mesh_quality(const Mesh& mesh);

/// Longest edge among triangles having a vertex within `distance` of an edge tagged `tag`.
double max_edge_near(const Mesh& mesh, EdgeTag tag, double distance);

/// Distance from p to segment [a, b].
double point_segment_distance(Point p, Point a, Point b);

/// Plain-text exchange format (header `MESH2D v1`).
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace ihsim
