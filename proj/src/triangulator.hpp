#pragma once

// Incremental Bowyer-Watson triangulation of an axis-aligned box with
// conforming segment recovery and Ruppert-style quality refinement.
// Internal to the mesher; not part of the installed interface.

#include <array>
#include <functional>
#include <vector>

#include "ihsim/geometry.hpp"

namespace ihsim::detail {

double orient(Point a, Point b, Point c);
/// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(Point a, Point b, Point c, Point d);
Point circumcenter(Point a, Point b, Point c);

class Triangulator {
 public:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{-1, -1, -1};  ///< n[i] is across the edge opposite v[i]
    bool alive = true;
  };

  struct Segment {
    int a = -1;
    int b = -1;
    int marker = 0;
    bool alive = true;
  };

  Triangulator(Point lo, Point hi);

  /// Inserts p (ignored if it coincides with an existing vertex) and returns its index.
  int insert(Point p);

  /// Registers a constrained segment between existing vertices.
  void add_segment(int a, int b, int marker);

  /// Splits segments until none is encroached (every segment is then a mesh edge).
  void recover_segments();

  /// Circumcenter refinement until every triangle satisfies the ratio bound
  /// and `size_ok(tri vertices)` holds.
  void refine(double max_radius_edge_ratio,
              const std::function<bool(const std::array<Point, 3>&)>& size_ok,
              std::size_t max_vertices);

  const std::vector<Point>& points() const { return pts_; }
  const std::vector<Tri>& triangles() const { return tris_; }
  const std::vector<Segment>& segments() const { return segs_; }

 private:
  int locate(Point p) const;
  bool encroaches(const Segment& s, Point p) const;
  void split_segment(std::size_t s);
  /// Splits every segment encroached by vertex v (recursively).
  void split_encroached_by(int v);
  bool segment_ok(const Segment& s) const;
  int insert_point(Point p, std::vector<int>* created);

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<Segment> segs_;
  std::vector<int> vtri_;   // one live triangle per vertex
  std::vector<int> fresh_;  // triangles created since the last refine sweep
  Point lo_, hi_;
  double scale_ = 1.0;
  mutable int last_ = 0;
  mutable unsigned walk_ = 0;
};

}  // namespace ihsim::detail
