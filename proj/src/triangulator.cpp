#include "triangulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ihsim/error.hpp"

namespace ihsim::detail {

double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

double incircle(Point a, Point b, Point c, Point d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  return static_cast<double>(det);
}

Point circumcenter(Point a, Point b, Point c) {
  const Point ab = b - a;
  const Point ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

namespace {

double radius_edge_ratio(Point a, Point b, Point c) {
  const double la = dot(b - c, b - c);
  const double lb = dot(a - c, a - c);
  const double lc = dot(a - b, a - b);
  const double area2 = std::abs(orient(a, b, c));
  // R = abc / (4 K), ratio = R / shortest edge.
  const double shortest = std::sqrt(std::min({la, lb, lc}));
  return std::sqrt(la * lb * lc) / (2.0 * area2) / shortest;
}

}  // namespace

Triangulator::Triangulator(Point lo, Point hi) : lo_(lo), hi_(hi) {
  scale_ = std::max(hi.x - lo.x, hi.y - lo.y);
  pts_ = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  Tri t0;
  t0.v = {0, 1, 2};
  Tri t1;
  t1.v = {0, 2, 3};
  // t0 edge opposite v[1]=1 is (2,0), shared with t1 edge opposite v[2]=3... (0,2)
  t0.n = {-1, 1, -1};
  t1.n = {-1, -1, 0};
  tris_ = {t0, t1};
  vtri_ = {0, 0, 0, 1};
}

int Triangulator::locate(Point p) const {
  int t = last_;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
    t = static_cast<int>(tris_.size()) - 1;
    while (t > 0 && !tris_[t].alive) --t;
  }
  const std::size_t limit = 4 * tris_.size() + 64;
  for (std::size_t step = 0; step < limit; ++step) {
    const Tri& tr = tris_[t];
    bool moved = false;
    const unsigned start = walk_++ % 3;
    for (unsigned k = 0; k < 3; ++k) {
      const unsigned i = (start + k) % 3;
      const Point a = pts_[tr.v[(i + 1) % 3]];
      const Point b = pts_[tr.v[(i + 2) % 3]];
      if (orient(a, b, p) < 0.0 && tr.n[i] >= 0) {
        t = tr.n[i];
        moved = true;
        break;
      }
    }
    if (!moved) {
      last_ = t;
      return t;
    }
  }
  fail(ErrorKind::Geometry, "point location failed to terminate");
}

int Triangulator::insert(Point p) { return insert_point(p, nullptr); }

int Triangulator::insert_point(Point p, std::vector<int>* created) {
  const double eps = 1e-14 * scale_;
  if (p.x < lo_.x - eps || p.x > hi_.x + eps || p.y < lo_.y - eps || p.y > hi_.y + eps) {
    fail(ErrorKind::Geometry, "point outside the outer box");
  }
  const int t0 = locate(p);
  for (int vi : tris_[t0].v) {
    const Point d = pts_[vi] - p;
    if (std::abs(d.x) <= eps && std::abs(d.y) <= eps) return vi;
  }

  std::vector<int> cavity{t0};
  std::vector<char> in_cavity(tris_.size(), 0);
  in_cavity[t0] = 1;
  const double area_eps = 1e-13 * scale_ * scale_;
  for (int i = 0; i < 3; ++i) {
    // p on an interior edge of t0: the neighbour must go too.
    const Tri& tr = tris_[t0];
    const int nb = tr.n[i];
    if (nb >= 0 && std::abs(orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p)) <= area_eps) {
      in_cavity[nb] = 1;
      cavity.push_back(nb);
    }
  }
  for (std::size_t k = 0; k < cavity.size(); ++k) {
    const Tri& tr = tris_[cavity[k]];
    for (int nb : tr.n) {
      if (nb < 0 || in_cavity[nb]) continue;
      const Tri& o = tris_[nb];
      if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0.0) {
        in_cavity[nb] = 1;
        cavity.push_back(nb);
      }
    }
  }

  struct Edge {
    int a, b, outside, owner;
    bool skip;
  };
  std::vector<Edge> boundary;
  for (;;) {
    boundary.clear();
    int bad_owner = -1;
    for (int c : cavity) {
      const Tri& tr = tris_[c];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb >= 0 && in_cavity[nb]) continue;
        const int a = tr.v[(i + 1) % 3];
        const int b = tr.v[(i + 2) % 3];
        const double o = orient(pts_[a], pts_[b], p);
        bool skip = false;
        if (o <= area_eps) {
          if (nb < 0 && std::abs(o) <= area_eps) {
            skip = true;  // p splits a hull edge
          } else if (c != t0) {
            bad_owner = c;
          }
        }
        boundary.push_back({a, b, nb, c, skip});
      }
    }
    if (bad_owner < 0) break;
    in_cavity[bad_owner] = 0;
    cavity.erase(std::find(cavity.begin(), cavity.end(), bad_owner));
  }

  const int pv = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vtri_.push_back(-1);

  std::vector<std::pair<int, int>> starts;  // (start vertex, tri)
  std::vector<std::pair<int, int>> ends;    // (end vertex, tri)
  std::vector<int> made;
  for (const Edge& e : boundary) {
    if (e.skip) continue;
    Tri nt;
    nt.v = {e.a, e.b, pv};
    nt.n = {-1, -1, e.outside};
    const int id = static_cast<int>(tris_.size());
    tris_.push_back(nt);
    made.push_back(id);
    starts.emplace_back(e.a, id);
    ends.emplace_back(e.b, id);
    if (e.outside >= 0) {
      for (int& back : tris_[e.outside].n) {
        if (back == e.owner) back = id;
      }
    }
  }
  for (int id : made) {
    Tri& nt = tris_[id];
    for (const auto& [v, t] : starts) {
      if (v == nt.v[1]) nt.n[0] = t;
    }
    for (const auto& [v, t] : ends) {
      if (v == nt.v[0]) nt.n[1] = t;
    }
    vtri_[nt.v[0]] = id;
    vtri_[nt.v[1]] = id;
    vtri_[nt.v[2]] = id;
  }
  for (int c : cavity) tris_[c].alive = false;
  if (!made.empty()) last_ = made.front();
  fresh_.insert(fresh_.end(), made.begin(), made.end());
  if (created) created->insert(created->end(), made.begin(), made.end());
  return pv;
}

void Triangulator::add_segment(int a, int b, int marker) {
  if (a == b) return;
  segs_.push_back({a, b, marker, true});
}

bool Triangulator::encroaches(const Segment& s, Point p) const {
  const Point a = pts_[s.a];
  const Point b = pts_[s.b];
  const double d = dot(a - p, b - p);
  // points on the diametral circle count, so cocircular ties cannot flip a segment away
  return d < 1e-10 * dot(b - a, b - a);
}

bool Triangulator::segment_ok(const Segment& s) const {
  // Rotate around s.a looking for the edge (s.a, s.b); check the opposite vertices.
  int t = vtri_[s.a];
  if (t < 0) return false;
  bool found = false;
  auto check_tri = [&](int ti) {
    const Tri& tr = tris_[ti];
    for (int i = 0; i < 3; ++i) {
      if (tr.v[i] != s.a && tr.v[i] != s.b) {
        const int x = tr.v[(i + 1) % 3];
        const int y = tr.v[(i + 2) % 3];
        if ((x == s.a && y == s.b) || (x == s.b && y == s.a)) {
          found = true;
          if (encroaches(s, pts_[tr.v[i]])) return false;
        }
      }
    }
    return true;
  };
  // Walk both rotation directions around s.a.
  for (int dir = 0; dir < 2; ++dir) {
    int cur = t;
    for (int guard = 0; guard < 4096 && cur >= 0; ++guard) {
      if (!check_tri(cur)) return false;
      const Tri& tr = tris_[cur];
      int ia = 0;
      while (tr.v[ia] != s.a) ++ia;
      // dir 0: cross edge (a, v[ia+1]) -> neighbour opposite v[ia+2]
      const int nxt = dir == 0 ? tr.n[(ia + 2) % 3] : tr.n[(ia + 1) % 3];
      if (nxt == t) break;
      cur = nxt;
    }
  }
  return found;
}

void Triangulator::split_segment(std::size_t s) {
  const Segment seg = segs_[s];
  segs_[s].alive = false;
  const Point m = 0.5 * (pts_[seg.a] + pts_[seg.b]);
  const int mv = insert_point(m, nullptr);
  segs_.push_back({seg.a, mv, seg.marker, true});
  segs_.push_back({mv, seg.b, seg.marker, true});
  split_encroached_by(mv);
}

void Triangulator::split_encroached_by(int v) {
  const Point p = pts_[v];
  for (std::size_t s = 0; s < segs_.size(); ++s) {
    if (!segs_[s].alive || segs_[s].a == v || segs_[s].b == v) continue;
    if (encroaches(segs_[s], p)) split_segment(s);
  }
}

void Triangulator::recover_segments() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      if (segs_[s].alive && !segment_ok(segs_[s])) {
        split_segment(s);
        changed = true;
      }
    }
  }
}

void Triangulator::refine(double max_ratio,
                          const std::function<bool(const std::array<Point, 3>&)>& size_ok,
                          std::size_t max_vertices) {
  std::deque<int> queue;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    if (tris_[t].alive) queue.push_back(static_cast<int>(t));
  }
  fresh_.clear();
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    if (!tris_[t].alive) continue;
    const Tri tr = tris_[t];
    const std::array<Point, 3> p{pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]};
    const bool bad = radius_edge_ratio(p[0], p[1], p[2]) > max_ratio || !size_ok(p);
    if (!bad) continue;
    if (pts_.size() >= max_vertices) {
      fail(ErrorKind::Geometry, "mesh refinement exceeded the vertex budget");
    }
    const Point c = circumcenter(p[0], p[1], p[2]);
    std::vector<std::size_t> hit;
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      if (segs_[s].alive && encroaches(segs_[s], c)) hit.push_back(s);
    }
    if (!hit.empty()) {
      for (std::size_t s : hit) {
        if (segs_[s].alive) split_segment(s);
      }
    } else {
      if (c.x <= lo_.x || c.x >= hi_.x || c.y <= lo_.y || c.y >= hi_.y) continue;
      const std::size_t before = pts_.size();
      const int v = insert_point(c, nullptr);
      if (static_cast<std::size_t>(v) < before) continue;
      split_encroached_by(v);
    }
    for (int f : fresh_) queue.push_back(f);
    fresh_.clear();
    if (tris_[t].alive) queue.push_back(t);
  }
}

}  // namespace ihsim::detail
