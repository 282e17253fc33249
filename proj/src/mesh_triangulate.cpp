#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <vector>

#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

namespace {

constexpr double kMinAngleDeg = 20.0;
constexpr double kGrading = 0.25;  // size growth per unit distance from the boundary

int orient_sign(Point2 a, Point2 b, Point2 c) {
  long double acx = static_cast<long double>(a.x) - c.x;
  long double acy = static_cast<long double>(a.y) - c.y;
  long double bcx = static_cast<long double>(b.x) - c.x;
  long double bcy = static_cast<long double>(b.y) - c.y;
  long double det = acx * bcy - acy * bcx;
  long double perm = std::abs(acx * bcy) + std::abs(acy * bcx);
  if (std::abs(det) <= perm * 1e-18L) return 0;
  return det > 0 ? 1 : -1;
}

/// Strictly inside the circumcircle of CCW triangle (a,b,c)?
bool in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 p) {
  long double ax = static_cast<long double>(a.x) - p.x, ay = static_cast<long double>(a.y) - p.y;
  long double bx = static_cast<long double>(b.x) - p.x, by = static_cast<long double>(b.y) - p.y;
  long double cx = static_cast<long double>(c.x) - p.x, cy = static_cast<long double>(c.y) - p.y;
  long double a2 = ax * ax + ay * ay;
  long double b2 = bx * bx + by * by;
  long double c2 = cx * cx + cy * cy;
  long double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  long double perm = std::abs(ax * by * c2) + std::abs(ax * b2 * cy) + std::abs(ay * bx * c2) +
                     std::abs(ay * b2 * cx) + std::abs(a2 * bx * cy) + std::abs(a2 * by * cx);
  if (std::abs(det) <= perm * 1e-18L) return false;
  return det > 0;
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  long double abx = static_cast<long double>(b.x) - a.x, aby = static_cast<long double>(b.y) - a.y;
  long double acx = static_cast<long double>(c.x) - a.x, acy = static_cast<long double>(c.y) - a.y;
  long double d = 2 * (abx * acy - aby * acx);
  long double ab2 = abx * abx + aby * aby;
  long double ac2 = acx * acx + acy * acy;
  long double ux = (acy * ab2 - aby * ac2) / d;
  long double uy = (abx * ac2 - acx * ab2) / d;
  return {a.x + static_cast<double>(ux), a.y + static_cast<double>(uy)};
}

struct Tri {
  std::array<int, 3> v{-1, -1, -1};
  std::array<int, 3> nb{-1, -1, -1};   // neighbor across edge k = (v[k], v[k+1])
  std::array<int, 3> sub{-1, -1, -1};  // constrained subsegment id on edge k, or -1
  int label = -1;                      // 0 outside, 1 domain, 2 hole
  bool alive = true;
};

struct SubSeg {
  int a = -1, b = -1;
  BoundaryName boundary = BoundaryName::Gamma;
  int polygon_edge = -1;
  double t0 = 0.0, t1 = 1.0;
  double mass = 0.0;
  bool alive = true;
};

struct PointRec {
  Point2 pos;
  VertexInfo info;
  BoundaryName boundary = BoundaryName::Gamma;  // meaningful when info.tag != Interior
};

class Triangulator {
 public:
  Triangulator(const DomainSpec& domain, double h_target)
      : domain_(domain), h_target_(h_target) {}

  Mesh build();

 private:
  const DomainSpec& domain_;
  double h_target_;
  double coincide_tol_ = 0.0;

  std::vector<PointRec> pts_;
  std::vector<Tri> tris_;
  std::vector<SubSeg> subs_;
  std::vector<std::pair<Point2, double>> size_sites_;  // (boundary point, local size)
  int last_tri_ = 0;

  Point2 pos(int i) const { return pts_[i].pos; }

  void add_boundary(const MeasuredBoundary& mb, BoundaryName name);
  void init_super_triangle();
  int locate(Point2 p, int hint, int* blocking_sub) const;
  bool tri_contains(int t, Point2 p) const;

  struct CavityEdge {
    int u, v;        // CCW around the cavity
    int outer;       // triangle on the far side (-1 for hull)
    int outer_edge;  // index of (v,u) in outer
    int sub;
    int label;
  };
  bool compute_cavity(Point2 p, int start, int allow_sub, std::vector<int>& cavity,
                      std::vector<CavityEdge>& boundary) const;
  int insert_point(Point2 p, int start, int allow_sub, const PointRec& rec,
                   std::vector<int>* new_tris);

  void recover_edge(int a, int b, int sub_id);
  void flip(int t, int k);
  void classify();

  double size_at(Point2 p) const;
  bool triangle_is_bad(int t) const;
  double min_angle_rad(int t) const;
  bool sub_is_encroached_by(const SubSeg& s, Point2 p) const;
  int find_sub_triangle(int sid) const;
  bool sub_is_encroached(int sid) const;
  void split_sub(int sid, std::deque<int>& tri_queue, std::deque<int>& sub_queue);
  void refine_to_quality();

  Mesh harvest() const;
};

void Triangulator::add_boundary(const MeasuredBoundary& mb, BoundaryName name) {
  const Polygon& poly =
      mb.polygon().counterclockwise() ? mb.polygon() : mb.polygon().reversed();
  // Masses follow the stored edge order; reversal would scramble them, so
  // require CCW input (constructors always produce CCW boundaries).
  if (!mb.polygon().counterclockwise())
    throw ParameterError("boundary polygons must be counterclockwise");
  int ne = poly.edge_count();
  std::vector<int> first_vertex(ne);
  std::vector<int> pieces(ne);
  for (int e = 0; e < ne; ++e) {
    double len = poly.edge_length(e);
    int n = std::max(1, static_cast<int>(std::ceil(len / h_target_ - 1e-12)));
    pieces[e] = n;
    first_vertex[e] = static_cast<int>(pts_.size());
    for (int i = 0; i < n; ++i) {
      double t = static_cast<double>(i) / n;
      PointRec rec;
      rec.pos = poly.point_on_edge(e, t);
      rec.info = {name == BoundaryName::Gamma ? VertexTag::OnGamma : VertexTag::OnS, e, t};
      rec.boundary = name;
      pts_.push_back(rec);
    }
  }
  for (int e = 0; e < ne; ++e) {
    int n = pieces[e];
    double len = poly.edge_length(e);
    for (int i = 0; i < n; ++i) {
      SubSeg s;
      s.a = first_vertex[e] + i;
      s.b = (i + 1 < n) ? first_vertex[e] + i + 1 : first_vertex[(e + 1) % ne];
      s.boundary = name;
      s.polygon_edge = e;
      s.t0 = static_cast<double>(i) / n;
      s.t1 = static_cast<double>(i + 1) / n;
      s.mass = mb.segment_masses()[e] / n;
      subs_.push_back(s);
    }
    double piece_len = len / n;
    for (int i = 0; i < n; ++i) {
      // Local size: the subdivided piece length (its neighbors on the same
      // edge are equal, and corner mismatch is handled by the min below).
      size_sites_.emplace_back(pts_[first_vertex[e] + i].pos, piece_len);
    }
  }
}

void Triangulator::init_super_triangle() {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : pts_) {
    xmin = std::min(xmin, p.pos.x);
    xmax = std::max(xmax, p.pos.x);
    ymin = std::min(ymin, p.pos.y);
    ymax = std::max(ymax, p.pos.y);
  }
  double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  double big = 64.0 * std::max({xmax - xmin, ymax - ymin, 1e-6});
  coincide_tol_ = 1e-13 * big;
  size_t nb = pts_.size();
  pts_.push_back({{cx - big, cy - big}, {}, BoundaryName::Gamma});
  pts_.push_back({{cx + big, cy - big}, {}, BoundaryName::Gamma});
  pts_.push_back({{cx, cy + big}, {}, BoundaryName::Gamma});
  Tri t;
  t.v = {static_cast<int>(nb), static_cast<int>(nb + 1), static_cast<int>(nb + 2)};
  tris_.push_back(t);
  last_tri_ = 0;
}

bool Triangulator::tri_contains(int t, Point2 p) const {
  const Tri& tr = tris_[t];
  for (int k = 0; k < 3; ++k)
    if (orient_sign(pos(tr.v[k]), pos(tr.v[(k + 1) % 3]), p) < 0) return false;
  return true;
}

int Triangulator::locate(Point2 p, int hint, int* blocking_sub) const {
  if (blocking_sub) *blocking_sub = -1;
  int cur = hint;
  if (cur < 0 || !tris_[cur].alive) cur = last_tri_;
  int steps = 0;
  const int max_steps = static_cast<int>(tris_.size()) * 4 + 64;
  while (steps++ < max_steps) {
    const Tri& tr = tris_[cur];
    int next = -1;
    for (int k = 0; k < 3; ++k) {
      if (orient_sign(pos(tr.v[k]), pos(tr.v[(k + 1) % 3]), p) < 0) {
        if (blocking_sub && tr.sub[k] != -1) {
          *blocking_sub = tr.sub[k];
          return cur;
        }
        next = tr.nb[k];
        break;
      }
    }
    if (next == -1) return cur;
    cur = next;
  }
  // Degenerate walk; fall back to an exhaustive scan.
  for (size_t t = 0; t < tris_.size(); ++t)
    if (tris_[t].alive && tri_contains(static_cast<int>(t), p)) return static_cast<int>(t);
  throw MeshError("point location failed");
}

bool Triangulator::compute_cavity(Point2 p, int start, int allow_sub, std::vector<int>& cavity,
                                  std::vector<CavityEdge>& boundary) const {
  cavity.clear();
  std::vector<int> stack{start};
  std::vector<char> in_cavity(tris_.size(), 0);
  in_cavity[start] = 1;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    cavity.push_back(t);
    const Tri& tr = tris_[t];
    for (int k = 0; k < 3; ++k) {
      int n = tr.nb[k];
      bool crossable = tr.sub[k] == -1 || tr.sub[k] == allow_sub;
      if (n != -1 && crossable && !in_cavity[n]) {
        const Tri& nt = tris_[n];
        if (in_circumcircle(pos(nt.v[0]), pos(nt.v[1]), pos(nt.v[2]), p)) {
          in_cavity[n] = 1;
          stack.push_back(n);
        }
      }
    }
  }

  // The fan triangles (u, v, p) must be strictly counterclockwise; where p
  // is on or beyond a cavity boundary edge (a circumcenter landing exactly
  // on an edge, say), pull the neighbor in too. Refuse if that would cross
  // a constraint.
  auto collect_boundary = [&]() {
    boundary.clear();
    for (int t : cavity) {
      const Tri& tr = tris_[t];
      for (int k = 0; k < 3; ++k) {
        int n = tr.nb[k];
        if (n != -1 && in_cavity[n]) continue;
        CavityEdge e;
        e.u = tr.v[k];
        e.v = tr.v[(k + 1) % 3];
        e.outer = n;
        e.outer_edge = -1;
        if (n != -1)
          for (int j = 0; j < 3; ++j)
            if (tris_[n].nb[j] == t && tris_[n].v[j] == e.v) e.outer_edge = j;
        e.sub = tr.sub[k];
        e.label = tr.label;
        boundary.push_back(e);
      }
    }
  };
  for (;;) {
    collect_boundary();
    bool grew = false;
    for (const auto& e : boundary) {
      if (orient_sign(pos(e.u), pos(e.v), p) > 0) continue;
      bool crossable = e.sub == -1 || e.sub == allow_sub;
      if (e.outer == -1 || !crossable) return false;
      in_cavity[e.outer] = 1;
      cavity.push_back(e.outer);
      grew = true;
      break;
    }
    if (!grew) break;
  }
  return !boundary.empty();
}

int Triangulator::insert_point(Point2 p, int start, int allow_sub, const PointRec& rec,
                               std::vector<int>* new_tris) {
  // Refuse points that coincide with an existing vertex of the start triangle
  // neighborhood; the caller treats a negative id as "nothing inserted".
  std::vector<int> cavity;
  std::vector<CavityEdge> boundary;
  if (!compute_cavity(p, start, allow_sub, cavity, boundary)) return -1;
  for (const auto& e : boundary) {
    if ((pos(e.u) - p).norm() < coincide_tol_ || (pos(e.v) - p).norm() < coincide_tol_) return -1;
  }

  // Order the boundary into a loop around p.
  std::map<int, int> next_from;  // u -> index into boundary
  for (size_t i = 0; i < boundary.size(); ++i) next_from[boundary[i].u] = static_cast<int>(i);
  std::vector<int> loop;
  loop.reserve(boundary.size());
  int cur = 0;
  for (size_t i = 0; i < boundary.size(); ++i) {
    loop.push_back(cur);
    auto it = next_from.find(boundary[cur].v);
    if (it == next_from.end()) throw MeshError("cavity boundary is not a closed loop");
    cur = it->second;
  }
  if (loop.size() != boundary.size()) throw MeshError("cavity boundary is not a single loop");

  int pid = static_cast<int>(pts_.size());
  pts_.push_back(rec);
  pts_.back().pos = p;

  for (int t : cavity) tris_[t].alive = false;
  std::vector<int> created(loop.size());
  for (size_t i = 0; i < loop.size(); ++i) {
    const CavityEdge& e = boundary[loop[i]];
    Tri nt;
    nt.v = {e.u, e.v, pid};
    nt.sub = {e.sub, -1, -1};
    nt.label = e.label;
    created[i] = static_cast<int>(tris_.size());
    tris_.push_back(nt);
  }
  for (size_t i = 0; i < loop.size(); ++i) {
    const CavityEdge& e = boundary[loop[i]];
    Tri& nt = tris_[created[i]];
    nt.nb[0] = e.outer;
    if (e.outer != -1 && e.outer_edge != -1) tris_[e.outer].nb[e.outer_edge] = created[i];
    nt.nb[1] = created[(i + 1) % loop.size()];
    nt.nb[2] = created[(i + loop.size() - 1) % loop.size()];
  }
  last_tri_ = created[0];
  if (new_tris) *new_tris = created;
  return pid;
}

void Triangulator::flip(int t1, int k1) {
  int t2 = tris_[t1].nb[k1];
  int k2 = -1;
  for (int j = 0; j < 3; ++j)
    if (tris_[t2].nb[j] == t1) k2 = j;
  if (k2 == -1) throw MeshError("broken adjacency in flip");
  Tri a = tris_[t1], b = tris_[t2];
  int u = a.v[k1], v = a.v[(k1 + 1) % 3], w = a.v[(k1 + 2) % 3];
  int z = b.v[(k2 + 2) % 3];

  auto adj = [&](const Tri& tr, int k) { return std::pair<int, int>(tr.nb[k], tr.sub[k]); };
  auto [nA, sA] = adj(a, (k1 + 1) % 3);  // edge (v,w)
  auto [nB, sB] = adj(a, (k1 + 2) % 3);  // edge (w,u)
  auto [nC, sC] = adj(b, (k2 + 1) % 3);  // edge (u,z)
  auto [nD, sD] = adj(b, (k2 + 2) % 3);  // edge (z,v)

  Tri na;  // (w, u, z)
  na.v = {w, u, z};
  na.nb = {nB, nC, t2};
  na.sub = {sB, sC, -1};
  na.label = a.label;
  Tri nb2;  // (z, v, w)
  nb2.v = {z, v, w};
  nb2.nb = {nD, nA, t1};
  nb2.sub = {sD, sA, -1};
  nb2.label = b.label;
  tris_[t1] = na;
  tris_[t2] = nb2;

  auto fix_backlink = [&](int n, int old_t, int new_t, int va, int vb) {
    if (n == -1) return;
    for (int j = 0; j < 3; ++j)
      if (tris_[n].nb[j] == old_t && tris_[n].v[j] == va && tris_[n].v[(j + 1) % 3] == vb)
        tris_[n].nb[j] = new_t;
  };
  fix_backlink(nB, t1, t1, u, w);
  fix_backlink(nC, t2, t1, z, u);
  fix_backlink(nA, t1, t2, w, v);
  fix_backlink(nD, t2, t2, v, z);
}

void Triangulator::recover_edge(int a, int b, int sub_id) {
  auto mark_if_present = [&]() -> bool {
    for (size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      for (int k = 0; k < 3; ++k) {
        if ((tris_[t].v[k] == a && tris_[t].v[(k + 1) % 3] == b) ||
            (tris_[t].v[k] == b && tris_[t].v[(k + 1) % 3] == a)) {
          tris_[t].sub[k] = sub_id;
          int n = tris_[t].nb[k];
          if (n != -1)
            for (int j = 0; j < 3; ++j)
              if (tris_[n].nb[j] == static_cast<int>(t)) tris_[n].sub[j] = sub_id;
          return true;
        }
      }
    }
    return false;
  };
  if (mark_if_present()) return;

  Point2 pa = pos(a), pb = pos(b);
  auto crosses = [&](int u, int v) {
    if (u == a || u == b || v == a || v == b) return false;
    Point2 pu = pos(u), pv = pos(v);
    return orient_sign(pa, pb, pu) * orient_sign(pa, pb, pv) < 0 &&
           orient_sign(pu, pv, pa) * orient_sign(pu, pv, pb) < 0;
  };

  int guard = static_cast<int>(tris_.size()) * 40 + 1000;
  while (guard-- > 0) {
    bool flipped = false;
    for (size_t t = 0; t < tris_.size() && !flipped; ++t) {
      if (!tris_[t].alive) continue;
      for (int k = 0; k < 3; ++k) {
        int u = tris_[t].v[k], v = tris_[t].v[(k + 1) % 3];
        if (tris_[t].sub[k] != -1 || tris_[t].nb[k] == -1) continue;
        if (!crosses(u, v)) continue;
        // Flip only strictly convex quads; others become flippable later.
        int w = tris_[t].v[(k + 2) % 3];
        int t2 = tris_[t].nb[k];
        int z = -1;
        for (int j = 0; j < 3; ++j)
          if (tris_[t2].nb[j] == static_cast<int>(t)) z = tris_[t2].v[(j + 2) % 3];
        if (z == -1) continue;
        if (orient_sign(pos(w), pos(u), pos(z)) > 0 && orient_sign(pos(z), pos(v), pos(w)) > 0) {
          flip(static_cast<int>(t), k);
          flipped = true;
          break;
        }
      }
    }
    if (mark_if_present()) return;
    if (!flipped) break;
  }
  throw MeshError("failed to recover a constrained boundary edge");
}

void Triangulator::classify() {
  // Region labels by parity of boundary-loop crossings, walked from the
  // super-triangle region (certainly outside everything).
  int start = -1;
  int super0 = static_cast<int>(pts_.size()) - 3;
  for (size_t t = 0; t < tris_.size() && start == -1; ++t)
    if (tris_[t].alive)
      for (int k = 0; k < 3; ++k)
        if (tris_[t].v[k] >= super0) {
          start = static_cast<int>(t);
          break;
        }
  if (start == -1) throw MeshError("no super-triangle vertex found");

  std::vector<int> bits(tris_.size(), -1);
  std::deque<int> queue{start};
  bits[start] = 0;
  while (!queue.empty()) {
    int t = queue.front();
    queue.pop_front();
    for (int k = 0; k < 3; ++k) {
      int n = tris_[t].nb[k];
      if (n == -1 || !tris_[n].alive || bits[n] != -1) continue;
      int mask = 0;
      if (tris_[t].sub[k] != -1)
        mask = subs_[tris_[t].sub[k]].boundary == BoundaryName::Gamma ? 1 : 2;
      bits[n] = bits[t] ^ mask;
      queue.push_back(n);
    }
  }
  bool truncated = domain_.kind == DomainKind::Truncated;
  for (size_t t = 0; t < tris_.size(); ++t) {
    if (!tris_[t].alive) continue;
    if (bits[t] == -1) throw MeshError("unreachable triangle during classification");
    int in_gamma = bits[t] & 1, in_s = (bits[t] >> 1) & 1;
    if (truncated)
      tris_[t].label = (in_s && !in_gamma) ? 1 : (in_gamma ? 2 : 0);
    else
      tris_[t].label = in_gamma ? 1 : 0;
  }
}

double Triangulator::size_at(Point2 p) const {
  double s = h_target_;
  for (const auto& [q, h] : size_sites_) {
    double cand = h + kGrading * (p - q).norm();
    if (cand < s) s = cand;
  }
  return s;
}

double Triangulator::min_angle_rad(int t) const {
  const Tri& tr = tris_[t];
  Point2 a = pos(tr.v[0]), b = pos(tr.v[1]), c = pos(tr.v[2]);
  double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  double best = 1e300;
  auto angle = [](double opp, double s1, double s2) {
    double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2);
    return std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  best = std::min(best, angle(la, lb, lc));
  best = std::min(best, angle(lb, lc, la));
  best = std::min(best, angle(lc, la, lb));
  return best;
}

bool Triangulator::triangle_is_bad(int t) const {
  const Tri& tr = tris_[t];
  if (!tr.alive || tr.label != 1) return false;
  Point2 a = pos(tr.v[0]), b = pos(tr.v[1]), c = pos(tr.v[2]);
  double longest = std::max({(b - c).norm(), (c - a).norm(), (a - b).norm()});
  Point2 centroid = (a + b + c) * (1.0 / 3.0);
  if (longest > size_at(centroid)) return true;
  return min_angle_rad(t) < kMinAngleDeg * M_PI / 180.0 - 1e-12;
}

bool Triangulator::sub_is_encroached_by(const SubSeg& s, Point2 p) const {
  Point2 a = pos(s.a), b = pos(s.b);
  return (a - p).dot(b - p) < -1e-30;
}

int Triangulator::find_sub_triangle(int sid) const {
  const SubSeg& s = subs_[sid];
  Point2 mid = (pos(s.a) + pos(s.b)) * 0.5;
  int t = locate(mid, last_tri_, nullptr);
  // The located triangle (or one of its neighbors / their neighbors) carries
  // the subsegment; fall back to a full scan only if the walk went astray.
  std::vector<int> ring{t};
  for (int k = 0; k < 3; ++k)
    if (tris_[t].nb[k] != -1) ring.push_back(tris_[t].nb[k]);
  for (int cand : ring)
    for (int k = 0; k < 3; ++k)
      if (tris_[cand].alive && tris_[cand].sub[k] == sid) return cand;
  for (size_t i = 0; i < tris_.size(); ++i)
    if (tris_[i].alive)
      for (int k = 0; k < 3; ++k)
        if (tris_[i].sub[k] == sid) return static_cast<int>(i);
  throw MeshError("subsegment lost from the triangulation");
}

bool Triangulator::sub_is_encroached(int sid) const {
  // In a CDT it suffices to test the apexes of the (at most two) triangles
  // adjacent to the subsegment.
  const SubSeg& s = subs_[sid];
  int t = find_sub_triangle(sid);
  for (int side = 0; side < 2; ++side) {
    for (int k = 0; k < 3; ++k)
      if (tris_[t].sub[k] == sid) {
        if (sub_is_encroached_by(s, pos(tris_[t].v[(k + 2) % 3]))) return true;
        if (side == 0) {
          int n = tris_[t].nb[k];
          if (n == -1 || !tris_[n].alive) return false;
          t = n;
        }
        break;
      }
  }
  return false;
}

void Triangulator::split_sub(int sid, std::deque<int>& tri_queue, std::deque<int>& sub_queue) {
  SubSeg& s = subs_[sid];
  if (!s.alive) return;
  double tm = 0.5 * (s.t0 + s.t1);
  const MeasuredBoundary& mb =
      s.boundary == BoundaryName::Gamma ? domain_.gamma : *domain_.s;
  Point2 p = mb.polygon().point_on_edge(s.polygon_edge, tm);

  PointRec rec;
  rec.pos = p;
  rec.info = {s.boundary == BoundaryName::Gamma ? VertexTag::OnGamma : VertexTag::OnS,
              s.polygon_edge, tm};
  rec.boundary = s.boundary;

  int hint = find_sub_triangle(sid);

  std::vector<int> created;
  int pid = insert_point(p, hint, sid, rec, &created);
  if (pid < 0) return;  // midpoint coincides with an existing vertex

  s.alive = false;
  SubSeg s1 = s, s2 = s;
  s1.b = pid;
  s1.t1 = tm;
  s1.mass = s.mass / 2;
  s2.a = pid;
  s2.t0 = tm;
  s2.mass = s.mass / 2;
  int id1 = static_cast<int>(subs_.size());
  subs_.push_back(s1);
  int id2 = static_cast<int>(subs_.size());
  subs_.push_back(s2);

  for (int t : created) {
    for (int k = 0; k < 3; ++k) {
      int u = tris_[t].v[k], v = tris_[t].v[(k + 1) % 3];
      if ((u == s.a && v == pid) || (u == pid && v == s.a)) tris_[t].sub[k] = id1;
      if ((u == s.b && v == pid) || (u == pid && v == s.b)) tris_[t].sub[k] = id2;
    }
    tri_queue.push_back(t);
  }
  sub_queue.push_back(id1);
  sub_queue.push_back(id2);
}

void Triangulator::refine_to_quality() {
  std::deque<int> tri_queue;
  std::deque<int> sub_queue;
  for (size_t t = 0; t < tris_.size(); ++t)
    if (tris_[t].alive && tris_[t].label == 1) tri_queue.push_back(static_cast<int>(t));
  for (size_t s = 0; s < subs_.size(); ++s) sub_queue.push_back(static_cast<int>(s));

  long budget = 4000000;
  while ((!tri_queue.empty() || !sub_queue.empty()) && budget-- > 0) {
    if (!sub_queue.empty()) {
      int sid = sub_queue.front();
      sub_queue.pop_front();
      if (subs_[sid].alive && sub_is_encroached(sid)) split_sub(sid, tri_queue, sub_queue);
      continue;
    }
    int t = tri_queue.front();
    tri_queue.pop_front();
    if (!triangle_is_bad(t)) continue;

    Point2 c = circumcenter(pos(tris_[t].v[0]), pos(tris_[t].v[1]), pos(tris_[t].v[2]));
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) continue;
    int blocking = -1;
    int loc = locate(c, t, &blocking);
    if (blocking != -1) {
      split_sub(blocking, tri_queue, sub_queue);
      tri_queue.push_back(t);
      continue;
    }
    if (!tris_[loc].alive || tris_[loc].label != 1) continue;

    std::vector<int> cavity;
    std::vector<CavityEdge> boundary;
    compute_cavity(c, loc, -1, cavity, boundary);
    std::vector<int> encroached;
    for (const auto& e : boundary)
      if (e.sub != -1 && subs_[e.sub].alive && sub_is_encroached_by(subs_[e.sub], c))
        encroached.push_back(e.sub);
    if (!encroached.empty()) {
      std::sort(encroached.begin(), encroached.end());
      encroached.erase(std::unique(encroached.begin(), encroached.end()), encroached.end());
      for (int sid : encroached) split_sub(sid, tri_queue, sub_queue);
      tri_queue.push_back(t);
      continue;
    }

    PointRec rec;
    rec.pos = c;
    rec.info = {VertexTag::Interior, -1, 0.0};
    std::vector<int> created;
    if (insert_point(c, loc, -1, rec, &created) >= 0)
      for (int nt : created) tri_queue.push_back(nt);
  }

  double achieved = 1e300;
  for (size_t t = 0; t < tris_.size(); ++t)
    if (tris_[t].alive && tris_[t].label == 1)
      achieved = std::min(achieved, min_angle_rad(t) * 180.0 / M_PI);
  if (budget <= 0 && achieved < kMinAngleDeg - 1e-9)
    throw MeshQualityError("refinement budget exhausted before reaching the angle bound",
                           achieved);
}

Mesh Triangulator::harvest() const {
  Mesh mesh;
  mesh.domain = domain_;
  std::vector<int> remap(pts_.size(), -1);
  std::vector<char> used(pts_.size(), 0);
  for (const auto& tr : tris_)
    if (tr.alive && tr.label == 1)
      for (int k = 0; k < 3; ++k) used[tr.v[k]] = 1;
  // Vertex numbering follows insertion order for determinism.
  for (size_t i = 0; i < pts_.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(pts_[i].pos);
    mesh.vertex_info.push_back(pts_[i].info);
  }
  for (size_t t = 0; t < tris_.size(); ++t) {
    if (!tris_[t].alive || tris_[t].label != 1) continue;
    std::array<int, 3> tv{remap[tris_[t].v[0]], remap[tris_[t].v[1]], remap[tris_[t].v[2]]};
    // Rotate so the smallest index leads; keeps orientation, makes output stable.
    int lead = 0;
    for (int k = 1; k < 3; ++k)
      if (tv[k] < tv[lead]) lead = k;
    mesh.triangles.push_back({tv[lead], tv[(lead + 1) % 3], tv[(lead + 2) % 3]});
  }
  std::sort(mesh.triangles.begin(), mesh.triangles.end());

  for (const auto& s : subs_) {
    if (!s.alive) continue;
    BoundaryEdge e;
    e.v0 = remap[s.a];
    e.v1 = remap[s.b];
    e.boundary = s.boundary;
    e.polygon_edge = s.polygon_edge;
    e.mass_share = s.mass;
    if (e.v0 == -1 || e.v1 == -1) throw MeshError("boundary subsegment lost its vertices");
    mesh.boundary_edges.push_back(e);
  }
  std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
            [](const BoundaryEdge& a, const BoundaryEdge& b) {
              auto ka = std::tuple(static_cast<int>(a.boundary), a.polygon_edge, a.v0, a.v1);
              auto kb = std::tuple(static_cast<int>(b.boundary), b.polygon_edge, b.v0, b.v1);
              return ka < kb;
            });
  return mesh;
}

Mesh Triangulator::build() {
  add_boundary(domain_.gamma, BoundaryName::Gamma);
  if (domain_.kind == DomainKind::Truncated) add_boundary(*domain_.s, BoundaryName::S);
  size_t n_fixed = pts_.size();
  init_super_triangle();

  for (size_t i = 0; i < n_fixed; ++i) {
    PointRec rec = pts_[i];
    // Points were pre-registered; insert them by index order. insert_point
    // appends a record, so temporarily pop and re-add through it.
    std::vector<int> created;
    int blocking = -1;
    int loc = locate(rec.pos, last_tri_, &blocking);
    std::vector<int> cavity;
    std::vector<CavityEdge> boundary;
    compute_cavity(rec.pos, loc, -1, cavity, boundary);

    // Manual fan construction mirroring insert_point but reusing slot i.
    std::map<int, int> next_from;
    for (size_t k = 0; k < boundary.size(); ++k) next_from[boundary[k].u] = static_cast<int>(k);
    std::vector<int> loop;
    int cur = 0;
    for (size_t k = 0; k < boundary.size(); ++k) {
      loop.push_back(cur);
      auto it = next_from.find(boundary[cur].v);
      if (it == next_from.end()) throw MeshError("cavity boundary is not a closed loop");
      cur = it->second;
    }
    for (int t : cavity) tris_[t].alive = false;
    std::vector<int> created_ids(loop.size());
    for (size_t k = 0; k < loop.size(); ++k) {
      const CavityEdge& e = boundary[loop[k]];
      Tri nt;
      nt.v = {e.u, e.v, static_cast<int>(i)};
      nt.sub = {e.sub, -1, -1};
      created_ids[k] = static_cast<int>(tris_.size());
      tris_.push_back(nt);
    }
    for (size_t k = 0; k < loop.size(); ++k) {
      const CavityEdge& e = boundary[loop[k]];
      Tri& nt = tris_[created_ids[k]];
      nt.nb[0] = e.outer;
      if (e.outer != -1 && e.outer_edge != -1) tris_[e.outer].nb[e.outer_edge] = created_ids[k];
      nt.nb[1] = created_ids[(k + 1) % loop.size()];
      nt.nb[2] = created_ids[(k + loop.size() - 1) % loop.size()];
    }
    last_tri_ = created_ids[0];
  }

  for (size_t s = 0; s < subs_.size(); ++s)
    recover_edge(subs_[s].a, subs_[s].b, static_cast<int>(s));
  classify();
  refine_to_quality();
  return harvest();
}

}  // namespace

Mesh triangulate(const DomainSpec& domain, double h_target) {
  if (!(h_target > 0.0)) throw ParameterError("h_target must be positive");
  if (domain.kind == DomainKind::Truncated && h_target > domain.clearance / 2.0)
    throw ParameterError("h_target must be at most half the Gamma-S clearance");
  double diam = domain.kind == DomainKind::Truncated ? domain.s->polygon().diameter()
                                                     : domain.gamma.polygon().diameter();
  if (h_target >= diam) throw ParameterError("h_target too large relative to the geometry");
  Triangulator tr(domain, h_target);
  return tr.build();
}

}  // namespace steklov
