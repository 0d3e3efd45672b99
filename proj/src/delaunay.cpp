#include "delaunay.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace wplap::detail {

namespace {

using LD = long double;

LD orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (static_cast<LD>(b.x()) - a.x()) * (static_cast<LD>(c.y()) - a.y()) -
         (static_cast<LD>(b.y()) - a.y()) * (static_cast<LD>(c.x()) - a.x());
}

// Positive when d lies inside the circumcircle of the counterclockwise triangle abc.
LD incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const LD adx = static_cast<LD>(a.x()) - d.x(), ady = static_cast<LD>(a.y()) - d.y();
  const LD bdx = static_cast<LD>(b.x()) - d.x(), bdy = static_cast<LD>(b.y()) - d.y();
  const LD cdx = static_cast<LD>(c.x()) - d.x(), cdy = static_cast<LD>(c.y()) - d.y();
  const LD ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

bool encroaches(const Vec2& q, const Vec2& a, const Vec2& b) { return (q - a).dot(q - b) < 0.0; }

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[i] is across the edge opposite v[i]
  bool alive = true;
};

class Triangulation {
public:
  explicit Triangulation(const std::pair<Vec2, Vec2>& box) {
    const Vec2 c = 0.5 * (box.first + box.second);
    const double span = std::max((box.second - box.first).maxCoeff(), 1e-300);
    const double big = 50.0 * span;
    pts_.push_back(c + Vec2(-big, -big));
    pts_.push_back(c + Vec2(big, -big));
    pts_.push_back(c + Vec2(0.0, big));
    flags_.assign(3, 0);
    vtri_.assign(3, 0);
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
    stamp_.push_back(0);
  }

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }
  const std::vector<char>& flags() const { return flags_; }
  bool is_super(int v) const { return v < 3; }

  int insert(const Vec2& p, bool boundary, std::vector<int>* created) {
    const int t0 = locate(p);
    for (int v : tris_[t0].v) {
      if ((pts_[v] - p).norm() <= 1e-13 * std::max(1.0, p.norm())) return v;
    }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    flags_.push_back(boundary ? 1 : 0);
    vtri_.push_back(-1);

    ++epoch_;
    std::vector<int> cavity{t0};
    stamp_[t0] = epoch_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      for (int nb : tris_[cavity[k]].n) {
        if (nb < 0 || stamp_[nb] == epoch_) continue;
        const auto& v = tris_[nb].v;
        if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0) {
          stamp_[nb] = epoch_;
          cavity.push_back(nb);
        }
      }
    }
    // Keep the cavity star-shaped with respect to p.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = 1; k < cavity.size(); ++k) {
        const Tri& t = tris_[cavity[k]];
        bool bad = false;
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb >= 0 && stamp_[nb] == epoch_) continue;
          if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) <= 0) bad = true;
        }
        if (bad) {
          stamp_[cavity[k]] = epoch_ - 1;
          cavity.erase(cavity.begin() + static_cast<std::ptrdiff_t>(k));
          changed = true;
          break;
        }
      }
    }

    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> fresh;
    for (int ct : cavity) {
      const Tri old = tris_[ct];
      for (int i = 0; i < 3; ++i) {
        const int nb = old.n[i];
        if (nb >= 0 && stamp_[nb] == epoch_) continue;
        const int a = old.v[(i + 1) % 3], b = old.v[(i + 2) % 3];
        const int nt = static_cast<int>(tris_.size());
        tris_.push_back(Tri{{a, b, id}, {-1, -1, nb}, true});
        stamp_.push_back(0);
        if (nb >= 0) {
          for (int& back : tris_[nb].n) {
            if (back == ct) back = nt;
          }
        }
        by_start[a] = nt;
        by_end[b] = nt;
        fresh.push_back(nt);
      }
    }
    for (int ct : cavity) tris_[ct].alive = false;
    for (int nt : fresh) {
      Tri& t = tris_[nt];
      // Opposite a: edge (b, p), shared with the new triangle starting at b.
      t.n[0] = by_start.at(t.v[1]);
      // Opposite b: edge (p, a), shared with the new triangle ending at a.
      t.n[1] = by_end.at(t.v[0]);
      for (int v : t.v) vtri_[v] = nt;
    }
    last_ = fresh.empty() ? last_ : fresh.back();
    if (created) created->insert(created->end(), fresh.begin(), fresh.end());
    return id;
  }

  // Triangles sharing the edge (a, b); -1 entries when absent.
  std::array<int, 2> edge_triangles(int a, int b) const {
    std::array<int, 2> out{-1, -1};
    int found = 0;
    const int start = vtri_[a];
    int t = start;
    for (std::size_t guard = 0; guard < tris_.size() + 3; ++guard) {
      const Tri& tr = tris_[t];
      int i = 0;
      while (tr.v[i] != a) ++i;
      if (tr.v[(i + 1) % 3] == b || tr.v[(i + 2) % 3] == b) {
        if (found < 2) out[found++] = t;
      }
      const int next = tr.n[(i + 2) % 3];
      if (next < 0 || next == start) break;
      t = next;
    }
    return out;
  }

private:
  int locate(const Vec2& p) {
    int t = (last_ >= 0 && tris_[last_].alive) ? last_ : any_alive();
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tr = tris_[t];
      int move = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) < 0) {
          move = tr.n[i];
          break;
        }
      }
      if (move < 0) return t;
      t = move;
    }
    // Walking cycled on near-degenerate input: fall back to a scan.
    for (std::size_t k = 0; k < tris_.size(); ++k) {
      const Tri& tr = tris_[k];
      if (!tr.alive) continue;
      if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
          orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0) {
        return static_cast<int>(k);
      }
    }
    raise(ErrorKind::mesh, "mesh_generate: point location failed");
  }

  int any_alive() const {
    for (std::size_t k = tris_.size(); k-- > 0;) {
      if (tris_[k].alive) return static_cast<int>(k);
    }
    return 0;
  }

  std::vector<Vec2> pts_;
  std::vector<char> flags_;
  std::vector<int> vtri_;
  std::vector<Tri> tris_;
  std::vector<unsigned> stamp_;
  unsigned epoch_ = 0;
  int last_ = -1;
};

}  // namespace

RefinedMesh refine_polygon(const PolygonalDomain& domain, const std::function<double(const Vec2&)>& size,
                           std::size_t max_vertices) {
  Triangulation tri(domain.bounding_box());
  const auto& poly = domain.vertices();
  std::vector<int> ids;
  for (const auto& v : poly) ids.push_back(tri.insert(v, true, nullptr));

  std::vector<std::array<int, 2>> segs;
  std::vector<char> seg_alive;
  // Pre-split edges to the target size.
  std::function<void(int, int)> add_segment = [&](int a, int b) {
    const Vec2 pa = tri.points()[a], pb = tri.points()[b];
    const double len = (pb - pa).norm();
    if (len > std::min(size(pa), size(pb))) {
      const int m = tri.insert(0.5 * (pa + pb), true, nullptr);
      add_segment(a, m);
      add_segment(m, b);
      return;
    }
    segs.push_back({a, b});
    seg_alive.push_back(1);
  };
  for (std::size_t i = 0; i < ids.size(); ++i) add_segment(ids[i], ids[(i + 1) % ids.size()]);

  std::deque<int> bad;
  auto push_all = [&] {
    for (std::size_t t = 0; t < tri.tris().size(); ++t) {
      if (tri.tris()[t].alive) bad.push_back(static_cast<int>(t));
    }
  };
  auto check_limit = [&] {
    if (tri.points().size() > max_vertices) {
      raise(ErrorKind::mesh, "mesh_generate: vertex budget exhausted (polygon angles too small?)");
    }
  };

  std::vector<int> created;
  auto split_segment = [&](std::size_t s) {
    const auto [a, b] = segs[s];
    seg_alive[s] = 0;
    const Vec2 m = 0.5 * (tri.points()[a] + tri.points()[b]);
    const int id = tri.insert(m, true, &created);
    segs.push_back({a, id});
    segs.push_back({id, b});
    seg_alive.push_back(1);
    seg_alive.push_back(1);
    check_limit();
  };

  // Split until every segment is an edge with an empty diametral circle.
  auto fix_segments = [&] {
    for (bool again = true; again;) {
      again = false;
      for (std::size_t s = 0; s < segs.size(); ++s) {
        if (!seg_alive[s]) continue;
        const auto [a, b] = segs[s];
        const auto et = tri.edge_triangles(a, b);
        bool split = et[0] < 0;
        for (int t : et) {
          if (t < 0 || split) continue;
          for (int v : tri.tris()[t].v) {
            if (v != a && v != b && encroaches(tri.points()[v], tri.points()[a], tri.points()[b])) split = true;
          }
        }
        if (split) {
          split_segment(s);
          again = true;
        }
      }
    }
  };

  fix_segments();
  created.clear();
  push_all();
  const double ratio_bound = std::sqrt(2.0) * (1.0 + 1e-9);

  while (true) {
    while (!bad.empty()) {
      const int t = bad.front();
      bad.pop_front();
      const Tri& tr = tri.tris()[t];
      if (!tr.alive) continue;
      if (tri.is_super(tr.v[0]) || tri.is_super(tr.v[1]) || tri.is_super(tr.v[2])) continue;
      const Vec2 a = tri.points()[tr.v[0]], b = tri.points()[tr.v[1]], c = tri.points()[tr.v[2]];
      const Vec2 g = (a + b + c) / 3.0;
      if (!domain.contains(g)) continue;
      const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
      const double lmin = std::min({la, lb, lc}), lmax = std::max({la, lb, lc});
      const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
      const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
      const Vec2 cc((a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
                    (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d);
      const double circ = (cc - a).norm();
      const bool too_big = lmax > size(g);
      const bool skinny = circ / lmin > ratio_bound;
      if (!too_big && !skinny) continue;

      std::vector<std::size_t> hit;
      for (std::size_t s = 0; s < segs.size(); ++s) {
        if (seg_alive[s] && encroaches(cc, tri.points()[segs[s][0]], tri.points()[segs[s][1]])) hit.push_back(s);
      }
      created.clear();
      if (!hit.empty()) {
        for (std::size_t s : hit) split_segment(s);
        bad.push_back(t);
      } else if (domain.contains(cc)) {
        tri.insert(cc, false, &created);
        check_limit();
      } else {
        continue;
      }
      // New points may encroach other segments.
      fix_segments();
      bad.insert(bad.end(), created.begin(), created.end());
    }
    // Final sweep: all segments present and triangles acceptable.
    const std::size_t count = tri.points().size();
    fix_segments();
    if (tri.points().size() == count) break;
    push_all();
  }

  RefinedMesh out;
  std::vector<int> remap(tri.points().size(), -1);
  for (const auto& tr : tri.tris()) {
    if (!tr.alive || tri.is_super(tr.v[0]) || tri.is_super(tr.v[1]) || tri.is_super(tr.v[2])) continue;
    const Vec2 g = (tri.points()[tr.v[0]] + tri.points()[tr.v[1]] + tri.points()[tr.v[2]]) / 3.0;
    if (!domain.contains(g)) continue;
    std::array<int, 3> t{};
    for (int i = 0; i < 3; ++i) {
      const int v = tr.v[i];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(tri.points()[v]);
        out.boundary.push_back(tri.flags()[v]);
      }
      t[i] = remap[v];
    }
    out.triangles.push_back(t);
  }
  return out;
}

}  // namespace wplap::detail
