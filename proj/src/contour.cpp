#include "cmnls/contour.hpp"

#include <array>
#include <unordered_map>

namespace cmnls {

namespace {

struct Segment {
  long e0, e1;
  bool used = false;
};

}  // namespace

std::vector<Polyline> marching_squares(const std::vector<double>& f, std::size_t nx,
                                       std::size_t ny, const Box& box) {
  std::vector<Polyline> out;
  if (nx < 2 || ny < 2) return out;
  const double dx = (box.re_max - box.re_min) / double(nx - 1);
  const double dy = (box.im_max - box.im_min) / double(ny - 1);
  auto val = [&](std::size_t ix, std::size_t iy) { return f[iy * nx + ix]; };
  auto node = [&](std::size_t ix, std::size_t iy) {
    return cplx(box.re_min + dx * double(ix), box.im_min + dy * double(iy));
  };
  // edge ids: 2*(iy*nx+ix) horizontal from (ix,iy), +1 vertical from (ix,iy)
  auto hedge = [&](std::size_t ix, std::size_t iy) { return 2 * long(iy * nx + ix); };
  auto vedge = [&](std::size_t ix, std::size_t iy) { return 2 * long(iy * nx + ix) + 1; };
  std::unordered_map<long, cplx> where;
  auto crossing = [&](long id) -> cplx {
    auto it = where.find(id);
    if (it != where.end()) return it->second;
    const std::size_t base = static_cast<std::size_t>(id / 2);
    const std::size_t ix = base % nx, iy = base / nx;
    const std::size_t jx = id % 2 ? ix : ix + 1, jy = id % 2 ? iy + 1 : iy;
    const double a = val(ix, iy), b = val(jx, jy);
    const double s = a == b ? 0.5 : a / (a - b);
    const cplx p = node(ix, iy) + s * (node(jx, jy) - node(ix, iy));
    where.emplace(id, p);
    return p;
  };

  std::vector<Segment> segs;
  for (std::size_t iy = 0; iy + 1 < ny; ++iy)
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      const double c[4] = {val(ix, iy), val(ix + 1, iy), val(ix + 1, iy + 1), val(ix, iy + 1)};
      const bool in[4] = {c[0] >= 0, c[1] >= 0, c[2] >= 0, c[3] >= 0};
      // bottom, right, top, left
      const std::array<long, 4> e{hedge(ix, iy), vedge(ix + 1, iy), hedge(ix, iy + 1),
                                  vedge(ix, iy)};
      const bool cross[4] = {in[0] != in[1], in[1] != in[2], in[3] != in[2], in[0] != in[3]};
      std::vector<long> hit;
      for (int n = 0; n < 4; ++n)
        if (cross[n]) hit.push_back(e[n]);
      if (hit.size() == 2) {
        segs.push_back({hit[0], hit[1]});
      } else if (hit.size() == 4) {
        const bool centre = (c[0] + c[1] + c[2] + c[3]) >= 0;
        if (centre == in[0]) {
          segs.push_back({e[0], e[1]});
          segs.push_back({e[2], e[3]});
        } else {
          segs.push_back({e[0], e[3]});
          segs.push_back({e[1], e[2]});
        }
      }
    }

  std::unordered_multimap<long, std::size_t> by_edge;
  for (std::size_t n = 0; n < segs.size(); ++n) {
    by_edge.emplace(segs[n].e0, n);
    by_edge.emplace(segs[n].e1, n);
  }
  auto next_seg = [&](long edge, std::size_t from) -> long {
    auto [lo, hi] = by_edge.equal_range(edge);
    for (auto it = lo; it != hi; ++it)
      if (it->second != from && !segs[it->second].used) return static_cast<long>(it->second);
    return -1;
  };
  auto degree = [&](long edge) { return by_edge.count(edge); };

  auto walk = [&](std::size_t start, long first_edge) {
    Polyline pl;
    long edge = first_edge;
    std::size_t cur = start;
    pl.points.push_back(crossing(edge));
    for (;;) {
      segs[cur].used = true;
      edge = segs[cur].e0 == edge ? segs[cur].e1 : segs[cur].e0;
      pl.points.push_back(crossing(edge));
      const long nxt = next_seg(edge, cur);
      if (nxt < 0) break;
      cur = static_cast<std::size_t>(nxt);
    }
    pl.closed = pl.points.size() > 2 && edge == first_edge;
    out.push_back(std::move(pl));
  };
  for (std::size_t n = 0; n < segs.size(); ++n) {
    if (segs[n].used) continue;
    if (degree(segs[n].e0) == 1)
      walk(n, segs[n].e0);
    else if (degree(segs[n].e1) == 1)
      walk(n, segs[n].e1);
  }
  for (std::size_t n = 0; n < segs.size(); ++n)
    if (!segs[n].used) walk(n, segs[n].e0);
  return out;
}

}  // namespace cmnls
