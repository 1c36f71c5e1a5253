#pragma once

// Exact E min_j |X - s_j| for X ~ U[0,1]^2: each Voronoi cell is clipped
// to the square and integrated in polar coordinates around its site.

#include <cmath>
#include <vector>

namespace otgeo::testing {

struct Pt {
  double x, y;
};

// Keeps {p : a.p <= b}.
inline std::vector<Pt> clip(const std::vector<Pt>& poly, double ax, double ay, double b) {
  std::vector<Pt> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % m];
    const double fp = ax * p.x + ay * p.y - b;
    const double fq = ax * q.x + ay * q.y - b;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

// Integral of |x| over the triangle (0, a, b).
inline double triangle_radial_integral(Pt a, Pt b) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double len = std::hypot(ex, ey);
  if (len == 0.0) return 0.0;
  const double ux = ex / len, uy = ey / len;
  const double along = a.x * ux + a.y * uy;
  const double px = a.x - along * ux, py = a.y - along * uy;  // foot of the perpendicular
  const double h = std::hypot(px, py);
  if (h < 1e-300) return 0.0;
  const double ta = ((a.x - px) * ux + (a.y - py) * uy) / h;
  const double tb = ((b.x - px) * ux + (b.y - py) * uy) / h;
  // antiderivative of sec^3 in terms of t = tan(phi)
  auto F = [](double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); };
  return h * h * h / 3.0 * std::abs(F(tb) - F(ta));
}

inline double voronoi_mean_distance_unit_square(const std::vector<Pt>& sites) {
  double total = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<Pt> cell{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Pt s = sites[i];
    for (std::size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
      if (j == i) continue;
      const Pt t = sites[j];
      const double ax = t.x - s.x, ay = t.y - s.y;
      if (ax == 0.0 && ay == 0.0) {
        if (j < i) cell.clear();  // duplicate site: lower index owns the cell
        continue;
      }
      cell = clip(cell, ax, ay, 0.5 * (t.x * t.x + t.y * t.y - s.x * s.x - s.y * s.y));
    }
    for (std::size_t k = 0; k < cell.size(); ++k) {
      const Pt a{cell[k].x - s.x, cell[k].y - s.y};
      const Pt b{cell[(k + 1) % cell.size()].x - s.x, cell[(k + 1) % cell.size()].y - s.y};
      total += triangle_radial_integral(a, b);
    }
  }
  return total;
}

}  // namespace otgeo::testing
