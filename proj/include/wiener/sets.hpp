#ifndef WIENER_SETS_HPP
#define WIENER_SETS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "wiener/error.hpp"
#include "wiener/geometry.hpp"
#include "wiener/kernels.hpp"

namespace wiener {

struct Ball {
  Point center;
  double radius = 1.0;
};

/// Points of the blocks k_lo..k_hi with colatitude <= alpha_sub
/// (alpha_sub >= the boundary colatitude means the whole cone).
struct ShellSector {
  int k_lo = 0;
  int k_hi = 0;
  double alpha_sub = std::numbers::pi;
};

/// Balls of a fixed radius centred on the axis at r = 2^k, k_lo <= k <= k_hi.
struct AxisBeads {
  double radius = 1.0;
  int k_lo = 0;
  int k_hi = 0;
};

struct ExplicitPoints {
  std::vector<Point> points;
  std::vector<double> h;
};

/// Non-tangential cone with vertex at a lateral boundary point Q: points P
/// with |P - Q| <= reach whose direction P - Q makes an angle <= half_angle
/// with the inward normal at Q.
struct BoundaryCone {
  Point Q;
  double half_angle = std::numbers::pi / 4;
  double reach = 1.0;
};

/// Quadratic tangential cusp at a lateral boundary point Q:
/// dist(P, boundary) <= |P - Q|^2, |P - Q| <= reach.
struct BoundaryCusp {
  Point Q;
  double reach = 1.0;
};

using Primitive =
    std::variant<Ball, ShellSector, AxisBeads, ExplicitPoints, BoundaryCone, BoundaryCusp>;

struct SetSpec {
  std::string name;
  std::vector<Primitive> shapes;
};

/// floor(log2 r).
inline int block_index(double r) {
  if (!(r > 0.0)) throw DomainError("block_index: r must be positive");
  int e = 0;
  const double m = std::frexp(r, &e);  // r = m 2^e, m in [0.5, 1)
  (void)m;
  return e - 1;
}
inline int block_index(const Point& p) { return block_index(p.r); }

struct Block {
  std::vector<Point> points;
  std::vector<double> h;
  bool coarsened = false;
  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

struct BlockDecomposition {
  int k_min = 0;
  int k_max = 0;
  double resolution = 0.25;
  std::map<int, Block> blocks;
  std::vector<std::string> warnings;

  std::size_t total_points() const {
    std::size_t s = 0;
    for (const auto& [k, b] : blocks) s += b.size();
    return s;
  }
  bool any_coarsened() const {
    return std::any_of(blocks.begin(), blocks.end(),
                       [](const auto& kv) { return kv.second.coarsened; });
  }
};

namespace detail {

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Inward unit normal of the lateral boundary at Q (direction of decreasing |theta_1|).
inline std::vector<double> inward_normal(const Point& Q) {
  Point a = Q, b = Q;
  const double eps = 1e-6;
  const double sgn = Q.colatitude() >= 0.0 ? 1.0 : -1.0;
  a.theta[0] -= sgn * eps;
  b.theta[0] += sgn * eps;
  a.r = b.r = 1.0;
  auto xa = to_cartesian(a), xb = to_cartesian(b);
  std::vector<double> n(xa.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = xa[i] - xb[i];
  const double l = norm(n);
  for (double& v : n) v /= l;
  return n;
}

/// Orthonormal basis of the complement of a unit vector.
inline std::vector<std::vector<double>> complement_basis(const std::vector<double>& nrm) {
  const std::size_t n = nrm.size();
  std::vector<std::vector<double>> out;
  for (std::size_t e = 0; e < n && out.size() + 1 < n; ++e) {
    std::vector<double> v(n, 0.0);
    v[e] = 1.0;
    auto proj = [&](const std::vector<double>& u) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += v[i] * u[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
    };
    proj(nrm);
    for (const auto& u : out) proj(u);
    const double l = norm(v);
    if (l < 1e-8) continue;
    for (double& x : v) x /= l;
    out.push_back(v);
  }
  return out;
}

/// Calls f(x) for every lattice point anchor + (i + 1/2) h e_j in the cube
/// |x - anchor|_inf <= half_width.
inline void for_each_lattice(const std::vector<double>& anchor, double half_width, double h,
                             const std::function<void(const std::vector<double>&)>& f) {
  const std::size_t n = anchor.size();
  const long m = static_cast<long>(std::ceil(half_width / h));
  std::vector<long> idx(n, -m);
  std::vector<double> x(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = anchor[i] + (double(idx[i]) + 0.5) * h;
    f(x);
    std::size_t d = 0;
    while (d < n && ++idx[d] >= m) {
      idx[d] = -m;
      ++d;
    }
    if (d == n) break;
  }
}

/// Lattice points of the ball |x - c| <= R: interior lattice points up to
/// R - h/2, plus lattice points of the skin R - h/2 < |x - c| <= R + h/2
/// projected radially onto the sphere and thinned to spacing >= h. Skin points
/// closer than R + h/2 to one of the centres in `others` are dropped.
inline void sample_ball(const std::vector<double>& c, double R, double h,
                        const std::vector<std::vector<double>>& others,
                        const std::function<void(const std::vector<double>&)>& f) {
  const std::size_t n = c.size();
  std::vector<double> anchor(n);
  for (std::size_t i = 0; i < n; ++i) anchor[i] = std::round(c[i] / h) * h;
  std::map<std::vector<long>, std::vector<std::vector<double>>> grid;
  auto cell_of = [&](const std::vector<double>& y) {
    std::vector<long> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = static_cast<long>(std::floor(y[i] / h));
    return key;
  };
  auto crowded = [&](const std::vector<double>& y) {
    const auto key = cell_of(y);
    std::vector<long> off(n, -1), probe(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) probe[i] = key[i] + off[i];
      if (auto it = grid.find(probe); it != grid.end())
        for (const auto& z : it->second)
          if (distance(y, z) < h) return true;
      std::size_t d = 0;
      while (d < n && ++off[d] > 1) {
        off[d] = -1;
        ++d;
      }
      if (d == n) return false;
    }
  };
  for_each_lattice(anchor, R + h, h, [&](const std::vector<double>& x) {
    const double d = distance(x, c);
    if (d <= R - 0.5 * h) {
      f(x);
      return;
    }
    if (d > R + 0.5 * h || d == 0.0) return;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = c[i] + R * (x[i] - c[i]) / d;
    for (const auto& o : others)
      if (distance(y, o) < R + 0.5 * h) return;
    if (crowded(y)) return;
    grid[cell_of(y)].push_back(y);
    f(y);
  });
}

inline bool in_open_cone(const ConeContext& ctx, const Point& p) {
  return p.r > 0.0 && phi_of_colatitude(ctx.eigen, p.colatitude()) > 0.0;
}

inline double vec_angle(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return std::acos(std::clamp(d / (norm(a) * norm(b)), -1.0, 1.0));
}

}  // namespace detail

/// Membership of P in a primitive (explicit points: never, they are atoms).
inline bool contains(const ConeContext& ctx, const Primitive& prim, const Point& p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return distance(p, s.center) <= s.radius + 1e-12 * (s.radius + s.center.r);
        } else if constexpr (std::is_same_v<T, ShellSector>) {
          const int k = block_index(p.r);
          return k >= s.k_lo && k <= s.k_hi && std::abs(p.colatitude()) <= s.alpha_sub;
        } else if constexpr (std::is_same_v<T, AxisBeads>) {
          for (int k = s.k_lo; k <= s.k_hi; ++k)
            if (distance(p, axis_point(p.dim(), std::ldexp(1.0, k))) <=
                s.radius + 1e-12 * (s.radius + std::ldexp(1.0, k)))
              return true;
          return false;
        } else if constexpr (std::is_same_v<T, ExplicitPoints>) {
          return false;
        } else if constexpr (std::is_same_v<T, BoundaryCone>) {
          const auto x = to_cartesian(p), q = to_cartesian(s.Q);
          std::vector<double> v(x.size());
          for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] - q[i];
          const double l = detail::norm(v);
          if (l == 0.0 || l > s.reach) return false;
          return detail::vec_angle(v, detail::inward_normal(s.Q)) <= s.half_angle;
        } else {
          const double l = distance(p, s.Q);
          return l > 0.0 && l <= s.reach && boundary_distance(ctx, p) <= l * l;
        }
      },
      prim);
}

/// Lattice sample of one primitive inside the ball B(Q, rho_hi) minus
/// B(Q, rho_lo) with spacing h, anchored at Q. Used by the boundary-point test.
inline void sample_annulus(const ConeContext& ctx, const Primitive& prim, const Point& Q,
                           double rho_lo, double rho_hi, double h, std::vector<Point>& pts,
                           std::vector<double>& hs) {
  const auto q = to_cartesian(Q);
  auto keep = [&](const std::vector<double>& x, double hx) {
    const double l = distance(x, q);
    if (l < rho_lo || l >= rho_hi) return;
    Point p = from_cartesian(x);
    if (!detail::in_open_cone(ctx, p) || !contains(ctx, prim, p)) return;
    pts.push_back(std::move(p));
    hs.push_back(hx);
  };
  if (const auto* e = std::get_if<ExplicitPoints>(&prim)) {
    for (std::size_t i = 0; i < e->points.size(); ++i) {
      const double l = distance(e->points[i], Q);
      if (l >= rho_lo && l < rho_hi && detail::in_open_cone(ctx, e->points[i])) {
        pts.push_back(e->points[i]);
        hs.push_back(i < e->h.size() ? e->h[i] : h);
      }
    }
    return;
  }
  if (const auto* c = std::get_if<BoundaryCusp>(&prim)) {
    // Columns on the tangent plane at Q, stacked along the inward normal
    // inside the cusp thickness rho^2.
    const auto nrm = detail::inward_normal(c->Q);
    const auto tangent = detail::complement_basis(nrm);
    const auto cq = to_cartesian(c->Q);
    std::vector<double> zero(tangent.size(), 0.0);
    detail::for_each_lattice(zero, rho_hi, h, [&](const std::vector<double>& u) {
      const double rho = detail::norm(u);
      if (rho >= rho_hi || rho > c->reach) return;
      const double tau = rho * rho;
      const int layers = std::max(1, static_cast<int>(std::floor(tau / h)));
      for (int l = 0; l < layers; ++l) {
        const double y = (l + 0.5) * tau / layers;
        std::vector<double> x(cq);
        for (std::size_t d = 0; d < tangent.size(); ++d)
          for (std::size_t i = 0; i < x.size(); ++i) x[i] += u[d] * tangent[d][i];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += y * nrm[i];
        keep(x, h);
      }
    });
    return;
  }
  detail::for_each_lattice(q, rho_hi, h, [&](const std::vector<double>& x) { keep(x, h); });
}

namespace detail {

/// Radial extent [lo, hi] of a primitive, used to pick the blocks it touches.
inline std::pair<double, double> radial_extent(const Primitive& prim) {
  return std::visit(
      [](const auto& s) -> std::pair<double, double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {std::max(0.0, s.center.r - s.radius), s.center.r + s.radius};
        } else if constexpr (std::is_same_v<T, ShellSector>) {
          return {std::ldexp(1.0, s.k_lo), std::ldexp(1.0, s.k_hi + 1)};
        } else if constexpr (std::is_same_v<T, AxisBeads>) {
          return {std::max(0.0, std::ldexp(1.0, s.k_lo) - s.radius),
                  std::ldexp(1.0, s.k_hi) + s.radius};
        } else if constexpr (std::is_same_v<T, ExplicitPoints>) {
          double lo = 1e300, hi = 0.0;
          for (const auto& p : s.points) {
            lo = std::min(lo, p.r);
            hi = std::max(hi, p.r);
          }
          return {lo, hi};
        } else {
          return {std::max(0.0, s.Q.r - s.reach), s.Q.r + s.reach};
        }
      },
      prim);
}

/// Characteristic length of a primitive (the lattice never gets coarser than
/// resolution times this).
inline double feature_size(const Primitive& prim) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, AxisBeads>)
          return 2.0 * s.radius;
        else if constexpr (std::is_same_v<T, BoundaryCone> || std::is_same_v<T, BoundaryCusp>)
          return s.reach;
        else
          return 1e300;
      },
      prim);
}

inline void sample_block(const ConeContext& ctx, const Primitive& prim, int k, double h,
                         std::vector<Point>& pts, std::vector<double>& hs) {
  const double lo = std::ldexp(1.0, k), hi = std::ldexp(1.0, k + 1);
  const std::size_t n = static_cast<std::size_t>(ctx.n);
  auto accept = [&](const std::vector<double>& x, double hx) {
    Point p = from_cartesian(x);
    if (p.r < lo || p.r >= hi) return;
    if (!in_open_cone(ctx, p) || !contains(ctx, prim, p)) return;
    pts.push_back(std::move(p));
    hs.push_back(hx);
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          sample_ball(to_cartesian(s.center), s.radius, h, {},
                      [&](const std::vector<double>& x) { accept(x, h); });
        } else if constexpr (std::is_same_v<T, ShellSector>) {
          for_each_lattice(std::vector<double>(n, 0.0), hi, h,
                           [&](const std::vector<double>& x) { accept(x, h); });
        } else if constexpr (std::is_same_v<T, AxisBeads>) {
          for (int kb = s.k_lo; kb <= s.k_hi; ++kb) {
            const double rc = std::ldexp(1.0, kb);
            if (rc + s.radius < lo || rc - s.radius >= hi) continue;
            std::vector<std::vector<double>> others;
            for (int ko = s.k_lo; ko <= s.k_hi; ++ko)
              if (ko != kb && std::abs(std::ldexp(1.0, ko) - rc) < 2.0 * s.radius + h)
                others.push_back(to_cartesian(axis_point(n, std::ldexp(1.0, ko))));
            sample_ball(to_cartesian(axis_point(n, rc)), s.radius, h, others,
                        [&](const std::vector<double>& x) { accept(x, h); });
          }
        } else if constexpr (std::is_same_v<T, ExplicitPoints>) {
          for (std::size_t i = 0; i < s.points.size(); ++i) {
            const Point& p = s.points[i];
            if (p.r < lo || p.r >= hi || !in_open_cone(ctx, p)) continue;
            pts.push_back(p);
            hs.push_back(i < s.h.size() ? s.h[i] : h);
          }
        } else {
          // Boundary primitives: dyadic annuli around Q refined toward Q.
          const double reach = s.reach;
          for (int j = 0; j <= 6; ++j) {
            const double rho_hi = reach * std::ldexp(1.0, -j);
            std::vector<Point> ap;
            std::vector<double> ah;
            sample_annulus(ctx, prim, s.Q, 0.5 * rho_hi, rho_hi, h * std::ldexp(1.0, -j), ap,
                           ah);
            for (std::size_t i = 0; i < ap.size(); ++i)
              if (ap[i].r >= lo && ap[i].r < hi) {
                pts.push_back(ap[i]);
                hs.push_back(ah[i]);
              }
          }
        }
      },
      prim);
}

/// Keeps points in sampling order, dropping exact duplicates and any point
/// closer than max(h_i, h_j) to a kept point of another primitive.
inline void thin(Block& b, const std::vector<std::size_t>& owner) {
  if (b.points.empty()) return;
  const double cell = *std::max_element(b.h.begin(), b.h.end());
  const std::size_t n = to_cartesian(b.points.front()).size();
  std::map<std::vector<long>, std::vector<std::size_t>> grid;
  std::vector<std::vector<double>> xs;
  xs.reserve(b.points.size());
  for (const auto& p : b.points) xs.push_back(to_cartesian(p));
  auto cell_of = [&](const std::vector<double>& y) {
    std::vector<long> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = static_cast<long>(std::floor(y[i] / cell));
    return key;
  };
  auto clash = [&](std::size_t i) {
    const auto key = cell_of(xs[i]);
    std::vector<long> off(n, -1), probe(n);
    for (;;) {
      for (std::size_t d = 0; d < n; ++d) probe[d] = key[d] + off[d];
      if (auto it = grid.find(probe); it != grid.end())
        for (std::size_t j : it->second) {
          const double dist = distance(xs[i], xs[j]);
          if (dist <= 1e-12 * std::max(1.0, b.points[i].r)) return true;
          if (owner[i] != owner[j] && dist < (1.0 - 1e-9) * std::max(b.h[i], b.h[j]))
            return true;
        }
      std::size_t d = 0;
      while (d < n && ++off[d] > 1) {
        off[d] = -1;
        ++d;
      }
      if (d == n) return false;
    }
  };
  Block out;
  out.coarsened = b.coarsened;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    if (clash(i)) continue;
    grid[cell_of(xs[i])].push_back(i);
    out.points.push_back(b.points[i]);
    out.h.push_back(b.h[i]);
  }
  b = std::move(out);
}

}  // namespace detail

/// Discretizes E into per-block weighted point clouds E_k = E cap I_k.
///
/// Each primitive is sampled on a lattice of spacing resolution * min(2^k,
/// feature size), so blocks have comparable point counts. Points not in the
/// open cone are discarded. Blocks over the cap are re-sampled with coarser
/// spacing and flagged.
inline BlockDecomposition discretize(const SetSpec& spec, const ConeContext& ctx,
                                     double resolution, int k_min, int k_max,
                                     std::size_t point_cap = 4096) {
  if (!(resolution > 0.0 && resolution < 1.0))
    throw DomainError("discretize: resolution must lie in (0, 1)");
  if (k_min > k_max) throw DomainError("discretize: k_min > k_max");
  BlockDecomposition out;
  out.k_min = k_min;
  out.k_max = k_max;
  out.resolution = resolution;
  for (int k = k_min; k <= k_max; ++k) out.blocks[k] = Block{};
  std::map<int, std::vector<std::size_t>> owner;

  for (std::size_t pi = 0; pi < spec.shapes.size(); ++pi) {
    const Primitive& prim = spec.shapes[pi];
    const auto [lo, hi] = detail::radial_extent(prim);
    const double feature = detail::feature_size(prim);
    bool any = false;
    for (int k = k_min; k <= k_max; ++k) {
      if (hi < std::ldexp(1.0, k) || lo >= std::ldexp(1.0, k + 1)) continue;
      Block& blk = out.blocks[k];
      double h = resolution * std::min(std::ldexp(1.0, k), feature);
      std::vector<Point> pts;
      std::vector<double> hs;
      detail::sample_block(ctx, prim, k, h, pts, hs);
      while (pts.size() + blk.size() > point_cap &&
             !std::holds_alternative<ExplicitPoints>(prim)) {
        h *= std::pow(2.0, 1.0 / ctx.n);
        pts.clear();
        hs.clear();
        detail::sample_block(ctx, prim, k, h, pts, hs);
        blk.coarsened = true;
      }
      any = any || !pts.empty();
      blk.points.insert(blk.points.end(), pts.begin(), pts.end());
      blk.h.insert(blk.h.end(), hs.begin(), hs.end());
      owner[k].resize(blk.size(), pi);
    }
    if (!any)
      out.warnings.push_back("primitive " + std::to_string(pi) + " of set '" + spec.name +
                             "' has no points in the open cone within the block range; skipped");
  }
  for (auto& [k, blk] : out.blocks) detail::thin(blk, owner[k]);
  return out;
}

/// True iff every point has phi >= margin * J_Omega.
inline bool in_subcone(const BlockDecomposition& decomp, const ConeContext& ctx, double margin) {
  const double floor_v = margin * ctx.eigen.J_Omega;
  for (const auto& [k, blk] : decomp.blocks)
    for (const auto& p : blk.points)
      if (phi_of_colatitude(ctx.eigen, p.colatitude()) < floor_v) return false;
  return true;
}

/// CSV rows: k, r, theta_1..theta_{n-1}, h.
inline void write_decomposition_csv(std::ostream& os, const BlockDecomposition& d, int n) {
  os << "k,r";
  for (int j = 1; j < n; ++j) os << ",theta_" << j;
  os << ",h\n";
  os.precision(17);
  for (const auto& [k, blk] : d.blocks)
    for (std::size_t i = 0; i < blk.size(); ++i) {
      os << k << ',' << blk.points[i].r;
      for (double t : blk.points[i].theta) os << ',' << t;
      os << ',' << blk.h[i] << '\n';
    }
}

}  // namespace wiener

#endif  // WIENER_SETS_HPP
