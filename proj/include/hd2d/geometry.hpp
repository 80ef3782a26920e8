#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "hd2d/errors.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

struct Point2D {
  double x = 0.0;  // m
  double y = 0.0;  // m

  friend Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2D operator*(double s, Point2D a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2D a, Point2D b) = default;
};

inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D a) { return std::hypot(a.x, a.y); }
inline double distance(Point2D a, Point2D b) { return norm(b - a); }

/// Direction of `to` as seen from `from`, in [0, 2*pi).
inline double bearing(Point2D from, Point2D to) {
  return wrap_angle(std::atan2(to.y - from.y, to.x - from.x));
}

inline Point2D polar(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

/// Oriented rectangle. `length` runs along `orientation`, `width` across it.
struct BlockageRect {
  Point2D center;
  double length = 0.0;       // m
  double width = 0.0;        // m
  double orientation = 0.0;  // rad, [0, pi)

  Point2D to_local(Point2D p) const {
    const Point2D d = p - center;
    const double c = std::cos(orientation), s = std::sin(orientation);
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
  }

  Point2D to_world(Point2D local) const {
    const double c = std::cos(orientation), s = std::sin(orientation);
    return center + Point2D{c * local.x - s * local.y, s * local.x + c * local.y};
  }

  /// Boundary tolerance: points closer than this to an edge count as on the boundary.
  double edge_eps() const { return 1e-9 * (1.0 + std::max(length, width)); }

  bool contains_strictly(Point2D p) const {
    const Point2D l = to_local(p);
    const double e = edge_eps();
    return std::fabs(l.x) < 0.5 * length - e && std::fabs(l.y) < 0.5 * width - e;
  }

  /// Corners in counter-clockwise order.
  std::array<Point2D, 4> corners() const {
    const double hl = 0.5 * length, hw = 0.5 * width;
    return {to_world({hl, -hw}), to_world({hl, hw}), to_world({-hl, hw}), to_world({-hl, -hw})};
  }

  struct Face {
    Point2D a;
    Point2D b;
    Point2D normal;  // outward unit normal
  };

  std::array<Face, 4> faces() const {
    const auto c = corners();
    std::array<Face, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
      const Point2D a = c[i], b = c[(i + 1) % 4];
      const Point2D t = b - a;
      const double n = norm(t);
      // CCW winding: outward normal is the edge direction rotated by -90 degrees.
      out[i] = {a, b, {t.y / n, -t.x / n}};
    }
    return out;
  }

  double circumradius() const { return 0.5 * std::hypot(length, width); }
};

inline BlockageRect make_blockage(Point2D center, double length, double width, double orientation) {
  require(length > 0.0 && width > 0.0, "blockage length and width must be positive");
  require(orientation >= 0.0 && orientation < kPi, "blockage orientation must lie in [0, pi)");
  return {center, length, width, orientation};
}

struct Range {
  double min = 0.0;
  double max = 0.0;
  double mean() const { return 0.5 * (min + max); }
};

/// Boolean model of rectangles: centres form a PPP, sides uniform on their ranges,
/// orientation uniform on [0, pi).
struct BlockageProcess {
  double density = 0.0;  // per m^2
  Range length{10.0, 30.0};
  Range width{10.0, 30.0};

  void validate() const {
    require(density >= 0.0, "blockage density must be non-negative");
    require(length.min > 0.0 && length.min <= length.max, "blockage length range invalid");
    require(width.min > 0.0 && width.min <= width.max, "blockage width range invalid");
  }
};

/// LOS decay rate of the rectangle boolean model: 2 * density * (E[L] + E[W]) / pi.
inline double derive_beta(const BlockageProcess& p) {
  p.validate();
  return 2.0 * p.density * (p.length.mean() + p.width.mean()) / kPi;
}

/// Density that yields a target beta for the given size ranges.
inline double density_for_beta(double beta, Range length, Range width) {
  require(beta >= 0.0, "beta must be non-negative");
  return beta * kPi / (2.0 * (length.mean() + width.mean()));
}

inline double los_probability(double r, double beta) {
  require(r >= 0.0 && beta >= 0.0, "los_probability needs r >= 0 and beta >= 0");
  return std::exp(-beta * r);
}

/// Homogeneous PPP on the square [-h, h]^2.
inline std::vector<Point2D> sample_ppp(double density, double half_width, Rng& rng) {
  require(density >= 0.0, "PPP density must be non-negative");
  require(half_width > 0.0, "window half-width must be positive");
  const double mean = density * 4.0 * half_width * half_width;
  if (mean == 0.0) return {};
  const auto n = std::poisson_distribution<std::int64_t>(mean)(rng);
  std::vector<Point2D> pts;
  pts.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(-half_width, half_width);
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = u(rng);
    pts.push_back({x, u(rng)});
  }
  return pts;
}

inline std::vector<Point2D> sample_ppp(double density, double half_width, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ppp(density, half_width, rng);
}

/// Blockages whose centres fall in the square of half-width `half_width` around `center`.
inline std::vector<BlockageRect> sample_blockages(const BlockageProcess& p, double half_width, Rng& rng,
                                                  Point2D center = {}) {
  p.validate();
  auto centers = sample_ppp(p.density, half_width, rng);
  std::vector<BlockageRect> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    const double l = uniform(rng, p.length.min, p.length.max);
    const double w = uniform(rng, p.width.min, p.width.max);
    const double o = uniform(rng, 0.0, kPi);
    out.push_back({c + center, l, w, o >= kPi ? 0.0 : o});
  }
  return out;
}

/// True iff the open segment (a, b) passes through the open interior of `r`.
/// Boundary contact (tangency, grazing a corner) does not count.
inline bool segment_crosses_interior(Point2D a, Point2D b, const BlockageRect& r) {
  const Point2D la = r.to_local(a);
  const Point2D lb = r.to_local(b);
  const Point2D d = lb - la;
  const double e = r.edge_eps();
  const double half[2] = {0.5 * r.length - e, 0.5 * r.width - e};
  const double p[2] = {la.x, la.y};
  const double v[2] = {d.x, d.y};
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < 2; ++k) {
    if (std::fabs(v[k]) < 1e-300) {
      if (std::fabs(p[k]) >= half[k]) return false;
      continue;
    }
    double ta = (-half[k] - p[k]) / v[k];
    double tb = (half[k] - p[k]) / v[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  return t1 - t0 > 1e-12;
}

/// Line-of-sight test against a plain list of rectangles.
/// Throws EndpointCovered when either endpoint is strictly inside a rectangle.
inline bool is_los(Point2D a, Point2D b, std::span<const BlockageRect> blockages) {
  for (const auto& r : blockages)
    if (r.contains_strictly(a) || r.contains_strictly(b)) throw EndpointCovered();
  for (const auto& r : blockages)
    if (segment_crosses_interior(a, b, r)) return false;
  return true;
}

/// Blockages bucketed on a uniform grid for fast segment and neighbourhood queries.
/// Immutable after construction; const queries are safe from many threads.
class BlockageField {
 public:
  BlockageField() = default;

  explicit BlockageField(std::vector<BlockageRect> rects, double cell_size = 0.0) : rects_(std::move(rects)) {
    if (rects_.empty()) return;
    double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
    double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
    double max_r = 0.0;
    for (const auto& r : rects_) {
      const double cr = r.circumradius();
      max_r = std::max(max_r, cr);
      lo_x = std::min(lo_x, r.center.x - cr);
      lo_y = std::min(lo_y, r.center.y - cr);
      hi_x = std::max(hi_x, r.center.x + cr);
      hi_y = std::max(hi_y, r.center.y + cr);
    }
    cell_ = cell_size > 0.0 ? cell_size : std::max(2.0 * max_r, 1.0);
    origin_ = {lo_x, lo_y};
    nx_ = static_cast<int>(std::ceil((hi_x - lo_x) / cell_)) + 1;
    ny_ = static_cast<int>(std::ceil((hi_y - lo_y) / cell_)) + 1;
    cells_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
    for (std::uint32_t i = 0; i < rects_.size(); ++i) {
      double bx0 = std::numeric_limits<double>::max(), by0 = bx0;
      double bx1 = std::numeric_limits<double>::lowest(), by1 = bx1;
      for (const auto& c : rects_[i].corners()) {
        bx0 = std::min(bx0, c.x);
        by0 = std::min(by0, c.y);
        bx1 = std::max(bx1, c.x);
        by1 = std::max(by1, c.y);
      }
      for (int ix = cell_x(bx0); ix <= cell_x(bx1); ++ix)
        for (int iy = cell_y(by0); iy <= cell_y(by1); ++iy) cells_[index(ix, iy)].push_back(i);
    }
  }

  std::span<const BlockageRect> rects() const { return rects_; }
  bool empty() const { return rects_.empty(); }

  /// True iff `p` lies strictly inside some blockage.
  bool covers(Point2D p) const {
    if (rects_.empty()) return false;
    const int ix = cell_x(p.x), iy = cell_y(p.y);
    if (!in_grid(ix, iy)) return false;
    for (auto i : cells_[index(ix, iy)])
      if (rects_[i].contains_strictly(p)) return true;
    return false;
  }

  /// Throws EndpointCovered when an endpoint is inside a blockage.
  bool is_los(Point2D a, Point2D b) const {
    if (covers(a) || covers(b)) throw EndpointCovered();
    return !blocked(a, b);
  }

  /// Segment test that skips the endpoint check.
  bool blocked(Point2D a, Point2D b) const {
    if (rects_.empty()) return false;
    bool hit = false;
    walk(a, b, [&](const std::vector<std::uint32_t>& bucket) {
      for (auto i : bucket)
        if (segment_crosses_interior(a, b, rects_[i])) {
          hit = true;
          return false;
        }
      return true;
    });
    return hit;
  }

  /// Indices of blockages whose circumscribed disc comes within `radius` of `p`, ascending.
  std::vector<std::uint32_t> near(Point2D p, double radius) const {
    std::vector<std::uint32_t> out;
    if (rects_.empty()) return out;
    const int x0 = std::max(0, cell_x(p.x - radius)), x1 = std::min(nx_ - 1, cell_x(p.x + radius));
    const int y0 = std::max(0, cell_y(p.y - radius)), y1 = std::min(ny_ - 1, cell_y(p.y + radius));
    for (int ix = x0; ix <= x1; ++ix)
      for (int iy = y0; iy <= y1; ++iy)
        for (auto i : cells_[index(ix, iy)])
          if (distance(rects_[i].center, p) <= radius + rects_[i].circumradius()) out.push_back(i);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  int cell_x(double x) const { return static_cast<int>(std::floor((x - origin_.x) / cell_)); }
  int cell_y(double y) const { return static_cast<int>(std::floor((y - origin_.y) / cell_)); }
  bool in_grid(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(iy);
  }

  // Visits the buckets of every grid cell the segment passes through (Amanatides-Woo).
  // `visit` returns false to stop early.
  template <class Visit>
  void walk(Point2D a, Point2D b, Visit&& visit) const {
    const double gx1 = origin_.x + nx_ * cell_, gy1 = origin_.y + ny_ * cell_;
    const Point2D d = b - a;
    double t0 = 0.0, t1 = 1.0;
    const double lo[2] = {origin_.x, origin_.y}, hi[2] = {gx1, gy1};
    const double p[2] = {a.x, a.y}, v[2] = {d.x, d.y};
    for (int k = 0; k < 2; ++k) {
      if (std::fabs(v[k]) < 1e-300) {
        if (p[k] < lo[k] || p[k] > hi[k]) return;
        continue;
      }
      double ta = (lo[k] - p[k]) / v[k], tb = (hi[k] - p[k]) / v[k];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return;
    }
    const Point2D s = a + t0 * d;
    int ix = std::clamp(cell_x(s.x), 0, nx_ - 1);
    int iy = std::clamp(cell_y(s.y), 0, ny_ - 1);
    const int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
    const int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    auto boundary_t = [&](int i, int step, double o, double comp, double dv) {
      if (step == 0) return inf;
      const double edge = o + (i + (step > 0 ? 1 : 0)) * cell_;
      return (edge - comp) / dv;
    };
    double t_max_x = boundary_t(ix, step_x, origin_.x, a.x, d.x);
    double t_max_y = boundary_t(iy, step_y, origin_.y, a.y, d.y);
    const double dt_x = step_x ? cell_ / std::fabs(d.x) : inf;
    const double dt_y = step_y ? cell_ / std::fabs(d.y) : inf;
    while (true) {
      if (!visit(cells_[index(ix, iy)])) return;
      if (std::min(t_max_x, t_max_y) > t1) return;
      if (t_max_x < t_max_y) {
        ix += step_x;
        t_max_x += dt_x;
      } else {
        iy += step_y;
        t_max_y += dt_y;
      }
      if (!in_grid(ix, iy)) return;
    }
  }

  std::vector<BlockageRect> rects_;
  std::vector<std::vector<std::uint32_t>> cells_;
  Point2D origin_;
  double cell_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
};

/// One sampled drop of the network. The test receiver sits at the origin.
struct NetworkRealization {
  std::vector<Point2D> dts;
  std::vector<Point2D> bss;
  std::vector<Point2D> cus;
  BlockageField blockages;
  double window_half_width = 5000.0;
  Point2D test_rx{};
  Point2D test_tx{};
};

/// Places the test transmitter at distance d0 in a uniform direction, resampling the
/// direction while it lands inside a blockage. The receiver must already be clear.
inline Point2D place_test_tx(double d0, const BlockageField& field, Rng& rng, int max_tries = 1000) {
  require(d0 > 0.0, "test link distance must be positive");
  for (int i = 0; i < max_tries; ++i) {
    const Point2D tx = polar(d0, uniform(rng, 0.0, kTwoPi));
    if (!field.covers(tx)) return tx;
  }
  throw EndpointCovered();
}

}  // namespace hd2d
