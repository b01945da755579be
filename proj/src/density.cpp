#include "equipart/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace equipart {

double DensityField::operator()(const Vec2& x) const {
  switch (kind) {
    case DensityKind::Uniform:
      return value;
    case DensityKind::Gaussian:
      return amplitude * std::exp(-rate * (x - center).squaredNorm());
    case DensityKind::Grid: {
      const double fx = (x.x() - grid_origin.x()) / grid_cell;
      const double fy = (x.y() - grid_origin.y()) / grid_cell;
      const auto col = static_cast<long>(std::floor(fx));
      const auto row = static_cast<long>(std::floor(fy));
      if (row < 0 || col < 0 || row >= grid_values.rows() || col >= grid_values.cols())
        return 0.0;
      return grid_values(row, col);
    }
  }
  return 0.0;
}

DensityField DensityField::uniform(double v) {
  if (v < 0) throw InvalidParams("uniform density value must be >= 0");
  DensityField d;
  d.kind = DensityKind::Uniform;
  d.value = v;
  return d;
}

DensityField DensityField::gaussian(const Vec2& center, double rate, double amplitude) {
  if (rate <= 0 || amplitude <= 0)
    throw InvalidParams("gaussian density needs rate > 0 and amplitude > 0");
  DensityField d;
  d.kind = DensityKind::Gaussian;
  d.center = center;
  d.rate = rate;
  d.amplitude = amplitude;
  return d;
}

DensityField DensityField::grid(const Vec2& origin, double cell, Eigen::MatrixXd values) {
  if (cell <= 0) throw InvalidParams("grid cell size must be > 0");
  if (values.size() == 0 || values.minCoeff() < 0)
    throw InvalidParams("grid values must be nonempty and >= 0");
  DensityField d;
  d.kind = DensityKind::Grid;
  d.grid_origin = origin;
  d.grid_cell = cell;
  d.grid_values = std::move(values);
  return d;
}

void QuadratureSpec::validate() const {
  if (triangle_degree < 2) throw InvalidParams("triangle quadrature degree must be >= 2");
  if (segment_points < 2) throw InvalidParams("segment quadrature needs >= 2 points");
  if (max_triangle_edge <= 0 || max_segment_length <= 0)
    throw InvalidParams("quadrature subdivision caps must be > 0");
}

const std::vector<std::pair<double, double>>& gauss_legendre(int points) {
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> rule(points);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {-x, w};
    rule[n - 1 - i] = {x, w};
  }
  auto [ins, ok] = cache.emplace(points, std::move(rule));
  (void)ok;
  return ins->second;
}

namespace {

struct TrianglePoint {
  double x, y;  // reference coordinates on (0,0)-(1,0)-(0,1)
  double w;     // weights sum to 1 (relative to triangle area)
};

// Collapsed Gauss product rule of the requested polynomial exactness.
const std::vector<TrianglePoint>& triangle_rule(int degree) {
  static std::map<int, std::vector<TrianglePoint>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  const int p = (degree + 3) / 2;  // 2p - 2 >= degree
  const auto& gl = gauss_legendre(p);
  std::vector<TrianglePoint> rule;
  rule.reserve(static_cast<size_t>(p) * p);
  for (const auto& [xu, wu] : gl) {
    const double u = 0.5 * (xu + 1.0);
    for (const auto& [xv, wv] : gl) {
      const double v = 0.5 * (xv + 1.0);
      // x = u, y = v (1 - u); Jacobian (1 - u); weights normalized to sum 1
      rule.push_back({u, v * (1.0 - u), 0.5 * wu * wv * (1.0 - u)});
    }
  }
  auto [ins, ok] = cache.emplace(degree, std::move(rule));
  (void)ok;
  return ins->second;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Exact moments of a constant density over a triangle.
void add_const_triangle(const Vec2& a, const Vec2& b, const Vec2& c, double density,
                        RegionMoments& acc) {
  const double signed_area = 0.5 * cross2(b - a, c - a);
  acc.mass += density * signed_area;
  acc.first += density * signed_area * (a + b + c) / 3.0;
}

void quad_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const DensityField& density,
                   const QuadratureSpec& quad, RegionMoments& acc) {
  const double signed_area = 0.5 * cross2(b - a, c - a);
  if (signed_area == 0.0) return;
  const double longest =
      std::sqrt(std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
  if (longest > quad.max_triangle_edge) {
    const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    quad_triangle(a, ab, ca, density, quad, acc);
    quad_triangle(ab, b, bc, density, quad, acc);
    quad_triangle(ca, bc, c, density, quad, acc);
    quad_triangle(ab, bc, ca, density, quad, acc);
    return;
  }
  for (const auto& pt : triangle_rule(quad.triangle_degree)) {
    const Vec2 x = a + pt.x * (b - a) + pt.y * (c - a);
    const double f = signed_area * pt.w * density(x);
    acc.mass += f;
    acc.first += f * x;
  }
}

// Clips a triangle against one grid cell and accumulates the constant piece.
void grid_triangle_piece(const Vec2& a, const Vec2& b, const Vec2& c, double sign,
                         double x0, double y0, double x1, double y1, double density,
                         RegionMoments& acc) {
  Polygon tri;
  tri.vertices = {a, b, c};
  tri = clip_halfplane(tri, HalfPlane(Vec2(1, 0), x1));
  tri = clip_halfplane(tri, HalfPlane(Vec2(-1, 0), -x0));
  tri = clip_halfplane(tri, HalfPlane(Vec2(0, 1), y1));
  tri = clip_halfplane(tri, HalfPlane(Vec2(0, -1), -y0));
  if (tri.empty()) return;
  const double area = polygon_area(tri);
  acc.mass += sign * density * area;
  acc.first += sign * density * area * polygon_centroid(tri);
}

void grid_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const DensityField& density,
                   RegionMoments& acc) {
  const double signed_area = 0.5 * cross2(b - a, c - a);
  if (signed_area == 0.0) return;
  const double sign = signed_area > 0 ? 1.0 : -1.0;
  const Vec2 va = a, vb = sign > 0 ? b : c, vc = sign > 0 ? c : b;

  const double h = density.grid_cell;
  const Vec2& o = density.grid_origin;
  const double minx = std::min({va.x(), vb.x(), vc.x()});
  const double maxx = std::max({va.x(), vb.x(), vc.x()});
  const double miny = std::min({va.y(), vb.y(), vc.y()});
  const double maxy = std::max({va.y(), vb.y(), vc.y()});
  const long c0 = std::max(0L, static_cast<long>(std::floor((minx - o.x()) / h)));
  const long c1 = std::min(density.grid_values.cols() - 1,
                           static_cast<long>(std::floor((maxx - o.x()) / h)));
  const long r0 = std::max(0L, static_cast<long>(std::floor((miny - o.y()) / h)));
  const long r1 = std::min(density.grid_values.rows() - 1,
                           static_cast<long>(std::floor((maxy - o.y()) / h)));
  for (long r = r0; r <= r1; ++r)
    for (long col = c0; col <= c1; ++col) {
      const double v = density.grid_values(r, col);
      if (v == 0.0) continue;
      grid_triangle_piece(va, vb, vc, sign, o.x() + col * h, o.y() + r * h,
                          o.x() + (col + 1) * h, o.y() + (r + 1) * h, v, acc);
    }
}

}  // namespace

RegionMoments region_moments(const Polygon& poly, const DensityField& density,
                             const QuadratureSpec& quad) {
  quad.validate();
  RegionMoments acc;
  const int n = poly.size();
  if (n < 3) return acc;

  if (density.kind == DensityKind::Uniform) {
    for (int i = 1; i + 1 < n; ++i)
      add_const_triangle(poly.vertices[0], poly.vertices[i], poly.vertices[i + 1],
                         density.value, acc);
    return acc;
  }
  for (int i = 1; i + 1 < n; ++i) {
    if (density.kind == DensityKind::Grid)
      grid_triangle(poly.vertices[0], poly.vertices[i], poly.vertices[i + 1], density, acc);
    else
      quad_triangle(poly.vertices[0], poly.vertices[i], poly.vertices[i + 1], density, quad, acc);
  }
  return acc;
}

double region_measure(const Polygon& poly, const DensityField& density,
                      const QuadratureSpec& quad) {
  return region_moments(poly, density, quad).mass;
}

Vec2 region_centroid(const Polygon& poly, const DensityField& density,
                     const QuadratureSpec& quad) {
  const RegionMoments m = region_moments(poly, density, quad);
  if (m.mass <= kZeroMassThreshold)
    throw ZeroMassRegion("region mass below threshold; centroid undefined");
  return m.first / m.mass;
}

SegmentMoments face_moments(const Vec2& a, const Vec2& b, const DensityField& density,
                            const QuadratureSpec& quad) {
  quad.validate();
  SegmentMoments acc;
  const double len = (b - a).norm();
  if (len == 0.0) return acc;

  if (density.kind == DensityKind::Uniform) {
    acc.mass = density.value * len;
    acc.first = density.value * len * 0.5 * (a + b);
    return acc;
  }

  if (density.kind == DensityKind::Grid) {
    // split at grid-line crossings, constant on each piece
    std::vector<double> ts = {0.0, 1.0};
    const Vec2 d = b - a;
    const double h = density.grid_cell;
    for (int axis = 0; axis < 2; ++axis) {
      if (std::abs(d[axis]) < 1e-300) continue;
      const double o = density.grid_origin[axis];
      const long k0 = static_cast<long>(std::ceil((std::min(a[axis], b[axis]) - o) / h));
      const long k1 = static_cast<long>(std::floor((std::max(a[axis], b[axis]) - o) / h));
      for (long k = k0; k <= k1; ++k) {
        const double t = (o + k * h - a[axis]) / d[axis];
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
      const double tm = 0.5 * (ts[i] + ts[i + 1]);
      const Vec2 mid = a + tm * d;
      const double v = density(mid);
      if (v == 0.0) continue;
      const double piece = (ts[i + 1] - ts[i]) * len;
      acc.mass += v * piece;
      acc.first += v * piece * mid;
    }
    return acc;
  }

  const int pieces = std::max(1, static_cast<int>(std::ceil(len / quad.max_segment_length)));
  const auto& gl = gauss_legendre(quad.segment_points);
  const Vec2 d = b - a;
  for (int p = 0; p < pieces; ++p) {
    const double t0 = static_cast<double>(p) / pieces;
    const double t1 = static_cast<double>(p + 1) / pieces;
    const double half = 0.5 * (t1 - t0) * len;
    for (const auto& [xg, wg] : gl) {
      const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xg;
      const Vec2 x = a + t * d;
      const double f = half * wg * density(x);
      acc.mass += f;
      acc.first += f * x;
    }
  }
  return acc;
}

double face_integral(const Vec2& a, const Vec2& b, const DensityField& density,
                     const QuadratureSpec& quad) {
  return face_moments(a, b, density, quad).mass;
}

Vec2 face_first_moment(const Vec2& a, const Vec2& b, const Vec2& base,
                       const DensityField& density, const QuadratureSpec& quad) {
  const SegmentMoments m = face_moments(a, b, density, quad);
  return m.first - base * m.mass;
}

}  // namespace equipart
