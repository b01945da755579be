#include "equipart/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace equipart {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double polygon_area(const Polygon& poly) {
  const int n = poly.size();
  double twice = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    twice += cross2(a, b);
  }
  return 0.5 * twice;
}

double polygon_perimeter(const Polygon& poly) {
  const int n = poly.size();
  if (n < 2) return 0.0;
  double p = 0.0;
  for (int i = 0; i < n; ++i) p += (poly.vertices[(i + 1) % n] - poly.vertices[i]).norm();
  return p;
}

double polygon_diameter(const Polygon& poly) {
  const int n = poly.size();
  double d2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      d2 = std::max(d2, (poly.vertices[i] - poly.vertices[j]).squaredNorm());
  return std::sqrt(d2);
}

Vec2 polygon_centroid(const Polygon& poly) {
  const int n = poly.size();
  if (n == 0) throw InvalidParams("centroid of empty polygon");
  double twice = 0.0;
  Vec2 acc = Vec2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const double c = cross2(a, b);
    twice += c;
    acc += c * (a + b);
  }
  if (std::abs(twice) < 1e-300) throw InvalidParams("centroid of degenerate polygon");
  return acc / (3.0 * twice);
}

bool point_in(const Polygon& poly, const Vec2& x, double tol) {
  const int n = poly.size();
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    if (cross2(b - a, x - a) < -tol) return false;
  }
  return true;
}

bool is_convex_ccw(const Polygon& poly, double tol) {
  const int n = poly.size();
  if (n == 0) return true;  // empty polygon is a valid value
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2& c = poly.vertices[(i + 2) % n];
    if (cross2(b - a, c - b) < -tol) return false;
  }
  return polygon_area(poly) > 0.0;
}

Polygon normalized(Polygon poly) {
  auto& v = poly.vertices;
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    // weld consecutive duplicates
    for (size_t i = 0; i < v.size() && v.size() >= 2; ) {
      const size_t j = (i + 1) % v.size();
      if ((v[i] - v[j]).norm() <= kVertexWeldTol) {
        v.erase(v.begin() + static_cast<long>(j));
        changed = true;
      } else {
        ++i;
      }
    }
    // drop middle vertices of collinear triples
    for (size_t i = 0; i < v.size() && v.size() >= 3; ) {
      const size_t j = (i + 1) % v.size();
      const size_t k = (i + 2) % v.size();
      if (std::abs(cross2(v[j] - v[i], v[k] - v[j])) <= kCollinearTol) {
        v.erase(v.begin() + static_cast<long>(j));
        changed = true;
      } else {
        ++i;
      }
    }
  }
  if (v.size() < 3) v.clear();
  return poly;
}

Polygon clip_halfplane(const Polygon& poly, const HalfPlane& h) {
  if (poly.empty()) return {};
  const int n = poly.size();
  Polygon out;
  out.vertices.reserve(static_cast<size_t>(n) + 2);
  constexpr double eps = 1e-12;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const double sa = h.signed_distance(a);
    const double sb = h.signed_distance(b);
    if (sa <= eps) out.vertices.push_back(a);
    if ((sa < -eps && sb > eps) || (sa > eps && sb < -eps)) {
      const double t = sa / (sa - sb);
      out.vertices.push_back(a + t * (b - a));
    }
  }
  return normalized(std::move(out));
}

double distance_to_boundary(const Polygon& poly, const Vec2& x) {
  if (!point_in(poly, x)) return 0.0;
  const int n = poly.size();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp(ab.dot(x - a) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (x - (a + t * ab)).norm());
  }
  return best;
}

Vec2 project_into(const Polygon& poly, const Vec2& x) {
  if (poly.empty()) throw InvalidParams("projection onto empty polygon");
  if (point_in(poly, x)) return x;
  const int n = poly.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 proj = poly.vertices[0];
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp(ab.dot(x - a) / ab.squaredNorm(), 0.0, 1.0);
    const Vec2 p = a + t * ab;
    const double d = (x - p).squaredNorm();
    if (d < best) {
      best = d;
      proj = p;
    }
  }
  return proj;
}

std::optional<std::pair<Vec2, Vec2>> polygon_line_chord(const Polygon& poly, const HalfPlane& h,
                                                        double min_len) {
  if (poly.empty()) return std::nullopt;
  const int n = poly.size();
  constexpr double eps = 1e-12;
  const Vec2 tangent(-h.normal.y(), h.normal.x());
  // collect boundary points lying on the line, parameterized along the tangent
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Vec2 plo = Vec2::Zero(), phi = Vec2::Zero();
  auto consider = [&](const Vec2& p) {
    const double t = tangent.dot(p);
    if (t < lo) { lo = t; plo = p; }
    if (t > hi) { hi = t; phi = p; }
  };
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % n];
    const double sa = h.signed_distance(a);
    const double sb = h.signed_distance(b);
    if (std::abs(sa) <= eps) consider(a);
    if ((sa < -eps && sb > eps) || (sa > eps && sb < -eps)) {
      const double t = sa / (sa - sb);
      consider(a + t * (b - a));
    }
  }
  if (!(hi - lo > min_len)) return std::nullopt;
  return std::make_pair(plo, phi);
}

Polygon make_rect(double x0, double y0, double x1, double y1) {
  Polygon p;
  p.vertices = {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
  return p;
}

void PowerGeneratorSet::validate(const Polygon* region) const {
  const int m = size();
  if (m < 1) throw InvalidParams("generator set must contain at least one generator");
  if (weights.size() != positions.size())
    throw InvalidParams("positions/weights size mismatch");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((positions[i] - positions[j]).norm() <= kMinGeneratorSeparation)
        throw CoincidentGenerators("generators " + std::to_string(i) + " and " +
                                   std::to_string(j) + " coincide");
  if (region != nullptr)
    for (int i = 0; i < m; ++i)
      if (!point_in(*region, positions[i], 1e-9))
        throw InvalidParams("generator " + std::to_string(i) + " lies outside the workspace");
}

HalfPlane power_bisector(const Vec2& gi, double wi, const Vec2& gj, double wj) {
  const Vec2 d = gj - gi;
  if (d.norm() <= kMinGeneratorSeparation)
    throw CoincidentGenerators("power bisector of coincident generator positions");
  const double c = 0.5 * (gj.squaredNorm() - gi.squaredNorm() + wi - wj);
  return HalfPlane(d, c);
}

PowerDiagram power_diagram(const Polygon& region, const PowerGeneratorSet& gens) {
  gens.validate();
  const int m = gens.size();
  PowerDiagram diagram;
  diagram.cells.resize(m);
  diagram.neighbors.assign(m, {});

  for (int i = 0; i < m; ++i) {
    Polygon cell = region;
    for (int j = 0; j < m && !cell.empty(); ++j) {
      if (j == i) continue;
      cell = clip_halfplane(cell, power_bisector(gens.positions[i], gens.weights[i],
                                                 gens.positions[j], gens.weights[j]));
    }
    diagram.cells[i] = std::move(cell);
  }

  for (int i = 0; i < m; ++i) {
    if (diagram.cells[i].empty()) continue;
    for (int j = i + 1; j < m; ++j) {
      if (diagram.cells[j].empty()) continue;
      const HalfPlane h = power_bisector(gens.positions[i], gens.weights[i],
                                         gens.positions[j], gens.weights[j]);
      const auto chord = polygon_line_chord(diagram.cells[i], h);
      if (!chord) continue;
      diagram.faces.push_back({i, j, chord->first, chord->second});
      diagram.neighbors[i].push_back(j);
      diagram.neighbors[j].push_back(i);
    }
  }
  return diagram;
}

}  // namespace equipart
