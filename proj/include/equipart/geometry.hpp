#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "equipart/errors.hpp"

namespace equipart {

using Vec2 = Eigen::Vector2d;

// Geometric tolerances, in workspace length units (workspace assumed near unit scale).
inline constexpr double kVertexWeldTol = 1e-12;       // consecutive duplicate vertices
inline constexpr double kCollinearTol = 1e-13;        // cross-product magnitude for collinearity
inline constexpr double kMinFaceLength = 1e-10;       // faces shorter than this create no neighbor link
inline constexpr double kMinGeneratorSeparation = 1e-9;
inline constexpr double kPointOnBoundaryTol = 1e-12;

/// Simple polygon, vertices in counter-clockwise order, no repeated or
/// collinear consecutive vertices after normalization. Empty (no vertices)
/// is a valid value. All power-diagram cells and clip results are convex;
/// a swept angular sector may carry one reflex vertex at its pivot.
struct Polygon {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.empty(); }
  int size() const { return static_cast<int>(vertices.size()); }
};

/// Half-plane {x : normal . x <= offset} with a unit normal.
struct HalfPlane {
  Vec2 normal;
  double offset;

  HalfPlane(const Vec2& n, double c) {
    const double len = n.norm();
    if (len < 1e-300) throw InvalidParams("half-plane normal must be nonzero");
    normal = n / len;
    offset = c / len;
  }

  double signed_distance(const Vec2& x) const { return normal.dot(x) - offset; }
};

double polygon_area(const Polygon& poly);
double polygon_perimeter(const Polygon& poly);
double polygon_diameter(const Polygon& poly);
/// Area centroid (uniform density). Throws InvalidParams for (near-)degenerate polygons.
Vec2 polygon_centroid(const Polygon& poly);

/// Point membership for convex polygons (closure, within tol).
bool point_in(const Polygon& poly, const Vec2& x, double tol = kPointOnBoundaryTol);
bool is_convex_ccw(const Polygon& poly, double tol = 1e-9);

/// Welds duplicate vertices and removes collinear ones; empties polygons
/// that degenerate below three vertices.
Polygon normalized(Polygon poly);

/// poly ∩ {normal . x <= offset}. Empty output is a value, not an error.
Polygon clip_halfplane(const Polygon& poly, const HalfPlane& h);

/// Distance from an interior point to the polygon boundary; 0 if outside.
double distance_to_boundary(const Polygon& poly, const Vec2& x);
/// Nearest point of the (closed) polygon.
Vec2 project_into(const Polygon& poly, const Vec2& x);

/// Chord of a convex polygon on the boundary line of h, if longer than min_len.
std::optional<std::pair<Vec2, Vec2>> polygon_line_chord(const Polygon& poly, const HalfPlane& h,
                                                        double min_len = kMinFaceLength);

Polygon make_rect(double x0, double y0, double x1, double y1);
inline Polygon unit_square() { return make_rect(0, 0, 1, 1); }

/// Ordered positions and weights of the power generators. Weights carry
/// squared-length units; positions must be pairwise distinct.
struct PowerGeneratorSet {
  std::vector<Vec2> positions;
  std::vector<double> weights;

  int size() const { return static_cast<int>(positions.size()); }

  /// Throws CoincidentGenerators / InvalidParams on invariant violations.
  void validate(const Polygon* region = nullptr) const;
};

struct PowerDiagramFace {
  int i, j;   // i < j
  Vec2 a, b;  // segment endpoints on the bisector
};

struct PowerDiagram {
  std::vector<Polygon> cells;            // may contain empty cells
  std::vector<PowerDiagramFace> faces;   // one entry per unordered neighbor pair
  std::vector<std::vector<int>> neighbors;
};

/// Half-plane of g_i's dominance over g_j:
///   (g_j - g_i)^T x <= (|g_j|^2 - |g_i|^2 + w_i - w_j) / 2
HalfPlane power_bisector(const Vec2& gi, double wi, const Vec2& gj, double wj);

/// Pairwise half-plane clipping, O(m^2). Faces shorter than kMinFaceLength
/// do not create neighbor links.
PowerDiagram power_diagram(const Polygon& region, const PowerGeneratorSet& gens);

}  // namespace equipart
