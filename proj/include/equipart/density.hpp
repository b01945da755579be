#pragma once

#include <Eigen/Dense>

#include "equipart/geometry.hpp"

namespace equipart {

inline constexpr double kZeroMassThreshold = 1e-14;

enum class DensityKind { Uniform, Gaussian, Grid };

/// Nonnegative density over the workspace. Uniform and piecewise-constant
/// grid densities are integrated exactly; the gaussian goes through quadrature.
struct DensityField {
  DensityKind kind = DensityKind::Uniform;

  double value = 1.0;  // uniform

  Vec2 center = Vec2::Zero();  // gaussian: amplitude * exp(-rate * |x - center|^2)
  double rate = 1.0;
  double amplitude = 1.0;

  Vec2 grid_origin = Vec2::Zero();  // grid: values(row, col) over square cells,
  double grid_cell = 1.0;           // row along y, col along x; zero outside
  Eigen::MatrixXd grid_values;

  double operator()(const Vec2& x) const;

  static DensityField uniform(double v = 1.0);
  static DensityField gaussian(const Vec2& center, double rate, double amplitude = 1.0);
  static DensityField grid(const Vec2& origin, double cell, Eigen::MatrixXd values);
};

/// Fixed quadrature: collapsed Gauss product rules on fan triangles, composite
/// Gauss-Legendre on segments. Pieces are subdivided to the max-size caps so
/// smooth densities integrate to ~1e-9 on unit-scale workspaces.
struct QuadratureSpec {
  int triangle_degree = 6;        // polynomial exactness degree, >= 2
  int segment_points = 8;         // Gauss-Legendre points per piece, >= 2
  double max_triangle_edge = 0.05;
  double max_segment_length = 0.1;

  void validate() const;
};

struct RegionMoments {
  double mass = 0.0;
  Vec2 first = Vec2::Zero();  // integral of x * density
};

/// Integral of the density over a simple polygon (signed fan from vertex 0).
double region_measure(const Polygon& poly, const DensityField& density,
                      const QuadratureSpec& quad = {});
RegionMoments region_moments(const Polygon& poly, const DensityField& density,
                             const QuadratureSpec& quad = {});
inline double region_mass(const Polygon& poly, const DensityField& density,
                          const QuadratureSpec& quad = {}) {
  return region_measure(poly, density, quad);
}
/// Throws ZeroMassRegion when the region mass is at or below kZeroMassThreshold.
Vec2 region_centroid(const Polygon& poly, const DensityField& density,
                     const QuadratureSpec& quad = {});

/// Line integral of the density along segment [a, b].
double face_integral(const Vec2& a, const Vec2& b, const DensityField& density,
                     const QuadratureSpec& quad = {});
/// Line integral of (x - base) * density along segment [a, b].
Vec2 face_first_moment(const Vec2& a, const Vec2& b, const Vec2& base,
                       const DensityField& density, const QuadratureSpec& quad = {});

struct SegmentMoments {
  double mass = 0.0;
  Vec2 first = Vec2::Zero();  // integral of x * density along the segment
};
SegmentMoments face_moments(const Vec2& a, const Vec2& b, const DensityField& density,
                            const QuadratureSpec& quad = {});

/// Gauss-Legendre nodes/weights on [-1, 1], cached per point count.
const std::vector<std::pair<double, double>>& gauss_legendre(int points);

}  // namespace equipart
