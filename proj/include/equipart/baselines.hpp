#pragma once

#include <string>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"

namespace equipart {

/// Workspace cut into equal-measure slabs orthogonal to a direction.
struct SlicedPartition {
  Vec2 direction;               // unit vector
  std::vector<double> offsets;  // m - 1 cut offsets along the direction
  std::vector<Polygon> cells;
};

SlicedPartition slice_partition(const Polygon& region, const DensityField& density, int m,
                                const Vec2& direction, const QuadratureSpec& quad = {});

/// Equal-measure angular sectors swept around an interior pivot.
std::vector<Polygon> sweep_partition(const Polygon& region, const DensityField& density, int m,
                                     const Vec2& pivot, double start_angle,
                                     const QuadratureSpec& quad = {});

/// Collinear equal-weight generators whose Voronoi diagram is equitable
/// (constant density). s are the slab boundaries, t the generator offsets
/// along the direction, one per slab interval.
struct UnimodalVoronoi {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<Vec2> positions;
};

UnimodalVoronoi unimodal_voronoi(const Polygon& region, const DensityField& density, int m,
                                 const Vec2& direction, const QuadratureSpec& quad = {});

/// Piecewise-constant density on [breakpoints.front(), breakpoints.back()].
struct OneDDensity {
  std::vector<double> breakpoints;  // strictly increasing, size = values.size() + 1
  std::vector<double> values;       // >= 0, total mass > 0

  void validate() const;
  double total_mass() const;
  /// Smallest x with cumulative mass target; plateau midpoint when the
  /// quantile is non-unique (flags degenerate in the checker).
  double quantile(double target_mass, bool* degenerate = nullptr) const;
};

/// Outcome of the 1-D equitable-Voronoi feasibility check. The boundary
/// points b are the equitable quantiles; generators obey the reflection
/// recursion g_{i+1} = 2 b_i - g_i, leaving g_1 as the only free parameter.
struct OneDCheckResult {
  bool feasible = false;
  bool degenerate_quantiles = false;
  std::vector<double> boundaries;        // b_1 .. b_{m-1}
  std::vector<double> generators;        // witness when feasible
  std::vector<double> offsets;           // a_i with g_i = (-1)^(i-1) g_1 + a_i
  std::vector<std::pair<double, double>> g1_intervals;  // per-generator bounds on g_1
  double g1_low = 0.0, g1_high = 0.0;    // intersection of the intervals
  int conflict_low_index = -1;   // generator forcing the largest lower bound (infeasible case)
  int conflict_high_index = -1;  // generator forcing the smallest upper bound
  std::string detail;
};

OneDCheckResult oned_equitable_voronoi_check(const OneDDensity& rho, int m);

}  // namespace equipart
