#pragma once

#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"

namespace equipart {

struct PartitionMetrics {
  double area_error = 0.0;      // max cell mass - min cell mass
  double voronoi_defect = 0.0;  // normalized bisector offset from segment midpoints
  double q_mean = 0.0;          // mean isoperimetric ratio over nonempty cells
  double hv = 0.0;
  double min_mass = 0.0;
  double max_mass = 0.0;
  std::vector<double> cell_mass;
  std::vector<double> cell_q;
  int empty_cells = 0;  // cells excluded from the Q average
};

double area_error(const std::vector<double>& masses);
double area_error(const PowerDiagram& diagram, const DensityField& density,
                  const QuadratureSpec& quad = {});

/// Mean over neighbor pairs of |crossing - midpoint| / (gamma / 2), where the
/// crossing is the bisector's intersection with the line through the two
/// generator positions. 0 exactly when all weights are equal.
double voronoi_defect(const PowerDiagram& diagram, const PowerGeneratorSet& gens);

/// 4 pi area / perimeter^2, in (0, 1]. Throws InvalidParams for empty polygons.
double isoperimetric_ratio(const Polygon& poly);

/// Mean isoperimetric ratio; empty cells are skipped and counted.
double partition_q(const PowerDiagram& diagram, int* excluded = nullptr);

PartitionMetrics compute_metrics(const PowerDiagram& diagram, const PowerGeneratorSet& gens,
                                 const std::vector<double>& masses);

}  // namespace equipart
