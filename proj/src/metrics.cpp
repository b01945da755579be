#include "equipart/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace equipart {

double area_error(const std::vector<double>& masses) {
  if (masses.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(masses.begin(), masses.end());
  return *hi - *lo;
}

double area_error(const PowerDiagram& diagram, const DensityField& density,
                  const QuadratureSpec& quad) {
  std::vector<double> masses(diagram.cells.size());
  for (size_t i = 0; i < diagram.cells.size(); ++i)
    masses[i] = region_measure(diagram.cells[i], density, quad);
  return area_error(masses);
}

double voronoi_defect(const PowerDiagram& diagram, const PowerGeneratorSet& gens) {
  if (diagram.faces.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& face : diagram.faces) {
    const Vec2 d = gens.positions[face.j] - gens.positions[face.i];
    const double gamma2 = d.squaredNorm();
    // bisector crossing of the generators' supporting line, as a fraction of gamma
    const double s = (gens.weights[face.i] - gens.weights[face.j] + gamma2) / (2.0 * gamma2);
    sum += 2.0 * std::abs(s - 0.5);  // ordered pair visits cancel the 1/(2N) against 2N terms
  }
  return sum / static_cast<double>(diagram.faces.size());
}

double isoperimetric_ratio(const Polygon& poly) {
  if (poly.empty()) throw InvalidParams("isoperimetric ratio of empty polygon");
  const double p = polygon_perimeter(poly);
  if (p <= 0) throw InvalidParams("isoperimetric ratio of degenerate polygon");
  return 4.0 * M_PI * polygon_area(poly) / (p * p);
}

double partition_q(const PowerDiagram& diagram, int* excluded) {
  double sum = 0.0;
  int count = 0, skipped = 0;
  for (const auto& cell : diagram.cells) {
    if (cell.empty()) {
      ++skipped;
      continue;
    }
    sum += isoperimetric_ratio(cell);
    ++count;
  }
  if (excluded != nullptr) *excluded = skipped;
  return count > 0 ? sum / count : 0.0;
}

PartitionMetrics compute_metrics(const PowerDiagram& diagram, const PowerGeneratorSet& gens,
                                 const std::vector<double>& masses) {
  PartitionMetrics m;
  m.cell_mass = masses;
  m.area_error = area_error(masses);
  m.voronoi_defect = voronoi_defect(diagram, gens);
  m.q_mean = partition_q(diagram, &m.empty_cells);
  m.cell_q.reserve(diagram.cells.size());
  for (const auto& cell : diagram.cells)
    m.cell_q.push_back(cell.empty() ? 0.0 : isoperimetric_ratio(cell));
  const auto [lo, hi] = std::minmax_element(masses.begin(), masses.end());
  m.min_mass = *lo;
  m.max_mass = *hi;
  double hv = 0.0;
  for (double mass : masses) hv += mass > 0 ? 1.0 / mass : 0.0;
  m.hv = hv;
  return m;
}

}  // namespace equipart
