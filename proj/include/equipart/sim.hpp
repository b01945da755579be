#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "equipart/dynamics.hpp"
#include "equipart/metrics.hpp"

namespace equipart {

struct OutputSpec {
  std::string csv_path = "metrics.csv";
  int snapshot_every = 100;  // plus the final step; <= 0 disables snapshots
};

struct SimConfig {
  Polygon region;
  DensityField density;
  int m = 1;
  LawKind law = LawKind::Combined;
  double dt = 0.01;
  int steps = 800;
  uint64_t seed = 0;
  LawParams params;          // resolved against the region unless overridden
  QuadratureSpec quad;
  OutputSpec outputs;

  void validate() const;
  /// Parses the JSON object documented in the README (keys: region, density,
  /// m, law, dt, steps, seed, params, outputs).
  static SimConfig from_json_file(const std::string& path);
  static SimConfig from_json_text(const std::string& text);
};

LawKind law_from_string(const std::string& name);
std::string law_to_string(LawKind law);

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double hv = 0.0;
  double area_error = 0.0;
  double voronoi_defect = 0.0;
  double q_mean = 0.0;
  double min_mass = 0.0;
  double max_mass = 0.0;
  double sum_weights = 0.0;
  double dt_effective = 0.0;
};

struct RunRecord {
  std::vector<StepRecord> rows;  // one row per accepted step
  PowerGeneratorSet final_state;
  std::vector<Polygon> final_cells;
  double wall_seconds = 0.0;
  bool failed = false;
  int failed_step = -1;
};

/// Seeded rejection sampling of m distinct positions in the region, all
/// weights zero. Throws InitFailed when 1e5 draws cannot place a point.
PowerGeneratorSet init_state(const SimConfig& config);

/// Runs the configured law. When out_dir is nonempty, writes the metrics CSV,
/// periodic SVG + JSON state snapshots, and the final snapshot there.
RunRecord run(const SimConfig& config, const std::string& out_dir = "");

struct BatchStats {
  double mean_eps = 0.0, max_eps = 0.0;
  double mean_eta = 0.0, max_eta = 0.0;
  double mean_q = 0.0, min_q = 0.0;
  int runs_ok = 0, runs_failed = 0;
  std::vector<StepRecord> finals;  // final row per successful run
};

/// Runs n_runs with seeds seed+0 .. seed+n_runs-1 and aggregates the final
/// metrics. Per-run outputs land in out_dir/run_<k>/ when out_dir is set.
BatchStats batch(const SimConfig& config, int n_runs, const std::string& out_dir = "");

std::string csv_header();
std::string csv_row(const StepRecord& row);

void write_svg_snapshot(const std::string& path, const Polygon& region,
                        const PowerDiagram& diagram, const PowerGeneratorSet& gens,
                        const std::vector<Vec2>& centroids);
void write_state_json(const std::string& path, int step, double t,
                      const PowerGeneratorSet& gens, const PowerDiagram& diagram);

struct StateSnapshot {
  int step = 0;
  double t = 0.0;
  PowerGeneratorSet gens;
};
StateSnapshot read_state_json(const std::string& path);

/// Rebuilds the diagram from a snapshot and recomputes the metric columns.
StepRecord metrics_from_state(const Polygon& region, const DensityField& density,
                              const PowerGeneratorSet& gens, const QuadratureSpec& quad = {});

}  // namespace equipart
