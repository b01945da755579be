#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "equipart/baselines.hpp"
#include "equipart/sim.hpp"

using namespace equipart;
using nlohmann::json;

namespace {

Vec2 parse_vec2(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw InvalidParams("expected 'x,y' but got '" + text + "'");
  return Vec2(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

void apply_overrides(SimConfig& cfg, const std::string& law, int steps, double dt,
                     int64_t seed, int snapshots) {
  if (!law.empty()) cfg.law = law_from_string(law);
  if (steps > 0) cfg.steps = steps;
  if (dt > 0) cfg.dt = dt;
  if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
  if (snapshots >= 0) cfg.outputs.snapshot_every = snapshots;
}

void print_summary(const BatchStats& stats) {
  std::printf("runs ok/failed: %d/%d\n", stats.runs_ok, stats.runs_failed);
  std::printf("%-10s %-12s %-12s %-12s %-12s %-12s %-12s\n", "", "mean_eps", "max_eps",
              "mean_eta", "max_eta", "mean_Q", "min_Q");
  std::printf("%-10s %-12.5g %-12.5g %-12.5g %-12.5g %-12.5g %-12.5g\n", "final",
              stats.mean_eps, stats.max_eps, stats.mean_eta, stats.max_eta, stats.mean_q,
              stats.min_q);
}

json cells_to_json(const std::vector<Polygon>& cells, const DensityField& density,
                   const QuadratureSpec& quad) {
  json out = json::array();
  for (const auto& cell : cells) {
    json entry;
    entry["measure"] = region_measure(cell, density, quad);
    json poly = json::array();
    for (const Vec2& v : cell.vertices) poly.push_back({v.x(), v.y()});
    entry["vertices"] = std::move(poly);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-diagram partitioning simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", law;
  int steps = -1, snapshots = -1;
  double dt = -1;
  int64_t seed = -1;

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    cmd->add_option("--config", config_path, "JSON config file")->required(config_required);
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--law", law, "law override: weights|centroidal|voronoi|combined");
    cmd->add_option("--steps", steps, "step count override");
    cmd->add_option("--dt", dt, "step size override");
    cmd->add_option("--seed", seed, "seed override");
    cmd->add_option("--snapshots", snapshots, "snapshot cadence override (steps)");
  };

  auto* cmd_run = app.add_subcommand("run", "single simulation run");
  add_common(cmd_run);

  auto* cmd_batch = app.add_subcommand("batch", "aggregate runs over consecutive seeds");
  int n_runs = 1;
  add_common(cmd_batch);
  cmd_batch->add_option("--runs", n_runs, "number of runs")->required();

  auto* cmd_baseline = app.add_subcommand("baseline", "centralized partitioning baselines");
  std::string kind = "slice", direction = "1,0", pivot_text;
  double start_angle = 0.0;
  int m_override = -1;
  add_common(cmd_baseline);
  cmd_baseline->add_option("kind", kind, "slice|sweep|unimodal")->required();
  cmd_baseline->add_option("--direction", direction, "slice/unimodal direction 'x,y'");
  cmd_baseline->add_option("--pivot", pivot_text, "sweep pivot 'x,y' (default: region centroid)");
  cmd_baseline->add_option("--start-angle", start_angle, "sweep start ray angle (radians)");
  cmd_baseline->add_option("--m", m_override, "number of cells override");

  auto* cmd_check = app.add_subcommand("check-1d", "1-D equitable Voronoi feasibility check");
  std::string density_path;
  int check_m = 5;
  bool check_uniform = false;
  cmd_check->add_option("--density", density_path,
                        "JSON file with {\"breakpoints\":[...],\"values\":[...]}");
  cmd_check->add_flag("--uniform", check_uniform, "use the uniform density on [0,1]");
  cmd_check->add_option("--m", check_m, "number of generators")->required();

  auto* cmd_metrics = app.add_subcommand("metrics", "recompute metrics from a state snapshot");
  std::string state_path;
  add_common(cmd_metrics);
  cmd_metrics->add_option("--state", state_path, "state JSON snapshot")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      SimConfig cfg = SimConfig::from_json_file(config_path);
      apply_overrides(cfg, law, steps, dt, seed, snapshots);
      const RunRecord rec = run(cfg, out_dir);
      if (rec.failed) {
        std::fprintf(stderr, "step %d failed; partial record saved to %s\n",
                     rec.failed_step, out_dir.c_str());
        return 2;
      }
      const StepRecord& last = rec.rows.back();
      std::printf("%s\n%s\n", csv_header().c_str(), csv_row(last).c_str());
      std::printf("wall time: %.2fs, outputs in %s\n", rec.wall_seconds, out_dir.c_str());
    } else if (cmd_batch->parsed()) {
      SimConfig cfg = SimConfig::from_json_file(config_path);
      apply_overrides(cfg, law, steps, dt, seed, snapshots);
      const BatchStats stats = batch(cfg, n_runs, out_dir);
      print_summary(stats);
      std::ofstream summary(out_dir + "/summary.csv");
      summary << "run," << csv_header() << '\n';
      for (size_t k = 0; k < stats.finals.size(); ++k)
        summary << k << ',' << csv_row(stats.finals[k]) << '\n';
    } else if (cmd_baseline->parsed()) {
      SimConfig cfg = SimConfig::from_json_file(config_path);
      apply_overrides(cfg, law, steps, dt, seed, snapshots);
      const int m = m_override > 0 ? m_override : cfg.m;
      std::filesystem::create_directories(out_dir);
      json out;
      if (kind == "slice") {
        const SlicedPartition part =
            slice_partition(cfg.region, cfg.density, m, parse_vec2(direction), cfg.quad);
        out["offsets"] = part.offsets;
        out["cells"] = cells_to_json(part.cells, cfg.density, cfg.quad);
      } else if (kind == "sweep") {
        const Vec2 pivot =
            pivot_text.empty() ? polygon_centroid(cfg.region) : parse_vec2(pivot_text);
        const auto cells =
            sweep_partition(cfg.region, cfg.density, m, pivot, start_angle, cfg.quad);
        out["pivot"] = {pivot.x(), pivot.y()};
        out["cells"] = cells_to_json(cells, cfg.density, cfg.quad);
      } else if (kind == "unimodal") {
        const UnimodalVoronoi uv =
            unimodal_voronoi(cfg.region, cfg.density, m, parse_vec2(direction), cfg.quad);
        out["s"] = uv.s;
        out["t"] = uv.t;
        auto& pos = out["positions"] = json::array();
        for (const Vec2& g : uv.positions) pos.push_back({g.x(), g.y()});
        PowerGeneratorSet gens;
        gens.positions = uv.positions;
        gens.weights.assign(m, 0.0);
        out["cells"] =
            cells_to_json(power_diagram(cfg.region, gens).cells, cfg.density, cfg.quad);
      } else {
        throw InvalidParams("unknown baseline kind '" + kind + "'");
      }
      const std::string path = out_dir + "/baseline_" + kind + ".json";
      std::ofstream(path) << out.dump(1) << '\n';
      std::printf("wrote %s\n", path.c_str());
    } else if (cmd_check->parsed()) {
      OneDDensity rho;
      if (check_uniform || density_path.empty()) {
        rho.breakpoints = {0.0, 1.0};
        rho.values = {1.0};
      } else {
        std::ifstream in(density_path);
        if (!in) throw InvalidParams("cannot open '" + density_path + "'");
        json j;
        in >> j;
        rho.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        rho.values = j.at("values").get<std::vector<double>>();
      }
      const OneDCheckResult res = oned_equitable_voronoi_check(rho, check_m);
      std::printf("feasible: %s\n", res.feasible ? "yes" : "no");
      if (res.degenerate_quantiles)
        std::printf("note: some equitable boundaries are non-unique (zero-density plateau)\n");
      std::printf("boundaries:");
      for (double b : res.boundaries) std::printf(" %.12g", b);
      std::printf("\n");
      if (res.feasible) {
        std::printf("generators:");
        for (double g : res.generators) std::printf(" %.12g", g);
        std::printf("\n");
      } else {
        std::printf("certificate: %s\n", res.detail.c_str());
      }
      return res.feasible ? 0 : 1;
    } else if (cmd_metrics->parsed()) {
      SimConfig cfg = SimConfig::from_json_file(config_path);
      const StateSnapshot snap = read_state_json(state_path);
      StepRecord row = metrics_from_state(cfg.region, cfg.density, snap.gens, cfg.quad);
      row.step = snap.step;
      row.t = snap.t;
      std::printf("%s\n%s\n", csv_header().c_str(), csv_row(row).c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
