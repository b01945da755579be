#include "equipart/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "equipart/rng.hpp"

namespace equipart {

namespace fs = std::filesystem;
using nlohmann::json;

void SimConfig::validate() const {
  if (region.size() < 3) throw InvalidParams("config region needs at least 3 vertices");
  if (!is_convex_ccw(region)) throw InvalidParams("config region must be convex and CCW");
  if (m < 1) throw InvalidParams("config m must be >= 1");
  if (!(dt > 0)) throw InvalidParams("config dt must be > 0");
  if (steps < 1) throw InvalidParams("config steps must be >= 1");
  params.validate(m);
  quad.validate();
  if (law == LawKind::WeightsOnly || !params.target_fractions) return;
  throw InvalidParams("target_fractions apply to the weights law only");
}

LawKind law_from_string(const std::string& name) {
  if (name == "weights") return LawKind::WeightsOnly;
  if (name == "centroidal") return LawKind::Centroidal;
  if (name == "voronoi") return LawKind::VoronoiDefect;
  if (name == "combined") return LawKind::Combined;
  if (name == "beta") return LawKind::WeightsOnly;  // beta = weights law with fractions
  throw InvalidParams("unknown law '" + name + "'");
}

std::string law_to_string(LawKind law) {
  switch (law) {
    case LawKind::WeightsOnly: return "weights";
    case LawKind::Centroidal: return "centroidal";
    case LawKind::VoronoiDefect: return "voronoi";
    case LawKind::Combined: return "combined";
  }
  return "?";
}

namespace {

DensityField density_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") return DensityField::uniform(j.value("value", 1.0));
  if (type == "gaussian") {
    const auto c = j.at("center");
    return DensityField::gaussian(Vec2(c.at(0).get<double>(), c.at(1).get<double>()),
                                  j.at("rate").get<double>(), j.value("amplitude", 1.0));
  }
  if (type == "grid") {
    const auto o = j.at("origin");
    const auto rows = j.at("values");
    const long nr = static_cast<long>(rows.size());
    const long nc = nr > 0 ? static_cast<long>(rows.at(0).size()) : 0;
    Eigen::MatrixXd values(nr, nc);
    for (long r = 0; r < nr; ++r) {
      if (static_cast<long>(rows.at(r).size()) != nc)
        throw InvalidParams("grid density rows must have equal length");
      for (long c = 0; c < nc; ++c) values(r, c) = rows.at(r).at(c).get<double>();
    }
    return DensityField::grid(Vec2(o.at(0).get<double>(), o.at(1).get<double>()),
                              j.at("cell_size").get<double>(), std::move(values));
  }
  throw InvalidParams("unknown density type '" + type + "'");
}

void params_from_json(const json& j, LawParams& p) {
  if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
  if (j.contains("beta_theta")) p.beta_theta = j["beta_theta"].get<double>();
  if (j.contains("Delta")) p.Delta = j["Delta"].get<double>();
  if (j.contains("delta")) p.delta = j["delta"].get<double>();
  if (j.contains("eps1")) p.eps1 = j["eps1"].get<double>();
  if (j.contains("eps2")) p.eps2 = j["eps2"].get<double>();
  if (j.contains("eps3")) p.eps3 = j["eps3"].get<double>();
  if (j.contains("weight_gain")) p.weight_gain = j["weight_gain"].get<double>();
  if (j.contains("target_fractions"))
    p.target_fractions = j["target_fractions"].get<std::vector<double>>();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SimConfig SimConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  SimConfig cfg;
  cfg.region.vertices.clear();
  for (const auto& v : j.at("region"))
    cfg.region.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  cfg.density = density_from_json(j.at("density"));
  cfg.m = j.at("m").get<int>();
  cfg.law = law_from_string(j.at("law").get<std::string>());
  cfg.dt = j.value("dt", 0.01);
  cfg.steps = j.value("steps", 800);
  cfg.seed = j.value("seed", uint64_t{0});
  cfg.params = LawParams::defaults_for(cfg.region);
  if (j.contains("params")) params_from_json(j["params"], cfg.params);
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    cfg.outputs.csv_path = o.value("csv", cfg.outputs.csv_path);
    cfg.outputs.snapshot_every = o.value("snapshot_every", cfg.outputs.snapshot_every);
  }
  if (j.at("law").get<std::string>() == "beta" && !cfg.params.target_fractions)
    throw InvalidParams("law 'beta' requires params.target_fractions");
  cfg.validate();
  return cfg;
}

SimConfig SimConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

PowerGeneratorSet init_state(const SimConfig& config) {
  config.validate();
  Xoshiro256pp rng(config.seed);
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Vec2& v : config.region.vertices) {
    x0 = std::min(x0, v.x());
    x1 = std::max(x1, v.x());
    y0 = std::min(y0, v.y());
    y1 = std::max(y1, v.y());
  }
  const double min_sep = 1e-6 * polygon_diameter(config.region);

  PowerGeneratorSet gens;
  gens.weights.assign(config.m, 0.0);
  int draws = 0;
  while (static_cast<int>(gens.positions.size()) < config.m) {
    if (++draws > 100000) throw InitFailed("rejection sampling exhausted 1e5 draws");
    const Vec2 p(rng.uniform(x0, x1), rng.uniform(y0, y1));
    if (!point_in(config.region, p)) continue;
    bool ok = true;
    for (const Vec2& q : gens.positions)
      if ((p - q).norm() <= min_sep) {
        ok = false;
        break;
      }
    if (ok) gens.positions.push_back(p);
  }
  return gens;
}

std::string csv_header() {
  return "step,t,HV,area_error,voronoi_defect,Q_mean,min_cell_measure,max_cell_measure,"
         "sum_weights,dt_effective";
}

std::string csv_row(const StepRecord& r) {
  std::ostringstream os;
  os << r.step << ',' << format_double(r.t) << ',' << format_double(r.hv) << ','
     << format_double(r.area_error) << ',' << format_double(r.voronoi_defect) << ','
     << format_double(r.q_mean) << ',' << format_double(r.min_mass) << ','
     << format_double(r.max_mass) << ',' << format_double(r.sum_weights) << ','
     << format_double(r.dt_effective);
  return os.str();
}

namespace {

StepRecord make_record(int step, double t, double dt_eff, const StateEval& eval,
                       const PowerGeneratorSet& gens) {
  const PartitionMetrics m = compute_metrics(eval.diagram, gens, eval.mass);
  StepRecord r;
  r.step = step;
  r.t = t;
  r.hv = eval.objective;
  r.area_error = m.area_error;
  r.voronoi_defect = m.voronoi_defect;
  r.q_mean = m.q_mean;
  r.min_mass = m.min_mass;
  r.max_mass = m.max_mass;
  r.sum_weights = 0.0;
  for (double w : gens.weights) r.sum_weights += w;
  r.dt_effective = dt_eff;
  return r;
}

void write_snapshots(const std::string& out_dir, int step, double t,
                     const SimConfig& config, const PowerGeneratorSet& gens,
                     const StateEval& eval) {
  char name[64];
  std::snprintf(name, sizeof(name), "state_%06d", step);
  write_state_json(out_dir + "/" + name + ".json", step, t, gens, eval.diagram);
  write_svg_snapshot(out_dir + "/" + name + ".svg", config.region, eval.diagram, gens,
                     eval.centroid);
}

}  // namespace

RunRecord run(const SimConfig& config, const std::string& out_dir) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  if (!out_dir.empty()) fs::create_directories(out_dir);

  RunRecord record;
  PowerGeneratorSet gens = init_state(config);
  StateEval eval = evaluate_state(config.region, gens, config.density, config.quad,
                                  config.params.target_fractions);
  double t = 0.0;
  double dt_next = config.dt;
  const int cadence = config.outputs.snapshot_every;

  for (int step = 1; step <= config.steps; ++step) {
    try {
      StepResult res = euler_step(config.region, gens, eval, config.law, config.density,
                                  config.params, config.quad, dt_next);
      gens = std::move(res.gens);
      eval = std::move(res.eval);
      t += res.dt_effective;
      // warm-started step size: retry cheaply after halvings, recover toward dt
      dt_next = std::min(config.dt, 2.0 * res.dt_effective);
      record.rows.push_back(make_record(step, t, res.dt_effective, eval, gens));
      if (!out_dir.empty() && cadence > 0 && (step % cadence == 0 || step == config.steps))
        write_snapshots(out_dir, step, t, config, gens, eval);
    } catch (const StepFailed&) {
      record.failed = true;
      record.failed_step = step;
      break;
    }
  }

  record.final_state = gens;
  record.final_cells = eval.diagram.cells;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!out_dir.empty()) {
    std::ofstream csv(out_dir + "/" + config.outputs.csv_path);
    csv << csv_header() << '\n';
    for (const auto& row : record.rows) csv << csv_row(row) << '\n';
  }
  return record;
}

BatchStats batch(const SimConfig& config, int n_runs, const std::string& out_dir) {
  if (n_runs < 1) throw InvalidParams("batch needs n_runs >= 1");
  BatchStats stats;
  stats.min_q = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_runs; ++k) {
    SimConfig cfg = config;
    cfg.seed = config.seed + static_cast<uint64_t>(k);
    std::string dir;
    if (!out_dir.empty()) dir = out_dir + "/run_" + std::to_string(k);
    const RunRecord rec = run(cfg, dir);
    if (rec.failed || rec.rows.empty()) {
      ++stats.runs_failed;
      continue;
    }
    const StepRecord& last = rec.rows.back();
    stats.finals.push_back(last);
    ++stats.runs_ok;
    stats.mean_eps += last.area_error;
    stats.max_eps = std::max(stats.max_eps, last.area_error);
    stats.mean_eta += last.voronoi_defect;
    stats.max_eta = std::max(stats.max_eta, last.voronoi_defect);
    stats.mean_q += last.q_mean;
    stats.min_q = std::min(stats.min_q, last.q_mean);
  }
  if (stats.runs_ok > 0) {
    stats.mean_eps /= stats.runs_ok;
    stats.mean_eta /= stats.runs_ok;
    stats.mean_q /= stats.runs_ok;
  }
  return stats;
}

void write_svg_snapshot(const std::string& path, const Polygon& region,
                        const PowerDiagram& diagram, const PowerGeneratorSet& gens,
                        const std::vector<Vec2>& centroids) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Vec2& v : region.vertices) {
    x0 = std::min(x0, v.x());
    x1 = std::max(x1, v.x());
    y0 = std::min(y0, v.y());
    y1 = std::max(y1, v.y());
  }
  const double span = std::max(x1 - x0, y1 - y0);
  const double scale = 640.0 / span;
  const double margin = 16.0;
  auto sx = [&](double x) { return margin + (x - x0) * scale; };
  auto sy = [&](double y) { return margin + (y1 - y) * scale; };  // y up

  std::ofstream svg(path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 640 + 2 * margin
      << "\" height=\"" << 640 + 2 * margin << "\">\n";
  for (size_t i = 0; i < diagram.cells.size(); ++i) {
    const auto& cell = diagram.cells[i];
    if (cell.empty()) continue;
    svg << "<polygon points=\"";
    for (const Vec2& v : cell.vertices) svg << sx(v.x()) << ',' << sy(v.y()) << ' ';
    svg << "\" fill=\"hsl(" << (i * 360.0 / diagram.cells.size())
        << ",45%,85%)\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  }
  svg << "<polygon points=\"";
  for (const Vec2& v : region.vertices) svg << sx(v.x()) << ',' << sy(v.y()) << ' ';
  svg << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\"/>\n";
  for (const Vec2& c : centroids)
    svg << "<circle cx=\"" << sx(c.x()) << "\" cy=\"" << sy(c.y())
        << "\" r=\"4\" fill=\"#3366cc\"/>\n";
  for (const Vec2& g : gens.positions)
    svg << "<rect x=\"" << sx(g.x()) - 4 << "\" y=\"" << sy(g.y()) - 4
        << "\" width=\"8\" height=\"8\" fill=\"#e6c419\" stroke=\"#806c00\"/>\n";
  svg << "</svg>\n";
}

void write_state_json(const std::string& path, int step, double t,
                      const PowerGeneratorSet& gens, const PowerDiagram& diagram) {
  json j;
  j["step"] = step;
  j["t"] = t;
  auto& pos = j["positions"] = json::array();
  for (const Vec2& g : gens.positions) pos.push_back({g.x(), g.y()});
  j["weights"] = gens.weights;
  auto& cells = j["cells"] = json::array();
  for (const auto& cell : diagram.cells) {
    json poly = json::array();
    for (const Vec2& v : cell.vertices) poly.push_back({v.x(), v.y()});
    cells.push_back(std::move(poly));
  }
  std::ofstream out(path);
  out << j.dump(1) << '\n';
}

StateSnapshot read_state_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open state file '" + path + "'");
  json j;
  in >> j;
  StateSnapshot snap;
  snap.step = j.at("step").get<int>();
  snap.t = j.at("t").get<double>();
  for (const auto& p : j.at("positions"))
    snap.gens.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  snap.gens.weights = j.at("weights").get<std::vector<double>>();
  return snap;
}

StepRecord metrics_from_state(const Polygon& region, const DensityField& density,
                              const PowerGeneratorSet& gens, const QuadratureSpec& quad) {
  const StateEval eval = evaluate_state(region, gens, density, quad);
  return make_record(0, 0.0, 0.0, eval, gens);
}

}  // namespace equipart
