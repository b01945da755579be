#include "equipart/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace equipart {

void LawParams::validate(int m) const {
  if (alpha <= 0) throw InvalidParams("alpha must be > 0");
  if (beta_theta <= 0) throw InvalidParams("beta_theta must be > 0");
  if (!(Delta > 0) || !(delta > 0) || !(delta < Delta))
    throw InvalidParams("need 0 < delta < Delta");
  if (!(eps1 > 0) || !(eps2 > eps1) || !(eps3 > 0))
    throw InvalidParams("need 0 < eps1 < eps2 and eps3 > 0");
  if (weight_gain <= 0) throw InvalidParams("weight_gain must be > 0");
  if (target_fractions) {
    if (static_cast<int>(target_fractions->size()) != m)
      throw InvalidParams("target_fractions size must match the agent count");
    double sum = 0.0;
    for (double b : *target_fractions) {
      if (!(b > 0) || !(b < 1)) throw InvalidParams("target fractions must lie in (0,1)");
      sum += b;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidParams("target fractions must sum to 1");
  }
}

LawParams LawParams::defaults_for(const Polygon& region) {
  LawParams p;
  const double diam = polygon_diameter(region);
  p.Delta = 0.1 * diam;
  p.delta = p.Delta / 4.0;
  p.eps3 = 0.05 * diam;
  return p;
}

double sat(double a, double b, double x) {
  if (!(a < b)) throw InvalidParams("sat needs a < b");
  if (x > b) return 1.0;
  if (x >= a) return (x - a) / (b - a);
  return 0.0;
}

double theta_smooth(double beta, double x) {
  if (beta <= 0) throw InvalidParams("theta gate needs beta > 0");
  if (x <= 0.0) return 0.0;
  const double t = beta * x;
  return std::exp(-1.0 / (t * t));
}

double psi_gain(double rho, double angle, double Delta, double delta) {
  if (!(delta > 0) || !(delta < Delta)) throw InvalidParams("psi needs 0 < delta < Delta");
  if (rho < 0 || rho > Delta * (1.0 + 1e-12))
    throw InvalidParams("psi applies only for 0 <= rho <= Delta");
  if (angle < -1e-12 || angle > 2 * M_PI + 1e-12)
    throw InvalidParams("psi angle must lie in [0, 2 pi]");
  angle = std::clamp(angle, 0.0, 2 * M_PI);
  if (rho > delta) {
    const double ramp = (rho - delta) / (Delta - delta);
    if (angle < M_PI) return ramp;
    const double s = std::sin(angle);
    return ramp * (1.0 + s) - s;
  }
  if (angle < M_PI) return 0.0;
  return -(rho / delta) * std::sin(angle);
}

double collision_angle(const Vec2& gi, const Vec2& gj, const Vec2& v) {
  const Vec2 d = gj - gi;
  const double len = d.norm();
  if (len <= kMinGeneratorSeparation)
    throw CoincidentGenerators("collision angle of coincident generators");
  if (v.norm() == 0.0) return 1.5 * M_PI;  // maximally safe; multiplier is zero anyway
  const Vec2 u = d / len;
  const Vec2 vx(u.y(), -u.x());
  double angle = std::atan2(v.dot(u), v.dot(vx));
  if (angle < 0) angle += 2 * M_PI;
  return angle;
}

double objective_value(const std::vector<double>& masses,
                       const std::optional<std::vector<double>>& target_fractions) {
  double h = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] <= kZeroMassThreshold) throw EmptyCell(static_cast<int>(i));
    const double beta = target_fractions ? (*target_fractions)[i] : 1.0;
    h += beta * beta / masses[i];
  }
  return h;
}

StateEval evaluate_state(const Polygon& region, const PowerGeneratorSet& gens,
                         const DensityField& density, const QuadratureSpec& quad,
                         const std::optional<std::vector<double>>& target_fractions) {
  StateEval eval;
  eval.diagram = power_diagram(region, gens);
  const int m = gens.size();
  eval.mass.resize(m);
  eval.centroid.resize(m);
  for (int i = 0; i < m; ++i) {
    const RegionMoments mom = region_moments(eval.diagram.cells[i], density, quad);
    eval.mass[i] = mom.mass;
    if (mom.mass <= kZeroMassThreshold) throw EmptyCell(i);
    eval.centroid[i] = mom.first / mom.mass;
    eval.total_mass += mom.mass;
  }
  eval.objective = objective_value(eval.mass, target_fractions);
  return eval;
}

GradientBundle gradient_bundle(const StateEval& eval, const PowerGeneratorSet& gens,
                               const DensityField& density, const QuadratureSpec& quad,
                               const std::optional<std::vector<double>>& target_fractions) {
  const int m = gens.size();
  GradientBundle g;
  g.dH_dw.assign(m, 0.0);
  g.dH_dg.assign(m, Vec2::Zero());
  g.cell_mass = eval.mass;
  g.centroid_offset.resize(m);
  for (int i = 0; i < m; ++i) g.centroid_offset[i] = eval.centroid[i] - gens.positions[i];

  std::vector<double> inv2(m);
  for (int i = 0; i < m; ++i) {
    if (eval.mass[i] <= kZeroMassThreshold) throw EmptyCell(i);
    const double beta = target_fractions ? (*target_fractions)[i] : 1.0;
    inv2[i] = beta * beta / (eval.mass[i] * eval.mass[i]);
  }

  for (const auto& face : eval.diagram.faces) {
    const int i = face.i, j = face.j;
    const double gamma = (gens.positions[j] - gens.positions[i]).norm();
    const SegmentMoments mom = face_moments(face.a, face.b, density, quad);
    const double diff = inv2[j] - inv2[i];
    const double dw = diff * mom.mass / (2.0 * gamma);
    g.dH_dw[i] += dw;
    g.dH_dw[j] -= dw;  // same magnitude, so the weight components cancel exactly
    g.dH_dg[i] += diff * (mom.first - gens.positions[i] * mom.mass) / gamma;
    g.dH_dg[j] -= diff * (mom.first - gens.positions[j] * mom.mass) / gamma;
  }
  return g;
}

double HV_value(const PowerDiagram& diagram, const DensityField& density,
                const QuadratureSpec& quad) {
  std::vector<double> masses(diagram.cells.size());
  for (size_t i = 0; i < diagram.cells.size(); ++i)
    masses[i] = region_measure(diagram.cells[i], density, quad);
  return objective_value(masses);
}

double HV_beta_value(const PowerDiagram& diagram, const DensityField& density,
                     const std::vector<double>& target_fractions, const QuadratureSpec& quad) {
  std::vector<double> masses(diagram.cells.size());
  for (size_t i = 0; i < diagram.cells.size(); ++i)
    masses[i] = region_measure(diagram.cells[i], density, quad);
  return objective_value(masses, target_fractions);
}

namespace {

// Product of collision gains over the generators within Delta of g_i, for a
// motion along `direction`. Empty neighborhood gives the empty product, 1.
double psi_product(const PowerGeneratorSet& gens, int i, const Vec2& direction,
                   const LawParams& params) {
  double prod = 1.0;
  for (int j = 0; j < gens.size() && prod != 0.0; ++j) {
    if (j == i) continue;
    const double rho = (gens.positions[j] - gens.positions[i]).norm();
    if (rho > params.Delta) continue;
    prod *= psi_gain(rho, collision_angle(gens.positions[i], gens.positions[j], direction),
                     params.Delta, params.delta);
  }
  return prod;
}

}  // namespace

Control law_weights_only(const StateEval& eval, const GradientBundle& grad,
                         const PowerGeneratorSet& gens, const LawParams& params) {
  (void)eval;
  const int m = gens.size();
  params.validate(m);
  Control u;
  u.dw.resize(m);
  u.dg.assign(m, Vec2::Zero());
  for (int i = 0; i < m; ++i) u.dw[i] = -params.weight_gain * grad.dH_dw[i];
  return u;
}

Control law_centroidal(const StateEval& eval, const GradientBundle& grad,
                       const PowerGeneratorSet& gens, const LawParams& params) {
  (void)eval;
  const int m = gens.size();
  params.validate(m);
  Control u;
  u.dw.resize(m);
  u.dg.assign(m, Vec2::Zero());
  for (int i = 0; i < m; ++i) {
    u.dw[i] = -params.weight_gain * grad.dH_dw[i];
    const Vec2 descent = -grad.dH_dg[i];
    const Vec2 to_centroid = grad.centroid_offset[i];
    const double gate = theta_smooth(params.beta_theta, to_centroid.dot(descent));
    if (gate == 0.0) continue;  // motion must not oppose the descent direction
    double gain = (2.0 / M_PI) * std::atan(descent.squaredNorm() / params.alpha) * gate;
    gain *= psi_product(gens, i, to_centroid, params);
    u.dg[i] = gain * to_centroid;
  }
  return u;
}

Control law_voronoi_defect(const StateEval& eval, const GradientBundle& grad,
                           const PowerGeneratorSet& gens, const LawParams& params) {
  const int m = gens.size();
  params.validate(m);
  Control u;
  u.dw.resize(m);
  u.dg.assign(m, Vec2::Zero());
  for (int i = 0; i < m; ++i) {
    u.dw[i] = -params.weight_gain * grad.dH_dw[i];
    const double grad_norm = grad.dH_dg[i].norm();
    const double gate1 = sat(params.eps1, params.eps2, grad_norm);
    if (gate1 == 0.0) continue;  // gate first: never divide by the gradient norm below eps1
    const double gate2 =
        sat(0.0, params.eps3, distance_to_boundary(eval.diagram.cells[i], gens.positions[i]));
    double gates = gate1 * gate2;
    if (gates == 0.0) continue;
    const Vec2 angle_vector = gens.weights[i] * grad.dH_dw[i] * grad.dH_dg[i];
    gates *= psi_product(gens, i, angle_vector, params);
    u.dw[i] -= gens.weights[i] * gates;
    u.dg[i] = gens.weights[i] * grad.dH_dw[i] * grad.dH_dg[i] / (grad_norm * grad_norm) * gates;
  }
  return u;
}

Control law_combined(const StateEval& eval, const GradientBundle& grad,
                     const PowerGeneratorSet& gens, const LawParams& params) {
  Control cent = law_centroidal(eval, grad, gens, params);
  const Control vor = law_voronoi_defect(eval, grad, gens, params);
  for (int i = 0; i < gens.size(); ++i) {
    cent.dw[i] += vor.dw[i];
    cent.dg[i] += vor.dg[i];
  }
  return cent;
}

Control apply_law(LawKind law, const StateEval& eval, const GradientBundle& grad,
                  const PowerGeneratorSet& gens, const LawParams& params) {
  switch (law) {
    case LawKind::WeightsOnly: return law_weights_only(eval, grad, gens, params);
    case LawKind::Centroidal: return law_centroidal(eval, grad, gens, params);
    case LawKind::VoronoiDefect: return law_voronoi_defect(eval, grad, gens, params);
    case LawKind::Combined: return law_combined(eval, grad, gens, params);
  }
  throw InvalidParams("unknown law");
}

StepResult euler_step(const Polygon& region, const PowerGeneratorSet& gens,
                      const StateEval& eval, LawKind law, const DensityField& density,
                      const LawParams& params, const QuadratureSpec& quad, double dt) {
  if (dt <= 0) throw InvalidParams("step size must be > 0");
  const int m = gens.size();
  const GradientBundle grad = gradient_bundle(eval, gens, density, quad, params.target_fractions);
  const Control u = apply_law(law, eval, grad, gens, params);
  const double mass_floor = kMassFloorFraction * eval.total_mass;

  double dt_try = dt;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, dt_try *= 0.5) {
    PowerGeneratorSet next;
    next.positions.resize(m);
    next.weights.resize(m);
    for (int i = 0; i < m; ++i) {
      next.weights[i] = gens.weights[i] + dt_try * u.dw[i];
      next.positions[i] = project_into(region, gens.positions[i] + dt_try * u.dg[i]);
    }
    StateEval next_eval;
    try {
      next_eval = evaluate_state(region, next, density, quad, params.target_fractions);
    } catch (const EmptyCell&) {
      continue;
    } catch (const CoincidentGenerators&) {
      continue;
    }
    if (*std::min_element(next_eval.mass.begin(), next_eval.mass.end()) < mass_floor) continue;
    if (next_eval.objective > eval.objective + kObjectiveIncreaseTol) continue;
    return {std::move(next), std::move(next_eval), dt_try, halvings};
  }
  throw StepFailed("no acceptable step size after " + std::to_string(kMaxHalvings) +
                   " halvings");
}

}  // namespace equipart
