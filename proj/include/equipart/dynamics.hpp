#pragma once

#include <optional>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"

namespace equipart {

/// Free constants of the control laws. Defaults follow defaults_for(); the
/// workspace-dependent radii (Delta, delta, eps3) scale with its diameter.
struct LawParams {
  double alpha = 1e-3;       // arctan gain scale of the centroidal law
  double beta_theta = 10.0;  // sharpness of the smooth gate
  double Delta = 0.1;        // proximity radius of the collision gain
  double delta = 0.025;      // inner (stop) radius, 0 < delta < Delta
  double eps1 = 1e-4;        // gradient-magnitude gate, eps1 < eps2
  double eps2 = 1e-3;
  double eps3 = 0.05;        // boundary-distance gate radius
  /// Scales the weight-gradient term of every law. 1 is the plain gradient
  /// law; the packaged simulation configs lower it so a forward-Euler step
  /// at dt = 0.01 stays inside the stability region for m ~ 10.
  double weight_gain = 1.0;
  /// Target measure fractions (beta variant); empty = equal shares.
  std::optional<std::vector<double>> target_fractions;

  void validate(int m) const;
  static LawParams defaults_for(const Polygon& region);
};

enum class LawKind { WeightsOnly, Centroidal, VoronoiDefect, Combined };

/// Piecewise-linear saturation: 0 below a, 1 above b, linear ramp between.
double sat(double a, double b, double x);
/// C-infinity gate: 0 for x <= 0, exp(-1/(beta x)^2) for x > 0.
double theta_smooth(double beta, double x);
/// Collision gain on [0, Delta] x [0, 2 pi]; 0 on a close-and-approaching
/// configuration, continuous across all branch boundaries.
double psi_gain(double rho, double angle, double Delta, double delta);
/// Angle of v in the frame whose y-axis is (gj - gi)/|gj - gi|; [0, pi)
/// means v has a component toward the neighbor. v = 0 maps to 3 pi / 2.
double collision_angle(const Vec2& gi, const Vec2& gj, const Vec2& v);

/// Snapshot of everything the laws read about one state: the diagram, the
/// per-cell masses/centroids, and the descent objective.
struct StateEval {
  PowerDiagram diagram;
  std::vector<double> mass;
  std::vector<Vec2> centroid;
  double objective = 0.0;  // sum beta_i^2 / mass_i (beta_i = 1 by default)
  double total_mass = 0.0;
};

/// Builds the diagram and integrates every cell. Throws EmptyCell when a
/// cell's mass is at or below kZeroMassThreshold.
StateEval evaluate_state(const Polygon& region, const PowerGeneratorSet& gens,
                         const DensityField& density, const QuadratureSpec& quad = {},
                         const std::optional<std::vector<double>>& target_fractions = {});

double objective_value(const std::vector<double>& masses,
                       const std::optional<std::vector<double>>& target_fractions = {});

/// Per-agent gradients of the locational objective plus the vectors the laws
/// are built from. The weight components sum to zero by construction.
struct GradientBundle {
  std::vector<double> dH_dw;
  std::vector<Vec2> dH_dg;
  std::vector<double> cell_mass;
  std::vector<Vec2> centroid_offset;  // cell centroid - generator position

  Vec2 descent_direction(int i) const { return -dH_dg[i]; }
};

GradientBundle gradient_bundle(const StateEval& eval, const PowerGeneratorSet& gens,
                               const DensityField& density, const QuadratureSpec& quad = {},
                               const std::optional<std::vector<double>>& target_fractions = {});

/// Objective value from a diagram (recomputes cell masses).
double HV_value(const PowerDiagram& diagram, const DensityField& density,
                const QuadratureSpec& quad = {});
double HV_beta_value(const PowerDiagram& diagram, const DensityField& density,
                     const std::vector<double>& target_fractions,
                     const QuadratureSpec& quad = {});

struct Control {
  std::vector<double> dw;
  std::vector<Vec2> dg;
};

Control law_weights_only(const StateEval& eval, const GradientBundle& grad,
                         const PowerGeneratorSet& gens, const LawParams& params);
Control law_centroidal(const StateEval& eval, const GradientBundle& grad,
                       const PowerGeneratorSet& gens, const LawParams& params);
Control law_voronoi_defect(const StateEval& eval, const GradientBundle& grad,
                           const PowerGeneratorSet& gens, const LawParams& params);
Control law_combined(const StateEval& eval, const GradientBundle& grad,
                     const PowerGeneratorSet& gens, const LawParams& params);
Control apply_law(LawKind law, const StateEval& eval, const GradientBundle& grad,
                  const PowerGeneratorSet& gens, const LawParams& params);

struct StepResult {
  PowerGeneratorSet gens;
  StateEval eval;
  double dt_effective = 0.0;
  int halvings = 0;
};

/// One forward-Euler step with backtracking: the step is halved (up to 20
/// times) until no cell mass falls below 1e-6 of the total and the objective
/// does not increase by more than 1e-12. Positions are projected into the
/// workspace. Throws StepFailed when no acceptable step size remains.
StepResult euler_step(const Polygon& region, const PowerGeneratorSet& gens,
                      const StateEval& eval, LawKind law, const DensityField& density,
                      const LawParams& params, const QuadratureSpec& quad, double dt);

inline constexpr double kMassFloorFraction = 1e-6;
inline constexpr double kObjectiveIncreaseTol = 1e-12;
inline constexpr int kMaxHalvings = 20;

}  // namespace equipart
