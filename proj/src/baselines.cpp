#include "equipart/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace equipart {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Bisection on a monotone nondecreasing function; measures are monotone in
// the cut parameter and derivative-free search is robust where the density
// vanishes on slabs.
template <typename F>
double bisect_monotone(F&& f, double lo, double hi, double target, double tol_x, double tol_f) {
  for (int iter = 0; iter < 200 && hi - lo > tol_x; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v - target) <= tol_f) return mid;
    if (v < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Polygon slab(const Polygon& region, const Vec2& v, double lo, double hi) {
  Polygon p = clip_halfplane(region, HalfPlane(v, hi));
  return clip_halfplane(p, HalfPlane(-v, -lo));
}

struct RayHit {
  Vec2 point;
  int edge;      // hit lies on edge (v[edge], v[edge+1])
  double along;  // parameter on the edge, in [0, 1]
};

RayHit ray_exit(const Polygon& region, const Vec2& pivot, double angle) {
  const Vec2 d(std::cos(angle), std::sin(angle));
  const int n = region.size();
  RayHit best{Vec2::Zero(), -1, 0.0};
  double best_t = -1.0;
  for (int k = 0; k < n; ++k) {
    const Vec2& a = region.vertices[k];
    const Vec2& b = region.vertices[(k + 1) % n];
    const Vec2 e = b - a;
    const double denom = cross2(d, e);
    if (std::abs(denom) < 1e-15) continue;
    const double t = cross2(a - pivot, e) / denom;
    const double s = cross2(d, a - pivot) / denom;
    if (t > 1e-12 && s >= -1e-9 && s <= 1.0 + 1e-9 && t > best_t) {
      best_t = t;
      best = {pivot + t * d, k, std::clamp(s, 0.0, 1.0)};
    }
  }
  if (best.edge < 0) throw InvalidParams("sweep ray does not exit the workspace");
  return best;
}

// Sector of the region between two rays from the pivot (angles CCW,
// hi - lo in (0, 2 pi)). Star-shaped around the pivot; the pivot vertex is
// reflex when the wedge exceeds pi.
Polygon sector_polygon(const Polygon& region, const Vec2& pivot, double lo_angle,
                       double hi_angle) {
  if (hi_angle - lo_angle <= 1e-14) return {};
  const RayHit ha = ray_exit(region, pivot, lo_angle);
  const RayHit hb = ray_exit(region, pivot, hi_angle);
  const int n = region.size();
  Polygon sector;
  sector.vertices.push_back(pivot);
  sector.vertices.push_back(ha.point);
  if (!(hb.edge == ha.edge && hb.along >= ha.along)) {
    int k = (ha.edge + 1) % n;
    while (true) {
      sector.vertices.push_back(region.vertices[k]);
      if (k == hb.edge) break;
      k = (k + 1) % n;
    }
  }
  sector.vertices.push_back(hb.point);
  return normalized(std::move(sector));
}

}  // namespace

SlicedPartition slice_partition(const Polygon& region, const DensityField& density, int m,
                                const Vec2& direction, const QuadratureSpec& quad) {
  if (m < 1) throw InvalidParams("slice partition needs m >= 1");
  const double dn = direction.norm();
  if (dn < 1e-300) throw InvalidParams("slice direction must be nonzero");
  const Vec2 v = direction / dn;

  SlicedPartition part;
  part.direction = v;
  if (m == 1) {
    part.cells = {region};
    return part;
  }

  double s_min = std::numeric_limits<double>::infinity();
  double s_max = -std::numeric_limits<double>::infinity();
  for (const Vec2& x : region.vertices) {
    s_min = std::min(s_min, v.dot(x));
    s_max = std::max(s_max, v.dot(x));
  }
  const double total = region_measure(region, density, quad);
  const double target = total / m;

  double prev = s_min;
  for (int k = 0; k < m - 1; ++k) {
    const double lo_bound = prev;
    const double cut = bisect_monotone(
        [&](double s) { return region_measure(slab(region, v, lo_bound, s), density, quad); },
        prev, s_max, target, 1e-13 * std::max(1.0, s_max - s_min), 1e-13 * total);
    part.offsets.push_back(cut);
    part.cells.push_back(slab(region, v, prev, cut));
    prev = cut;
  }
  part.cells.push_back(slab(region, v, prev, s_max));
  return part;
}

std::vector<Polygon> sweep_partition(const Polygon& region, const DensityField& density, int m,
                                     const Vec2& pivot, double start_angle,
                                     const QuadratureSpec& quad) {
  if (m < 1) throw InvalidParams("sweep partition needs m >= 1");
  if (!point_in(region, pivot, -1e-9))
    throw InvalidParams("sweep pivot must lie strictly inside the workspace");
  if (m == 1) return {region};

  const double total = region_measure(region, density, quad);
  const double target = total / m;

  std::vector<Polygon> cells;
  double prev = start_angle;
  const double end = start_angle + 2 * M_PI;
  for (int k = 0; k < m - 1; ++k) {
    const double lo_bound = prev;
    const double cut = bisect_monotone(
        [&](double a) {
          return region_measure(sector_polygon(region, pivot, lo_bound, a), density, quad);
        },
        prev, end, target, 1e-13 * 2 * M_PI, 1e-13 * total);
    cells.push_back(sector_polygon(region, pivot, prev, cut));
    prev = cut;
  }
  cells.push_back(sector_polygon(region, pivot, prev, end));
  return cells;
}

UnimodalVoronoi unimodal_voronoi(const Polygon& region, const DensityField& density, int m,
                                 const Vec2& direction, const QuadratureSpec& quad) {
  if (m < 1) throw InvalidParams("unimodal construction needs m >= 1");
  if (density.kind != DensityKind::Uniform)
    throw UnsupportedDensity("the slab construction requires a constant density");
  const double dn = direction.norm();
  if (dn < 1e-300) throw InvalidParams("direction must be nonzero");
  const Vec2 v = direction / dn;

  double s_min = std::numeric_limits<double>::infinity();
  double s_max = -std::numeric_limits<double>::infinity();
  for (const Vec2& x : region.vertices) {
    s_min = std::min(s_min, v.dot(x));
    s_max = std::max(s_max, v.dot(x));
  }
  const double total = region_measure(region, density, quad);

  UnimodalVoronoi out;
  out.s.resize(m + 1);
  out.s.front() = s_min;
  out.s.back() = s_max;
  for (int k = 1; k < m; ++k) {
    const double target = total * k / m;
    out.s[k] = bisect_monotone(
        [&](double s) { return region_measure(slab(region, v, s_min, s), density, quad); },
        s_min, s_max, target, 1e-14 * std::max(1.0, s_max - s_min), 1e-14 * total);
  }

  // place the middle generator at the midpoint of the narrowest slab, then
  // reflect outward so consecutive midpoints land exactly on the s_k
  int kappa = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double len = out.s[i + 1] - out.s[i];
    if (len < best - 1e-15) {
      best = len;
      kappa = i;
    }
  }
  out.t.assign(m, 0.0);
  out.t[kappa] = 0.5 * (out.s[kappa] + out.s[kappa + 1]);
  for (int i = kappa; i + 1 < m; ++i) out.t[i + 1] = 2 * out.s[i + 1] - out.t[i];
  for (int i = kappa; i > 0; --i) out.t[i - 1] = 2 * out.s[i] - out.t[i];

  // common perpendicular offset such that the whole generator segment stays
  // inside the region (always solvable along a diameter direction)
  const Vec2 vp(-v.y(), v.x());
  auto u_range = [&](double t) {
    const auto chord = polygon_line_chord(region, HalfPlane(v, t), 0.0);
    if (!chord) throw InvalidParams("degenerate cross-section while anchoring generators");
    double u1 = vp.dot(chord->first), u2 = vp.dot(chord->second);
    if (u1 > u2) std::swap(u1, u2);
    return std::pair<double, double>(u1, u2);
  };
  const auto [a_lo, a_hi] = u_range(out.t.front());
  const auto [b_lo, b_hi] = u_range(out.t.back());
  const double u_lo = std::max(a_lo, b_lo);
  const double u_hi = std::min(a_hi, b_hi);
  if (u_lo > u_hi)
    throw InvalidParams(
        "no chord parallel to the direction covers the generator span; "
        "use a diameter direction");
  const double u = 0.5 * (u_lo + u_hi);

  out.positions.resize(m);
  for (int i = 0; i < m; ++i) out.positions[i] = out.t[i] * v + u * vp;
  return out;
}

void OneDDensity::validate() const {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
    throw InvalidParams("1-D density needs k+1 breakpoints for k values");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i + 1] > breakpoints[i]))
      throw InvalidParams("1-D density breakpoints must be strictly increasing");
  double mass = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw InvalidParams("1-D density values must be >= 0");
    mass += values[i] * (breakpoints[i + 1] - breakpoints[i]);
  }
  if (!(mass > 0)) throw InvalidParams("1-D density must have positive total mass");
}

double OneDDensity::total_mass() const {
  double mass = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    mass += values[i] * (breakpoints[i + 1] - breakpoints[i]);
  return mass;
}

double OneDDensity::quantile(double target_mass, bool* degenerate) const {
  double cum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double piece = values[i] * (breakpoints[i + 1] - breakpoints[i]);
    if (cum + piece >= target_mass - 1e-15) {
      if (values[i] > 0) {
        const double x = breakpoints[i] + (target_mass - cum) / values[i];
        // a zero plateau right after an exact hit makes the quantile non-unique
        if (std::abs(cum + piece - target_mass) < 1e-15) {
          size_t j = i + 1;
          while (j < values.size() && values[j] == 0.0) ++j;
          if (j > i + 1) {
            if (degenerate != nullptr) *degenerate = true;
            return 0.5 * (breakpoints[i + 1] + breakpoints[j]);
          }
        }
        return std::min(x, breakpoints[i + 1]);
      }
      if (std::abs(cum - target_mass) < 1e-15) {
        size_t j = i;
        while (j < values.size() && values[j] == 0.0) ++j;
        if (degenerate != nullptr) *degenerate = true;
        return 0.5 * (breakpoints[i] + breakpoints[j]);
      }
    }
    cum += piece;
  }
  return breakpoints.back();
}

OneDCheckResult oned_equitable_voronoi_check(const OneDDensity& rho, int m) {
  if (m < 2) throw InvalidParams("the 1-D check needs m >= 2");
  rho.validate();
  const double total = rho.total_mass();

  OneDCheckResult res;
  res.boundaries.resize(m - 1);
  for (int k = 1; k < m; ++k) {
    bool degenerate = false;
    res.boundaries[k - 1] = rho.quantile(total * k / m, &degenerate);
    res.degenerate_quantiles = res.degenerate_quantiles || degenerate;
  }

  // g_i = (-1)^(i-1) g_1 + a_i, from the midpoint recursion g_{i+1} = 2 b_i - g_i
  res.offsets.assign(m, 0.0);
  for (int i = 1; i < m; ++i) res.offsets[i] = 2 * res.boundaries[i - 1] - res.offsets[i - 1];

  const double x0 = rho.breakpoints.front();
  const double x1 = rho.breakpoints.back();
  auto cell_lo = [&](int i) { return i == 0 ? x0 : res.boundaries[i - 1]; };
  auto cell_hi = [&](int i) { return i == m - 1 ? x1 : res.boundaries[i]; };

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  res.g1_intervals.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    double ilo, ihi;
    if (sign > 0) {
      ilo = cell_lo(i) - res.offsets[i];
      ihi = cell_hi(i) - res.offsets[i];
    } else {
      ilo = res.offsets[i] - cell_hi(i);
      ihi = res.offsets[i] - cell_lo(i);
    }
    res.g1_intervals[i] = {ilo, ihi};
    if (ilo > lo) {
      lo = ilo;
      res.conflict_low_index = i;
    }
    if (ihi < hi) {
      hi = ihi;
      res.conflict_high_index = i;
    }
  }
  res.g1_low = lo;
  res.g1_high = hi;
  res.feasible = lo <= hi + 1e-12;

  if (res.feasible) {
    const double p = 0.5 * (lo + hi);
    res.generators.resize(m);
    for (int i = 0; i < m; ++i)
      res.generators[i] = (i % 2 == 0 ? p : -p) + res.offsets[i];
    for (int i = 0; i + 1 < m; ++i)
      if (!(res.generators[i + 1] - res.generators[i] > 1e-12)) {
        res.feasible = false;
        res.detail = "witness generators collapse at a shared cell boundary";
        res.generators.clear();
        return res;
      }
    return res;
  }

  const int i = std::min(res.conflict_low_index, res.conflict_high_index);
  const int j = std::max(res.conflict_low_index, res.conflict_high_index);
  std::ostringstream msg;
  if ((i - j) % 2 == 0) {
    const double diff = res.offsets[j] - res.offsets[i];
    msg << "g" << (j + 1) << " - g" << (i + 1) << " = " << diff
        << " is forced by the boundary midpoints, but the cells only allow ["
        << cell_lo(j) - cell_hi(i) << ", " << cell_hi(j) - cell_lo(i) << "]";
  } else {
    const double sum = res.offsets[j] + res.offsets[i];
    msg << "g" << (j + 1) << " + g" << (i + 1) << " = " << sum
        << " is forced by the boundary midpoints, but the cells only allow ["
        << cell_lo(j) + cell_lo(i) << ", " << cell_hi(j) + cell_hi(i) << "]";
  }
  res.detail = msg.str();
  return res;
}

}  // namespace equipart
