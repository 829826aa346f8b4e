#include "tacshear/surface.hpp"

#include <cmath>
#include <random>

namespace tacshear {

bool SurfaceSamples::uniform_areas(double rel_tol) const {
  if (areas.empty()) return true;
  const double a0 = areas.front();
  for (double a : areas)
    if (std::abs(a - a0) > rel_tol * std::abs(a0)) return false;
  return true;
}

namespace {

// Damped Newton projection onto the zero set. Returns false if the point
// cannot be brought within eps of the surface.
bool project_to_surface(const Sdf& sdf, Vec3& x, double eps, int max_iter) {
  double phi = sdf.value(x);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(phi) <= eps) return true;
    const Vec3 g = sdf.gradient(x);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-20) return false;
    double step_scale = 1.0;
    for (int half = 0; half < 8; ++half) {
      const Vec3 cand = x - step_scale * phi * g / g2;
      const double cand_phi = sdf.value(cand);
      if (std::abs(cand_phi) < std::abs(phi)) {
        x = cand;
        phi = cand_phi;
        break;
      }
      step_scale *= 0.5;
      if (half == 7) return false;
    }
  }
  return std::abs(phi) <= eps;
}

}  // namespace

SurfaceSamples sample_surface(const Sdf& sdf, int count,
                              const SampleOptions& opts) {
  if (count < 1) throw DataError("sample count must be >= 1");
  if (!sdf.bounded())
    throw DataError("cannot sample an unbounded SDF surface");

  const Eigen::AlignedBox3d box = sdf.bounds();
  const double band = opts.band_frac * box.diagonal().norm();
  Eigen::AlignedBox3d search = box;
  search.min().array() -= band;
  search.max().array() += band;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(search.min().x(), search.max().x());
  std::uniform_real_distribution<double> uy(search.min().y(), search.max().y());
  std::uniform_real_distribution<double> uz(search.min().z(), search.max().z());

  SurfaceSamples out;
  out.points.reserve(count);
  out.normals.reserve(count);
  const long max_attempts =
      static_cast<long>(opts.max_attempts_per_sample) * count;

  long attempts = 0;
  while (out.count() < count) {
    if (++attempts > max_attempts)
      throw DegeneracyError(
          "surface sampling failed: acceptance band never hit (is the SDF's "
          "zero set inside its bounds?)");
    Vec3 x(ux(rng), uy(rng), uz(rng));
    if (std::abs(sdf.value(x)) > band) continue;
    if (!project_to_surface(sdf, x, opts.surface_eps, opts.max_newton))
      continue;
    const Vec3 g = sdf.gradient(x);
    const double gn = g.norm();
    if (gn < 1e-12) continue;
    out.points.push_back(x);
    out.normals.push_back(g / gn);
  }

  out.total_area = sdf.surface_area();
  out.areas.assign(count, out.total_area / count);
  return out;
}

}  // namespace tacshear
