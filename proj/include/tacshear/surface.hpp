#pragma once

#include <cstdint>

#include "tacshear/sdf.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// On-surface sample set of an indenter, in the indenter frame: points on the
// zero set, outward unit normals, per-sample areas.
struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> areas;
  double total_area = 0.0;

  int count() const { return static_cast<int>(points.size()); }
  bool uniform_areas(double rel_tol = 1e-12) const;
};

struct SampleOptions {
  uint64_t seed = 0;
  // Acceptance band half-width as a fraction of the bounds diagonal; thin
  // bands keep the density uniform over the zero set (bias is O(curvature
  // times band)).
  double band_frac = 0.01;
  double surface_eps = 1e-6;  // required |phi| at accepted samples, meters
  int max_newton = 32;
  // Give up after this many rejected candidates per requested sample.
  int max_attempts_per_sample = 20000;
};

// Rejection sampling in the padded bounding box followed by Newton
// projection along the SDF gradient. Deterministic for a fixed seed.
// Areas are uniform: surface_area / count.
SurfaceSamples sample_surface(const Sdf& sdf, int count,
                              const SampleOptions& opts = {});

}  // namespace tacshear
