#pragma once

#include "tacshear/sdf.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Velocity-based point-contact baseline: no contact memory, no spatial
// coupling between taxels.
struct PenaltyParams {
  double k_n = 1.0e4;  // normal gain per meter of penetration
  double k_t = 1.0;    // tangential gain per m/s of sliding velocity
  double mu = 1.0;     // Coulomb ratio
};

// Per in-contact taxel: normal magnitude k_n * penetration; tangential
// response k_t * (in-plane relative velocity at the taxel), Coulomb-clipped
// to mu * normal. The returned field is the clipped tangential response.
// angular/linear are the indenter's spatial velocity in the elastomer frame,
// linear taken at the indenter origin.
MarkerField penalty_field(const TactileGrid& grid, const Sdf& indenter,
                          const Pose& pose, const Vec3& angular,
                          const Vec3& linear, const PenaltyParams& params);

}  // namespace tacshear
