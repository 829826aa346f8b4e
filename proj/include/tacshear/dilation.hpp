#pragma once

#include "tacshear/sdf.hpp"
#include "tacshear/types.hpp"

namespace tacshear {

// Markers of the grid currently inside the indenter, with penetration
// depths -phi_I > 0. Indices ascending (fixed accumulation order).
struct ContactSet {
  std::vector<int> idx;
  std::vector<double> depth;

  int count() const { return static_cast<int>(idx.size()); }
  bool empty() const { return idx.empty(); }
};

// Strict interior test phi_I < 0 at each marker, evaluated in the indenter
// frame through the inverse pose.
ContactSet find_contacts(const TactileGrid& grid, const Sdf& indenter,
                         const Pose& pose);

// Normal-press marker spread: each penetrating marker c pushes every marker
// radially away from itself,
//   M^d(x, y) = sum_c depth_c * ((x,y) - p_c) * exp(-lambda_d |(x,y)-p_c|^2),
// accumulated with compensated summation in ascending contact order.
// Output displacements in meters-space units.
MarkerField dilation_field(const TactileGrid& grid, const ContactSet& contacts,
                           double lambda_d);

}  // namespace tacshear
