#include "tacshear/dilation.hpp"

#include <cmath>

namespace tacshear {

ContactSet find_contacts(const TactileGrid& grid, const Sdf& indenter,
                         const Pose& pose) {
  ContactSet out;
  const Pose inv = pose.inverse();
  for (int i = 0; i < grid.count(); ++i) {
    const double phi = indenter.value(inv.apply(grid.point3(i)));
    if (phi < 0.0) {
      out.idx.push_back(i);
      out.depth.push_back(-phi);
    }
  }
  return out;
}

MarkerField dilation_field(const TactileGrid& grid, const ContactSet& contacts,
                           double lambda_d) {
  MarkerField out = MarkerField::zeros(grid);
  if (contacts.empty()) return out;
  std::vector<Vec2> cpos(contacts.idx.size());
  for (size_t c = 0; c < contacts.idx.size(); ++c)
    cpos[c] = grid.point2(contacts.idx[c]);

  for (int i = 0; i < grid.count(); ++i) {
    const Vec2 p = grid.point2(i);
    KahanVec2 acc;
    for (size_t c = 0; c < cpos.size(); ++c) {
      const Vec2 v = p - cpos[c];
      acc.add(contacts.depth[c] * v * std::exp(-lambda_d * v.squaredNorm()));
    }
    out.d[i] = acc.total();
  }
  return out;
}

}  // namespace tacshear
