#pragma once

#include "tacshear/types.hpp"

namespace tacshear {

// Root mean square displacement error in pixels; both fields are converted
// to pixels before differencing.
double rmse_px(const MarkerField& pred, const MarkerField& truth,
               const PixelScale& scale);

// Mean per-taxel cosine similarity over taxels where *both* vectors exceed
// the magnitude floor (pixels). Undefined (taxels == 0, value NaN) when no
// taxel qualifies -- callers must check.
struct CosineResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  int taxels = 0;
  bool defined() const { return taxels > 0; }
};

CosineResult cosine_similarity(const MarkerField& pred,
                               const MarkerField& truth,
                               const PixelScale& scale,
                               double magnitude_floor_px = 0.3);

}  // namespace tacshear
