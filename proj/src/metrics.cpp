#include "tacshear/metrics.hpp"

#include <cmath>

namespace tacshear {

namespace {

void check_match(const MarkerField& a, const MarkerField& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DataError("metric over mismatched field sizes");
}

}  // namespace

double rmse_px(const MarkerField& pred, const MarkerField& truth,
               const PixelScale& scale) {
  check_match(pred, truth);
  const MarkerField p = pred.to_pixels(scale);
  const MarkerField t = truth.to_pixels(scale);
  double acc = 0.0;
  for (size_t i = 0; i < p.d.size(); ++i) acc += (p.d[i] - t.d[i]).squaredNorm();
  return std::sqrt(acc / static_cast<double>(p.d.size()));
}

CosineResult cosine_similarity(const MarkerField& pred,
                               const MarkerField& truth,
                               const PixelScale& scale,
                               double magnitude_floor_px) {
  check_match(pred, truth);
  const MarkerField p = pred.to_pixels(scale);
  const MarkerField t = truth.to_pixels(scale);
  double acc = 0.0;
  int n = 0;
  for (size_t i = 0; i < p.d.size(); ++i) {
    const double np = p.d[i].norm(), nt = t.d[i].norm();
    if (np > magnitude_floor_px && nt > magnitude_floor_px) {
      // Exactly collinear pairs take sign(dot), so identical and antiparallel
      // fields land on the +-1 endpoints instead of 1-ulp away from them.
      const double cross = p.d[i].x() * t.d[i].y() - p.d[i].y() * t.d[i].x();
      if (cross == 0.0)
        acc += p.d[i].dot(t.d[i]) > 0.0 ? 1.0 : -1.0;
      else
        acc += p.d[i].dot(t.d[i]) / (np * nt);
      ++n;
    }
  }
  CosineResult out;
  out.taxels = n;
  if (n > 0) out.value = acc / n;
  return out;
}

}  // namespace tacshear
