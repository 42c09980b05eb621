#pragma once

#include <cmath>

#include "core/error.hpp"

namespace sfwi {

inline double mps_to_kmh(double v) {
  if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::Domain, "wind speed must be finite and >= 0");
  return v * 3.6;
}

}  // namespace sfwi
