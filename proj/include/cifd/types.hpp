#pragma once

namespace cifd {

enum class BranchId { HIGH, LOW };

enum class Label { REAL, FAKE };

enum class GanMode { LOG, WGAN_GP };

inline const char* to_string(BranchId b) {
  return b == BranchId::HIGH ? "high" : "low";
}
inline const char* to_string(Label l) { return l == Label::REAL ? "real" : "fake"; }
inline const char* to_string(GanMode m) {
  return m == GanMode::LOG ? "log" : "wgan-gp";
}

}  // namespace cifd
