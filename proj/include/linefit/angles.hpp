#pragma once

#include <string>

#include "linefit/geometry.hpp"

namespace linefit {

enum class Severity { kNormal, kMild, kModerate, kSevere };

const char* severity_name(Severity s);

/// Clinical quantities from the three fitted bone axes. Channel order is
/// fixed: 0 proximal phalanx, 1 first metatarsal, 2 second metatarsal.
struct AngleReport {
  AngleDeg alpha;  // HVA: proximal phalanx vs first metatarsal
  AngleDeg beta;   // IMA: first vs second metatarsal
  Severity hva_class = Severity::kNormal;
  Severity ima_class = Severity::kNormal;
};

// Independent per-angle severity intervals, half-open upward so the map is
// total and monotone over [0, 90]:
//   HVA: [0,15) normal, [15,21) mild, [21,40) moderate, [40,90] severe
//   IMA: [0,9)  normal, [9,12)  mild, [12,18) moderate, [18,90] severe
Severity classify_hva(AngleDeg hva);
Severity classify_ima(AngleDeg ima);

AngleReport compute_report(const Line& proximal_phalanx,
                           const Line& first_metatarsal,
                           const Line& second_metatarsal);

}  // namespace linefit
