#include "linefit/angles.hpp"

namespace linefit {

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::kNormal:
      return "normal";
    case Severity::kMild:
      return "mild";
    case Severity::kModerate:
      return "moderate";
    case Severity::kSevere:
      return "severe";
  }
  return "normal";
}

Severity classify_hva(AngleDeg hva) {
  const double v = hva.value;
  if (v < 15.0) return Severity::kNormal;
  if (v < 21.0) return Severity::kMild;
  if (v < 40.0) return Severity::kModerate;
  return Severity::kSevere;
}

Severity classify_ima(AngleDeg ima) {
  const double v = ima.value;
  if (v < 9.0) return Severity::kNormal;
  if (v < 12.0) return Severity::kMild;
  if (v < 18.0) return Severity::kModerate;
  return Severity::kSevere;
}

AngleReport compute_report(const Line& proximal_phalanx,
                           const Line& first_metatarsal,
                           const Line& second_metatarsal) {
  AngleReport report;
  report.alpha = angle_between(proximal_phalanx, first_metatarsal);
  report.beta = angle_between(first_metatarsal, second_metatarsal);
  report.hva_class = classify_hva(report.alpha);
  report.ima_class = classify_ima(report.beta);
  return report;
}

}  // namespace linefit
