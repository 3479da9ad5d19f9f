#pragma once

#include <string>

#include "linefit/heatmap.hpp"
#include "linefit/robust.hpp"

namespace linefit {

struct OverlayOptions {
  FitConfig fit;
  double extract_threshold = 0.5;
};

/// SVG sized to the original-pixel frame (width*scale x height*scale):
/// extracted points as dots, one fitted line per channel in the figure
/// colors (channel 0 red, 1 green, 2 blue), and an alpha/beta caption.
/// A channel whose fit fails is omitted with a warning comment instead.
std::string render_overlay(const Heatmap& h, const OverlayOptions& opts);

}  // namespace linefit
