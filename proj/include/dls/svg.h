#pragma once

#include <string>
#include <vector>

#include "dls/identify.h"
#include "dls/planner.h"

namespace dls {

struct PlotSeries {
  std::string label;
  std::string color;
  Path path;
  /// Draw a short heading tick at every waypoint.
  bool orientation_ticks{true};
};

/// x-y polylines of one or more SE(2) paths, each waypoint marked with a tick
/// pointing along its heading.
std::string path_svg(const std::vector<PlotSeries>& series, const std::string& title = "");

/// Measured wrenches in the reduced (F, T) plane, colored by label, with the
/// binding boundary of the fitted surfaces at every normal force present.
std::string fit_boundary_svg(const std::vector<SegmentRecord>& dataset,
                             const FrictionParams& params);

}  // namespace dls
