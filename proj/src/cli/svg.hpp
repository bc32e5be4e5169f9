#pragma once

#include <string>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge::cli {

struct Series {
  std::string label;
  std::vector<ObjectivePoint> points;
};

/// Self-contained scatter plot of cost against response time, one colour and
/// legend entry per series.
std::string scatter_svg(const std::vector<Series>& series, const std::string& title);

}  // namespace fogforge::cli
