#pragma once
#include <string>

#include "calderon/experiments.hpp"

namespace calderon::cli {

// Line chart of r.series with the record's axis labels and log flags. Empty string when there is nothing to draw.
std::string render_svg(const ExperimentRecord& r);

}  // namespace calderon::cli
