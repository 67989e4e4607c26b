#pragma once

#include "ltsa/types.hpp"

#include <string>
#include <vector>

namespace ltsa::svg {

/// 2-D scatter plot on a fixed 800x600 canvas with axes and tick labels.
/// Output bytes are a pure function of the spec (golden-file friendly).
struct ScatterSpec {
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    Vector x;
    Vector y;
    /// Continuous color ramp values (one per point); empty for a single color.
    Vector color_by;
    /// Discrete palette indices; overrides color_by when non-empty.
    std::vector<int> labels;
    double point_radius = 2.5;
};

std::string render_scatter(const ScatterSpec& spec);
void write_scatter(const std::string& path, const ScatterSpec& spec);

}  // namespace ltsa::svg
