#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace chartforge {

struct CategoryAxis {
    std::string label;                // e.g. "Country"
    std::vector<std::string> values;  // distinct tick names
};

/// Themed word lists that stand in for generated titles, legends and labels.
struct Theme {
    std::string name;
    std::vector<CategoryAxis> category_axes;
    std::vector<std::string> measures;       // y-axis quantities
    std::vector<std::string> series;         // legend names
    std::vector<std::string> radar_axes;     // at least 12 attributes
    std::vector<std::array<std::string, 3>> bubble_metrics;  // x, y, size
    std::vector<std::string> sample_measures;  // histogram / box-plot quantities
    std::vector<std::string> group_names;      // box-plot groups
};

/// Bundled themes: economics, science, demographics, technology.
std::span<const Theme> builtin_themes();

}  // namespace chartforge
