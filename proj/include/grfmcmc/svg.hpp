#pragma once

#include <string>
#include <vector>

namespace grfmcmc {

// Minimal native SVG writers for the report plots; no external tooling.

void svg_boxplot(const std::string& path, const std::string& title,
                 const std::vector<std::string>& labels,
                 const std::vector<std::vector<double>>& groups, const std::string& y_label);

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& series_labels, const std::string& x_label,
                    const std::string& y_label);

}  // namespace grfmcmc
