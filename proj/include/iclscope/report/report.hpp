#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace iclscope::report {

// Square matrix as CSV: header row "id,<ids...>", then one row per id.
std::string matrix_csv(const std::vector<std::string>& order, const Eigen::MatrixXd& values);

// Cells are <rect> elements with a data-value attribute; colours map linearly from
// the matrix minimum to its maximum, both printed in the legend.
std::string heatmap_svg(const std::string& title, const std::vector<std::string>& order,
                        const Eigen::MatrixXd& values);

// Overlaid histograms sharing bin edges; bars carry data-count and data-group.
std::string histogram_svg(const std::string& title, const std::map<std::string, std::vector<double>>& groups,
                          int bins = 20);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Polylines with one <circle data-x data-y> per point.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace iclscope::report
