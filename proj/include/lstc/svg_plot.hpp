#pragma once

#include <string>
#include <vector>

namespace lstc {

// Standalone SVG line chart; one polyline over (x, y) samples.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<double>& x,
                              const std::vector<double>& y);

// Reads a metrics CSV and writes four charts (steps vs episode reward,
// success rate, episode cost, feasible state rate) into out_dir. Returns
// the written paths. Throws before writing anything when the CSV is
// malformed or has no data rows.
std::vector<std::string> plot_metrics_csv(const std::string& csv_path,
                                          const std::string& out_dir);

}  // namespace lstc
