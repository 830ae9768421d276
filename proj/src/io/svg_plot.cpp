#include "lstc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lstc/metrics.hpp"

namespace lstc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<double>& x,
                              const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("render_line_chart: bad data");
  const double width = 640, height = 400;
  const double ml = 80, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = *std::min_element(x.begin(), x.end());
  double xmax = *std::max_element(x.begin(), x.end());
  double ymin = *std::min_element(y.begin(), y.end());
  double ymax = *std::max_element(y.begin(), y.end());
  if (xmax - xmin < 1e-12) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double v) {
    return mt + ph - (v - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / ticks;
    const double fy = ymin + (ymax - ymin) * i / ticks;
    const double px = sx(fx), py = sy(fy);
    svg << "<line x1=\"" << px << "\" y1=\"" << mt + ph << "\" x2=\"" << px
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(fx) << "</text>\n"
        << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml
        << "\" y2=\"" << py << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(fy) << "</text>\n";
  }

  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << y_label << "</text>\n";

  svg << "<polyline fill=\"none\" stroke=\"#1f6fb5\" stroke-width=\"1.5\" "
         "points=\"";
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) svg << ' ';
    svg << num(sx(x[i])) << ',' << num(sy(y[i]));
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

std::vector<std::string> plot_metrics_csv(const std::string& csv_path,
                                          const std::string& out_dir) {
  const MetricsTable table = read_metrics_csv(csv_path);
  if (table.rows.empty())
    throw std::runtime_error(csv_path + ": no data rows to plot");

  struct Chart {
    const char* column;
    const char* file;
    const char* title;
  };
  const Chart charts[] = {
      {"ep_reward", "ep_reward.svg", "episode reward"},
      {"success_rate", "success_rate.svg", "success rate"},
      {"ep_cost", "ep_cost.svg", "episode cost"},
      {"feasible_rate", "feasible_rate.svg", "feasible state rate"},
  };

  const int steps_col = table.column("steps");
  std::vector<double> xs;
  for (const auto& row : table.rows) xs.push_back(row[steps_col]);

  // Render everything before writing so a malformed request leaves no files.
  std::vector<std::pair<std::string, std::string>> rendered;
  for (const auto& c : charts) {
    const int col = table.column(c.column);
    std::vector<double> ys;
    for (const auto& row : table.rows) ys.push_back(row[col]);
    rendered.emplace_back(c.file,
                          render_line_chart(c.title, "steps", c.title, xs, ys));
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> paths;
  for (const auto& [file, svg] : rendered) {
    const std::string path = (fs::path(out_dir) / file).string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << svg;
    paths.push_back(path);
  }
  return paths;
}

}  // namespace lstc
