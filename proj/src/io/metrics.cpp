#include "lstc/metrics.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace lstc {

namespace {
std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

MetricsWriter::MetricsWriter(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const bool fresh = !fs::exists(p) || fs::file_size(p) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open metrics file: " + path);
  if (fresh) out_ << kMetricsHeader << "\n";
}

std::string format_metrics_row(const rl::EpochReport& r) {
  std::ostringstream ss;
  ss << r.epoch << ',' << r.steps << ',' << g(r.ep_reward) << ','
     << g(r.ep_cost) << ',' << g(r.success_rate) << ',' << g(r.feasible_rate)
     << ',' << g(r.lambda_l) << ',' << g(r.lambda_s) << ',' << g(r.loss_pi)
     << ',' << g(r.loss_v) << ',' << g(r.loss_vc) << ',' << g(r.loss_b);
  return ss.str();
}

void MetricsWriter::write(const rl::EpochReport& rep) {
  out_ << format_metrics_row(rep) << "\n";
  out_.flush();
}

int MetricsTable::column(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

MetricsTable read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics csv: " + path);
  MetricsTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (lineno == 1) {
      table.columns = cells;
      if (line != kMetricsHeader)
        throw std::runtime_error(path + ": row 1: unexpected header (want '" +
                                 std::string(kMetricsHeader) + "')");
      continue;
    }
    if (cells.size() != table.columns.size())
      throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                               ": expected " +
                               std::to_string(table.columns.size()) +
                               " columns, got " + std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(c, &pos));
        if (pos != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                                 ": bad number '" + c + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty())
    throw std::runtime_error(path + ": empty file (no header)");
  return table;
}

}  // namespace lstc
