#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "lstc/trainer.hpp"

namespace lstc {

inline constexpr const char* kMetricsHeader =
    "epoch,steps,ep_reward,ep_cost,success_rate,feasible_rate,lambda_l,"
    "lambda_s,loss_pi,loss_v,loss_vc,loss_B";

// Append-only CSV of per-epoch training metrics. Doubles are printed with
// max precision so identical runs produce byte-identical files.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void write(const rl::EpochReport& rep);

 private:
  std::ofstream out_;
};

std::string format_metrics_row(const rl::EpochReport& rep);

struct MetricsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Strict reader for the metrics schema; throws std::runtime_error naming
// the offending row.
MetricsTable read_metrics_csv(const std::string& path);

}  // namespace lstc
