#pragma once

#include <string>

namespace lstc::rl {

enum class MultiplierMode {
  projected,  // unconditional dual ascent with projection onto [0, max]
  gated,      // increase only while the constraint is violated
};

MultiplierMode multiplier_mode_from_string(const std::string& s);
const char* to_string(MultiplierMode m);

struct LagrangeState {
  double lambda_l = 0.1;
  double lambda_s = 0.5;
  double alpha_l = 0.025;
  double alpha_s = 0.01;
  double threshold_b = 1.0;   // long-term budget on discounted episode cost
  double lambda_max = 100.0;  // projection cap to keep the penalty bounded
  MultiplierMode mode = MultiplierMode::projected;
};

struct ConstraintStats {
  double mean_disc_cost = 0.0;  // C-hat: discounted episode cost estimate
  double b_plus = 0.0;          // mean over anchors of max(B, 0)
};

// Dual update. Projected mode:
//   lambda_l <- clip(lambda_l + alpha_l*(C - b), 0, max)
//   lambda_s <- clip(lambda_s + alpha_s*B+, 0, max), decayed by (1-alpha_s)
//               when B+ is exactly zero.
// Gated mode applies each increase only on violation and never decreases.
void update_multipliers(LagrangeState& st, const ConstraintStats& stats);

}  // namespace lstc::rl
