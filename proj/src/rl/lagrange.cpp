#include "lstc/lagrange.hpp"

#include <algorithm>
#include <stdexcept>

namespace lstc::rl {

MultiplierMode multiplier_mode_from_string(const std::string& s) {
  if (s == "projected") return MultiplierMode::projected;
  if (s == "gated") return MultiplierMode::gated;
  throw std::invalid_argument("unknown multiplier mode: " + s);
}

const char* to_string(MultiplierMode m) {
  return m == MultiplierMode::projected ? "projected" : "gated";
}

void update_multipliers(LagrangeState& st, const ConstraintStats& stats) {
  const double violation_l = stats.mean_disc_cost - st.threshold_b;
  switch (st.mode) {
    case MultiplierMode::projected:
      st.lambda_l =
          std::clamp(st.lambda_l + st.alpha_l * violation_l, 0.0, st.lambda_max);
      st.lambda_s = std::clamp(st.lambda_s + st.alpha_s * stats.b_plus, 0.0,
                               st.lambda_max);
      if (stats.b_plus == 0.0) st.lambda_s *= 1.0 - st.alpha_s;
      break;
    case MultiplierMode::gated:
      if (violation_l > 0.0)
        st.lambda_l = std::min(st.lambda_l + st.alpha_l * violation_l,
                               st.lambda_max);
      if (stats.b_plus > 0.0)
        st.lambda_s =
            std::min(st.lambda_s + st.alpha_s * stats.b_plus, st.lambda_max);
      break;
  }
}

}  // namespace lstc::rl
