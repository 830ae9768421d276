#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "lstc/trainer.hpp"

namespace lstc {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Versioned binary container: config text block plus named raw double
// arrays (parameters and Adam state) for all four networks, the multiplier
// pair and the epoch/step counters. Written atomically (temp + rename).
// Together with the counter-derived RNG streams this is everything needed
// to resume bit-exactly.
void save_checkpoint(const std::string& path, const rl::Trainer& trainer);

// Reconstructs a trainer positioned exactly where the checkpoint was taken.
std::unique_ptr<rl::Trainer> load_checkpoint(const std::string& path);

}  // namespace lstc
