#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "micontrast/critics.hpp"

namespace micontrast {

// Critic checkpoint, plain text, version 1:
//
//   micontrast-critic 1
//   kind <joint|separable>
//   nets <count>
//   net <index> layers <count>
//   layer <rows> <cols>        (repeated per layer)
//   <rows lines of cols weights, row-major>
//   <one line of rows biases>
//   adam <0|1>
//   [lr <v> beta1 <v> beta2 <v> eps <v> step <k>]
//   [first and second moments, one line per parameter block, in
//    parameter_blocks() order: all first moments, then all second moments]
//
// Reals are written in shortest round-trip form, so load(save(x)) == x.

struct Checkpoint {
  CriticModel model;
  std::optional<AdamState> adam;
};

void save_checkpoint(std::ostream& out, const CriticModel& model,
                     const AdamState* adam = nullptr);
void save_checkpoint(const std::filesystem::path& path, const CriticModel& model,
                     const AdamState* adam = nullptr);

/// Throws std::runtime_error on malformed or unsupported input.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace micontrast
