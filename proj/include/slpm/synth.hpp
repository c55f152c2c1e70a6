#pragma once

#include <cstdint>

#include "slpm/dataset.hpp"

namespace slpm {

struct SynthOptions
{
  int classes = 6;
  int per_class = 60;
  int dim = 100;
  double spread = 1.0;
  double separation = 8.0;
  std::uint64_t seed = 42;
};

/// Isotropic Gaussian blobs. Class c is centred on axis c scaled by
/// separation / sqrt(2), so every pair of centres is `separation` apart.
/// Rows are class-major; sample i of every class belongs to subject "s<i>".
/// Requires 2 <= classes <= dim.
Dataset synth_blobs(const SynthOptions& options = {});

/// Centre of class c as used by synth_blobs.
Vector blob_center(const SynthOptions& options, int c);

} // namespace slpm
