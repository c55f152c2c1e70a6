#include "slpm/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "slpm/error.hpp"

namespace slpm {

Vector blob_center(const SynthOptions& options, int c)
{
  Vector center = Vector::Zero(options.dim);
  center(c) = options.separation / std::sqrt(2.0);
  return center;
}

Dataset synth_blobs(const SynthOptions& options)
{
  if (options.classes < 2) throw DataError("synthetic data needs at least two classes");
  if (options.classes > options.dim) throw DataError("synthetic data needs dim >= classes");
  if (options.per_class < 1) throw DataError("synthetic data needs at least one sample per class");
  if (options.spread < 0.0) throw DataError("spread must be >= 0");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(options.classes) * options.per_class, options.dim);
  Eigen::Index row = 0;
  for (int c = 0; c < options.classes; ++c)
  {
    data.label_names.push_back("c" + std::to_string(c));
    const Vector center = blob_center(options, c);
    for (int i = 0; i < options.per_class; ++i, ++row)
    {
      for (int f = 0; f < options.dim; ++f) data.features(row, f) = center(f) + options.spread * normal(rng);
      data.labels.push_back(c);
      data.subjects.push_back("s" + std::to_string(i));
    }
  }
  return data;
}

} // namespace slpm
