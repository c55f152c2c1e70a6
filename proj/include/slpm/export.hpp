#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slpm/dataset.hpp"
#include "slpm/embed.hpp"
#include "slpm/feataug.hpp"

namespace slpm {

enum class ExportFormat { csv, svg };

/// Provenance of each dataset row: neutral for intensity 0, low_intensity
/// for 0 < intensity < 1, original_peak otherwise.
std::vector<Provenance> dataset_provenance(const Dataset& data);

/// Header y0..y{d-1},label,provenance; reals with 17 significant digits.
std::string format_projection_csv(const AugmentedTrainingSet& rows, const std::vector<std::string>& label_names);

/// 800x600 SVG scatter of the first two subspace dimensions, one circle per
/// row, fill colour per class. Throws DataError when d < 2.
std::string format_projection_svg(const Matrix& Y, const std::vector<int>& labels,
                                  const std::vector<std::string>& label_names);

void export_projection(const EmbeddingModel& model, const Dataset& data, const std::filesystem::path& path,
                       ExportFormat format);

} // namespace slpm
