#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slpm/numerics.hpp"

namespace slpm {

/// Sample-major feature table with class labels and optional per-row tags.
/// Optional columns are represented by empty vectors.
struct Dataset
{
  Matrix features;
  /// Index into label_names for every row.
  std::vector<int> labels;
  /// Label dictionary in order of first appearance.
  std::vector<std::string> label_names;
  std::vector<std::string> subjects;
  std::vector<double> intensities;
  std::vector<std::string> sequences;
  std::vector<long long> frames;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  bool has_subjects() const { return !subjects.empty(); }
  bool has_intensities() const { return !intensities.empty(); }
  bool has_sequences() const { return !sequences.empty(); }
  bool has_frames() const { return !frames.empty(); }
};

/// Parses the CSV schema: header with f0..f{D-1}, label, and optional
/// subject, intensity, sequence and frame columns in any order.
/// When a sequence column is present, rows of a sequence are made contiguous
/// (sequences in first-appearance order) and sorted by frame.
/// Throws ParseError with the offending line number.
Dataset load_dataset_csv(const std::filesystem::path& path);
Dataset parse_dataset_csv(const std::string& text);

/// Inverse of parse_dataset_csv; reals are written with 17 significant digits.
std::string format_dataset_csv(const Dataset& data);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Index of `name` in the dictionary, appending it when new.
int intern_label(std::vector<std::string>& names, const std::string& name);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// "%.17g" rendering used by every text output.
std::string format_real(double value);

} // namespace slpm
