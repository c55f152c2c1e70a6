#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slpm/dataset.hpp"
#include "slpm/embed.hpp"

namespace slpm {

struct Provenance
{
  enum class Kind { original_peak, low_intensity, gen_neutral, gen_expr, neutral };

  Kind kind = Kind::original_peak;
  /// xi for low-intensity rows, theta for generated rows, 1 otherwise.
  double theta = 1.0;
  /// Peak row the vector was derived from (gen_*), or the low-intensity row index.
  int source = -1;
  /// Second peak row for gen_expr.
  int target = -1;
};

/// Single-token rendering, e.g. "gen_expr:theta=0.8:src=3>5".
std::string to_string(const Provenance& p);

/// Subspace vectors with one provenance entry per row. Also used for
/// blocks of generated candidates.
struct AugmentedTrainingSet
{
  Matrix vectors;
  std::vector<int> labels;
  std::vector<Provenance> provenance;

  Eigen::Index size() const { return vectors.rows(); }
};

/// Projected samples of one subject.
struct SubjectSet
{
  std::string subject;
  std::optional<Vector> neutral;
  /// r x d peak vectors.
  Matrix peaks;
  std::vector<int> labels;
  /// Row of each peak in the peak block of the training set.
  std::vector<int> peak_rows;
};

/// Unordered class pairs, stored as (min, max).
using ClassPairSet = std::set<std::pair<int, int>>;

/// 1-based frame of intensity theta in an n-frame sequence: round(n * theta)
/// clamped to [1, n].
int frame_index(int frame_count, double theta);

/// T = [projected peaks; projected lows] with provenance.
AugmentedTrainingSet augment_low_intensity(const EmbeddingModel& model, const Matrix& peaks,
                                           std::span<const int> peak_labels, const Matrix& lows,
                                           std::span<const int> low_labels,
                                           std::span<const double> low_xi = {});

/// theta * peak_j + (1 - theta) * neutral for every peak of the subject.
/// nullopt when the subject has no neutral vector.
std::optional<AugmentedTrainingSet> generate_toward_neutral(const SubjectSet& subject, double theta_ne);

/// theta * peak_j + (1 - theta) * peak_k for every ordered pair of peaks with
/// different classes, labelled with class(j). When `allowed` is given, only
/// class pairs it contains are used.
AugmentedTrainingSet generate_cross_expression(const SubjectSet& subject, double theta_exp,
                                               const ClassPairSet* allowed = nullptr);

/// Class centroids over the original_peak rows of `reference`.
std::vector<std::pair<int, Vector>> class_centroids(const AugmentedTrainingSet& reference);

/// Class pairs whose centroid distance is at most the median inter-centroid distance.
ClassPairSet proximate_class_pairs(const AugmentedTrainingSet& reference);

/// Drops generated rows whose own class centroid is farther than some other
/// centroid. Non-generated rows pass through untouched.
AugmentedTrainingSet filter_generated(const AugmentedTrainingSet& candidates,
                                      const AugmentedTrainingSet& reference);

/// Row order: base, then gen_ne, then gen_exp.
AugmentedTrainingSet assemble_augmented(const AugmentedTrainingSet& base, const AugmentedTrainingSet& gen_ne,
                                        const AugmentedTrainingSet& gen_exp);

/// Peak, low-intensity and neutral samples picked out of a dataset.
struct ExpressionCorpus
{
  Matrix peaks;
  std::vector<int> peak_labels;
  std::vector<std::string> peak_subjects;

  Matrix lows;
  std::vector<int> low_labels;
  std::vector<double> low_intensity;
  /// Index of the peak that shares the low row's sequence or (subject, label); -1 if none.
  std::vector<int> low_owner;

  Matrix neutrals;
  std::vector<std::string> neutral_subjects;

  std::vector<std::string> label_names;
};

/// Sequence data: peak = last frame, low = frame_index(n, xi) when xi is
/// given, neutral = first frame of a subject's first sequence.
/// Static data: intensity 0 marks a neutral anchor, 0 < intensity < 1 a low
/// sample, anything else (or no intensity column) a peak.
/// Peaks without a subject id get a unique one.
ExpressionCorpus select_samples(const Dataset& data, std::optional<double> xi = std::nullopt);

/// Keeps the listed peaks, the lows they own (plus unowned lows), and every neutral.
ExpressionCorpus subset_corpus(const ExpressionCorpus& corpus, std::span<const int> peak_indices);

struct AugmentOptions
{
  bool use_lows = false;
  std::optional<double> theta_ne;
  std::optional<double> theta_exp;
  bool filter = true;
};

struct AugmentSummary
{
  std::vector<std::string> skipped_subjects;
  std::size_t generated = 0;
  std::size_t dropped = 0;
};

/// Projects a corpus with a model fit on its peaks and appends the requested
/// low-intensity and generated vectors. Subjects are processed in ascending id order.
AugmentedTrainingSet build_training_set(const EmbeddingModel& model, const ExpressionCorpus& corpus,
                                        const AugmentOptions& options, AugmentSummary* summary = nullptr);

} // namespace slpm
