#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slpm/embed.hpp"
#include "slpm/feataug.hpp"

namespace slpm {

/// Counts indexed [true][predicted].
class ConfusionMatrix
{
public:
  explicit ConfusionMatrix(int classes = 0);

  void add(int truth, int predicted);
  void merge(const ConfusionMatrix& other);

  int classes() const { return mClasses; }
  long count(int truth, int predicted) const;
  long total() const;
  long correct() const;
  long row_sum(int truth) const;
  double accuracy() const;

private:
  int mClasses;
  std::vector<long> mCounts;
};

/// Label of the nearest training row (Euclidean), ties to the smaller row index.
int knn1_classify(const AugmentedTrainingSet& train, const Eigen::Ref<const Eigen::RowVectorXd>& query);

struct FoldPlan
{
  int folds = 0;
  std::uint64_t seed = 0;
  /// Fold of every sample.
  std::vector<int> assignment;
  /// Classes with fewer samples than folds.
  std::vector<int> flagged_classes;

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

/// Per class, samples are shuffled with a seeded mt19937_64 and dealt
/// round-robin, starting where the previous class stopped.
FoldPlan stratified_kfold(std::span<const int> labels, int folds, std::uint64_t seed);

struct EvalReport
{
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<double> fold_accuracy;
  std::vector<int> fold_assignment;
  /// Rows of the (possibly augmented) training set, per fold.
  std::vector<long> training_rows;
  double fit_ms = 0.0;
  double predict_ms = 0.0;
};

/// Fits on the training peaks, builds the training set per `augment`,
/// projects the test peaks and classifies them with 1-NN.
EvalReport evaluate_split(const EmbeddingConfig& cfg, const ExpressionCorpus& corpus,
                          std::span<const int> train_peaks, std::span<const int> test_peaks,
                          const AugmentOptions& augment = {});

/// Plain split without subjects or augmentation.
EvalReport evaluate_split(const EmbeddingConfig& cfg, const Matrix& train, std::span<const int> train_labels,
                          const Matrix& test, std::span<const int> test_labels, int classes);

/// Stratified k-fold over the corpus peaks.
EvalReport cross_validate(const EmbeddingConfig& cfg, const ExpressionCorpus& corpus, int folds,
                          std::uint64_t seed, const AugmentOptions& augment = {});

struct BenchmarkEntry
{
  Method method = Method::slpm;
  double median_ms = 0.0;
  std::vector<double> samples_ms;
};

/// Median fit wall time per method over `repeats` runs (repeats >= 3), after
/// one untimed warm-up fit per method. Methods are timed in rotation.
std::vector<BenchmarkEntry> benchmark_fit_runtime(std::span<const Method> methods, const Matrix& X,
                                                  std::span<const int> labels, const EmbeddingConfig& base,
                                                  int repeats);

double median(std::vector<double> values);

} // namespace slpm
