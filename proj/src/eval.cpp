#include "slpm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "slpm/error.hpp"

namespace slpm {

ConfusionMatrix::ConfusionMatrix(int classes)
  : mClasses(classes), mCounts(static_cast<std::size_t>(classes) * static_cast<std::size_t>(classes), 0)
{}

void ConfusionMatrix::add(int truth, int predicted)
{
  if (truth < 0 || truth >= mClasses || predicted < 0 || predicted >= mClasses)
    throw DataError("class index out of range for confusion matrix");
  ++mCounts[static_cast<std::size_t>(truth * mClasses + predicted)];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other)
{
  if (other.mClasses != mClasses) throw DataError("confusion matrices disagree on class count");
  for (std::size_t i = 0; i < mCounts.size(); ++i) mCounts[i] += other.mCounts[i];
}

long ConfusionMatrix::count(int truth, int predicted) const
{
  return mCounts[static_cast<std::size_t>(truth * mClasses + predicted)];
}

long ConfusionMatrix::total() const { return std::accumulate(mCounts.begin(), mCounts.end(), 0L); }

long ConfusionMatrix::correct() const
{
  long sum = 0;
  for (int c = 0; c < mClasses; ++c) sum += count(c, c);
  return sum;
}

long ConfusionMatrix::row_sum(int truth) const
{
  long sum = 0;
  for (int c = 0; c < mClasses; ++c) sum += count(truth, c);
  return sum;
}

double ConfusionMatrix::accuracy() const
{
  const long n = total();
  return n ? static_cast<double>(correct()) / static_cast<double>(n) : 0.0;
}

int knn1_classify(const AugmentedTrainingSet& train, const Eigen::Ref<const Eigen::RowVectorXd>& query)
{
  if (train.size() == 0) throw DataError("1-NN needs a non-empty training set");
  if (query.size() != train.vectors.cols()) throw DataError("query dimension mismatch");
  Eigen::Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < train.size(); ++i)
  {
    const double d2 = (train.vectors.row(i) - query).squaredNorm();
    if (d2 < best_d2)
    {
      best_d2 = d2;
      best = i;
    }
  }
  return train.labels[static_cast<std::size_t>(best)];
}

std::vector<int> FoldPlan::test_indices(int fold) const
{
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldPlan::train_indices(int fold) const
{
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, int folds, std::uint64_t seed)
{
  if (folds < 2) throw DataError("cross-validation needs at least two folds");
  if (static_cast<std::size_t>(folds) > labels.size())
    throw DataError("more folds than samples");

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignment.assign(labels.size(), -1);

  std::map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<int>(i));

  std::mt19937_64 rng(seed);
  int next = 0;
  for (auto& [label, rows] : members)
  {
    if (rows.size() < static_cast<std::size_t>(folds)) plan.flagged_classes.push_back(label);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (int row : rows)
    {
      plan.assignment[static_cast<std::size_t>(row)] = next;
      next = (next + 1) % folds;
    }
  }
  return plan;
}

EvalReport evaluate_split(const EmbeddingConfig& cfg, const ExpressionCorpus& corpus,
                          std::span<const int> train_peaks, std::span<const int> test_peaks,
                          const AugmentOptions& augment)
{
  std::set<int> train_set(train_peaks.begin(), train_peaks.end());
  std::set<int> train_classes;
  for (int i : train_peaks) train_classes.insert(corpus.peak_labels[static_cast<std::size_t>(i)]);
  for (int i : test_peaks)
  {
    if (train_set.contains(i)) throw DataError("train and test sets overlap");
    const int label = corpus.peak_labels[static_cast<std::size_t>(i)];
    if (!train_classes.contains(label))
      throw DataError("class '" + corpus.label_names[static_cast<std::size_t>(label)] +
                      "' is absent from the training split");
  }

  const ExpressionCorpus train = subset_corpus(corpus, train_peaks);
  const ExpressionCorpus test = subset_corpus(corpus, test_peaks);

  EvalReport report;
  report.confusion = ConfusionMatrix(static_cast<int>(corpus.label_names.size()));

  const auto fit_start = std::chrono::steady_clock::now();
  const EmbeddingModel model = fit(train.peaks, train.peak_labels, cfg);
  const AugmentedTrainingSet training = build_training_set(model, train, augment);
  const auto fit_end = std::chrono::steady_clock::now();

  const Matrix projected = project(model, test.peaks);
  for (Eigen::Index i = 0; i < projected.rows(); ++i)
    report.confusion.add(test.peak_labels[static_cast<std::size_t>(i)], knn1_classify(training, projected.row(i)));
  const auto predict_end = std::chrono::steady_clock::now();

  report.accuracy = report.confusion.accuracy();
  report.fold_accuracy = {report.accuracy};
  report.training_rows = {static_cast<long>(training.size())};
  report.fit_ms = std::chrono::duration<double, std::milli>(fit_end - fit_start).count();
  report.predict_ms = std::chrono::duration<double, std::milli>(predict_end - fit_end).count();
  return report;
}

EvalReport evaluate_split(const EmbeddingConfig& cfg, const Matrix& train, std::span<const int> train_labels,
                          const Matrix& test, std::span<const int> test_labels, int classes)
{
  ExpressionCorpus corpus;
  corpus.peaks.resize(train.rows() + test.rows(), train.cols());
  corpus.peaks << train, test;
  corpus.peak_labels.assign(train_labels.begin(), train_labels.end());
  corpus.peak_labels.insert(corpus.peak_labels.end(), test_labels.begin(), test_labels.end());
  for (std::size_t i = 0; i < corpus.peak_labels.size(); ++i) corpus.peak_subjects.push_back("#" + std::to_string(i));
  corpus.lows.resize(0, train.cols());
  corpus.neutrals.resize(0, train.cols());
  for (int c = 0; c < classes; ++c) corpus.label_names.push_back(std::to_string(c));

  std::vector<int> train_idx(static_cast<std::size_t>(train.rows()));
  std::iota(train_idx.begin(), train_idx.end(), 0);
  std::vector<int> test_idx(static_cast<std::size_t>(test.rows()));
  std::iota(test_idx.begin(), test_idx.end(), static_cast<int>(train.rows()));
  return evaluate_split(cfg, corpus, train_idx, test_idx);
}

EvalReport cross_validate(const EmbeddingConfig& cfg, const ExpressionCorpus& corpus, int folds,
                          std::uint64_t seed, const AugmentOptions& augment)
{
  const FoldPlan plan = stratified_kfold(corpus.peak_labels, folds, seed);
  EvalReport report;
  report.confusion = ConfusionMatrix(static_cast<int>(corpus.label_names.size()));
  report.fold_assignment = plan.assignment;
  for (int f = 0; f < folds; ++f)
  {
    const auto test = plan.test_indices(f);
    const EvalReport part = evaluate_split(cfg, corpus, plan.train_indices(f), test, augment);
    report.confusion.merge(part.confusion);
    report.fold_accuracy.push_back(part.accuracy);
    report.training_rows.push_back(part.training_rows.front());
    report.fit_ms += part.fit_ms;
    report.predict_ms += part.predict_ms;
  }
  report.accuracy = report.confusion.accuracy();
  return report;
}

double median(std::vector<double> values)
{
  if (values.empty()) throw DataError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<BenchmarkEntry> benchmark_fit_runtime(std::span<const Method> methods, const Matrix& X,
                                                  std::span<const int> labels, const EmbeddingConfig& base,
                                                  int repeats)
{
  if (repeats < 3) throw DataError("benchmark needs at least three repeats");
  std::vector<EmbeddingConfig> configs;
  std::vector<BenchmarkEntry> out;
  for (Method method : methods)
  {
    configs.push_back(base);
    configs.back().method = method;
    out.push_back({method, 0.0, {}});
    fit(X, labels, configs.back());  // warm-up, not timed
  }
  // Round-robin so slow drift of the machine affects every method alike.
  for (int r = 0; r < repeats; ++r)
    for (std::size_t m = 0; m < configs.size(); ++m)
      out[m].samples_ms.push_back(fit(X, labels, configs[m]).fit_time_ms);
  for (auto& entry : out) entry.median_ms = median(entry.samples_ms);
  return out;
}

} // namespace slpm
