#include "slpm/feataug.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "slpm/error.hpp"

namespace slpm {

namespace {

void check_theta(double theta, const char* name)
{
  if (!(theta > 0.0 && theta < 1.0))
    throw DataError(std::string(name) + " must lie strictly between 0 and 1");
}

AugmentedTrainingSet empty_block(Eigen::Index dim)
{
  AugmentedTrainingSet out;
  out.vectors.resize(0, dim);
  return out;
}

void append(AugmentedTrainingSet& into, const AugmentedTrainingSet& block)
{
  if (block.size() == 0) return;
  if (into.vectors.cols() != block.vectors.cols())
    throw DataError("training blocks disagree on subspace dimension");
  const Eigen::Index start = into.vectors.rows();
  into.vectors.conservativeResize(start + block.size(), Eigen::NoChange);
  into.vectors.bottomRows(block.size()) = block.vectors;
  into.labels.insert(into.labels.end(), block.labels.begin(), block.labels.end());
  into.provenance.insert(into.provenance.end(), block.provenance.begin(), block.provenance.end());
}

bool is_generated(const Provenance& p)
{
  return p.kind == Provenance::Kind::gen_neutral || p.kind == Provenance::Kind::gen_expr;
}

Matrix gather_rows(const Matrix& X, std::span<const int> rows)
{
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

} // namespace

std::string to_string(const Provenance& p)
{
  switch (p.kind)
  {
    case Provenance::Kind::original_peak: return "original_peak";
    case Provenance::Kind::neutral: return "neutral";
    case Provenance::Kind::low_intensity: return "low_intensity:xi=" + format_real(p.theta);
    case Provenance::Kind::gen_neutral:
      return "gen_neutral:theta=" + format_real(p.theta) + ":src=" + std::to_string(p.source);
    case Provenance::Kind::gen_expr:
      return "gen_expr:theta=" + format_real(p.theta) + ":src=" + std::to_string(p.source) + ">" +
             std::to_string(p.target);
  }
  return "unknown";
}

int frame_index(int frame_count, double theta)
{
  if (frame_count < 1) throw DataError("frame count must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw DataError("intensity must lie in [0, 1]");
  const long f = std::lround(static_cast<double>(frame_count) * theta);
  return static_cast<int>(std::clamp<long>(f, 1, frame_count));
}

AugmentedTrainingSet augment_low_intensity(const EmbeddingModel& model, const Matrix& peaks,
                                           std::span<const int> peak_labels, const Matrix& lows,
                                           std::span<const int> low_labels, std::span<const double> low_xi)
{
  if (peak_labels.size() != static_cast<std::size_t>(peaks.rows()) ||
      low_labels.size() != static_cast<std::size_t>(lows.rows()))
    throw DataError("expected one label per sample");
  if (!low_xi.empty() && low_xi.size() != low_labels.size())
    throw DataError("expected one intensity per low-intensity sample");

  AugmentedTrainingSet out;
  out.vectors = project(model, peaks);
  out.labels.assign(peak_labels.begin(), peak_labels.end());
  for (Eigen::Index i = 0; i < peaks.rows(); ++i)
    out.provenance.push_back({Provenance::Kind::original_peak, 1.0, static_cast<int>(i), -1});
  if (lows.rows() == 0) return out;

  AugmentedTrainingSet low;
  low.vectors = project(model, lows);
  low.labels.assign(low_labels.begin(), low_labels.end());
  for (Eigen::Index i = 0; i < lows.rows(); ++i)
  {
    const double xi = low_xi.empty() ? 0.0 : low_xi[static_cast<std::size_t>(i)];
    low.provenance.push_back({Provenance::Kind::low_intensity, xi, static_cast<int>(i), -1});
  }
  append(out, low);
  return out;
}

std::optional<AugmentedTrainingSet> generate_toward_neutral(const SubjectSet& subject, double theta_ne)
{
  check_theta(theta_ne, "theta_ne");
  if (!subject.neutral) return std::nullopt;
  AugmentedTrainingSet out;
  out.vectors = theta_ne * subject.peaks;
  out.vectors.rowwise() += (1.0 - theta_ne) * subject.neutral->transpose();
  out.labels = subject.labels;
  for (std::size_t j = 0; j < subject.labels.size(); ++j)
    out.provenance.push_back({Provenance::Kind::gen_neutral, theta_ne, subject.peak_rows[j], -1});
  return out;
}

AugmentedTrainingSet generate_cross_expression(const SubjectSet& subject, double theta_exp,
                                               const ClassPairSet* allowed)
{
  check_theta(theta_exp, "theta_exp");
  AugmentedTrainingSet out = empty_block(subject.peaks.cols());
  const std::size_t r = subject.labels.size();
  std::vector<Eigen::Index> selected;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k)
    {
      const int cj = subject.labels[j];
      const int ck = subject.labels[k];
      if (j == k || cj == ck) continue;
      if (allowed && !allowed->contains({std::min(cj, ck), std::max(cj, ck)})) continue;
      pairs.emplace_back(j, k);
    }

  out.vectors.resize(static_cast<Eigen::Index>(pairs.size()), subject.peaks.cols());
  for (std::size_t n = 0; n < pairs.size(); ++n)
  {
    const auto [j, k] = pairs[n];
    const auto row = static_cast<Eigen::Index>(n);
    out.vectors.row(row) = theta_exp * subject.peaks.row(static_cast<Eigen::Index>(j)) +
                           (1.0 - theta_exp) * subject.peaks.row(static_cast<Eigen::Index>(k));
    out.labels.push_back(subject.labels[j]);
    out.provenance.push_back(
      {Provenance::Kind::gen_expr, theta_exp, subject.peak_rows[j], subject.peak_rows[k]});
  }
  return out;
}

std::vector<std::pair<int, Vector>> class_centroids(const AugmentedTrainingSet& reference)
{
  std::map<int, std::pair<Vector, int>> acc;
  for (Eigen::Index i = 0; i < reference.size(); ++i)
  {
    if (reference.provenance[static_cast<std::size_t>(i)].kind != Provenance::Kind::original_peak) continue;
    auto [it, inserted] = acc.try_emplace(reference.labels[static_cast<std::size_t>(i)],
                                          Vector::Zero(reference.vectors.cols()), 0);
    it->second.first += reference.vectors.row(i).transpose();
    ++it->second.second;
  }
  std::vector<std::pair<int, Vector>> out;
  for (auto& [label, sum] : acc) out.emplace_back(label, sum.first / static_cast<double>(sum.second));
  return out;
}

ClassPairSet proximate_class_pairs(const AugmentedTrainingSet& reference)
{
  const auto centroids = class_centroids(reference);
  std::vector<std::pair<double, std::pair<int, int>>> distances;
  for (std::size_t a = 0; a < centroids.size(); ++a)
    for (std::size_t b = a + 1; b < centroids.size(); ++b)
      distances.push_back({(centroids[a].second - centroids[b].second).norm(),
                           {centroids[a].first, centroids[b].first}});
  ClassPairSet out;
  if (distances.empty()) return out;

  std::vector<double> sorted;
  for (const auto& d : distances) sorted.push_back(d.first);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (const auto& [dist, pair] : distances)
    if (dist <= median) out.insert(pair);
  return out;
}

AugmentedTrainingSet filter_generated(const AugmentedTrainingSet& candidates,
                                      const AugmentedTrainingSet& reference)
{
  const auto centroids = class_centroids(reference);
  AugmentedTrainingSet out = empty_block(candidates.vectors.cols());
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < candidates.size(); ++i)
  {
    const auto idx = static_cast<std::size_t>(i);
    if (!is_generated(candidates.provenance[idx]))
    {
      keep.push_back(static_cast<int>(i));
      continue;
    }
    const int own = candidates.labels[idx];
    double own_dist = -1.0;
    double best_other = std::numeric_limits<double>::infinity();
    for (const auto& [label, centroid] : centroids)
    {
      const double d2 = (candidates.vectors.row(i).transpose() - centroid).squaredNorm();
      if (label == own) own_dist = d2;
      else best_other = std::min(best_other, d2);
    }
    if (own_dist >= 0.0 && own_dist <= best_other) keep.push_back(static_cast<int>(i));
  }
  out.vectors = gather_rows(candidates.vectors, keep);
  for (int i : keep)
  {
    out.labels.push_back(candidates.labels[static_cast<std::size_t>(i)]);
    out.provenance.push_back(candidates.provenance[static_cast<std::size_t>(i)]);
  }
  return out;
}

AugmentedTrainingSet assemble_augmented(const AugmentedTrainingSet& base, const AugmentedTrainingSet& gen_ne,
                                        const AugmentedTrainingSet& gen_exp)
{
  for (const auto* block : {&gen_ne, &gen_exp})
    if (block->size() > 0 && block->vectors.cols() != base.vectors.cols())
      throw DataError("training blocks disagree on subspace dimension");
  AugmentedTrainingSet out = base;
  append(out, gen_ne);
  append(out, gen_exp);
  return out;
}

ExpressionCorpus select_samples(const Dataset& data, std::optional<double> xi)
{
  ExpressionCorpus out;
  out.label_names = data.label_names;
  std::vector<int> peak_rows, low_rows, neutral_rows;
  std::vector<double> low_xi;
  std::vector<int> low_owner;
  const auto subject_of = [&](int row) {
    return data.has_subjects() ? data.subjects[static_cast<std::size_t>(row)] : std::string{};
  };

  if (data.has_sequences())
  {
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> groups;
    for (int i = 0; i < static_cast<int>(data.size()); ++i)
    {
      auto [it, inserted] = groups.try_emplace(data.sequences[static_cast<std::size_t>(i)]);
      if (inserted) order.push_back(it->first);
      it->second.push_back(i);
    }
    std::set<std::string> subjects_with_neutral;
    for (const auto& id : order)
    {
      auto rows = groups.at(id);
      if (data.has_frames())
        std::stable_sort(rows.begin(), rows.end(), [&](int a, int b) {
          return data.frames[static_cast<std::size_t>(a)] < data.frames[static_cast<std::size_t>(b)];
        });
      const int n = static_cast<int>(rows.size());
      if (n < 2) throw DataError("sequence '" + id + "' needs at least two frames");

      const int peak = rows.back();
      peak_rows.push_back(peak);
      out.peak_subjects.push_back(data.has_subjects() ? subject_of(peak) : id);
      if (xi)
      {
        const int f = frame_index(n, *xi);
        if (f < n)
        {
          low_rows.push_back(rows[static_cast<std::size_t>(f - 1)]);
          low_xi.push_back(*xi);
          low_owner.push_back(static_cast<int>(peak_rows.size()) - 1);
        }
      }
      if (subjects_with_neutral.insert(out.peak_subjects.back()).second)
      {
        neutral_rows.push_back(rows.front());
        out.neutral_subjects.push_back(out.peak_subjects.back());
      }
    }
  }
  else
  {
    std::set<std::string> subjects_with_neutral;
    for (int i = 0; i < static_cast<int>(data.size()); ++i)
    {
      const double intensity = data.has_intensities() ? data.intensities[static_cast<std::size_t>(i)] : 1.0;
      if (intensity == 0.0)
      {
        if (data.has_subjects() && subjects_with_neutral.insert(subject_of(i)).second)
        {
          neutral_rows.push_back(i);
          out.neutral_subjects.push_back(subject_of(i));
        }
      }
      else if (intensity < 1.0)
      {
        low_rows.push_back(i);
        low_xi.push_back(intensity);
      }
      else
      {
        peak_rows.push_back(i);
        out.peak_subjects.push_back(data.has_subjects() ? subject_of(i) : "#" + std::to_string(i));
      }
    }
    for (int row : low_rows)
    {
      int owner = -1;
      if (data.has_subjects())
        for (std::size_t p = 0; p < peak_rows.size(); ++p)
          if (data.labels[static_cast<std::size_t>(peak_rows[p])] == data.labels[static_cast<std::size_t>(row)] &&
              out.peak_subjects[p] == subject_of(row))
          {
            owner = static_cast<int>(p);
            break;
          }
      low_owner.push_back(owner);
    }
  }

  out.peaks = gather_rows(data.features, peak_rows);
  for (int r : peak_rows) out.peak_labels.push_back(data.labels[static_cast<std::size_t>(r)]);
  out.lows = gather_rows(data.features, low_rows);
  for (int r : low_rows) out.low_labels.push_back(data.labels[static_cast<std::size_t>(r)]);
  out.low_intensity = std::move(low_xi);
  out.low_owner = std::move(low_owner);
  out.neutrals = gather_rows(data.features, neutral_rows);
  return out;
}

ExpressionCorpus subset_corpus(const ExpressionCorpus& corpus, std::span<const int> peak_indices)
{
  ExpressionCorpus out;
  out.label_names = corpus.label_names;
  std::map<int, int> remap;
  std::vector<int> peaks(peak_indices.begin(), peak_indices.end());
  for (std::size_t i = 0; i < peaks.size(); ++i)
  {
    remap[peaks[i]] = static_cast<int>(i);
    out.peak_labels.push_back(corpus.peak_labels[static_cast<std::size_t>(peaks[i])]);
    out.peak_subjects.push_back(corpus.peak_subjects[static_cast<std::size_t>(peaks[i])]);
  }
  out.peaks = gather_rows(corpus.peaks, peaks);

  std::vector<int> lows;
  for (std::size_t l = 0; l < corpus.low_owner.size(); ++l)
  {
    const int owner = corpus.low_owner[l];
    if (owner >= 0 && !remap.contains(owner)) continue;
    lows.push_back(static_cast<int>(l));
    out.low_labels.push_back(corpus.low_labels[l]);
    out.low_intensity.push_back(corpus.low_intensity[l]);
    out.low_owner.push_back(owner >= 0 ? remap.at(owner) : -1);
  }
  out.lows = gather_rows(corpus.lows, lows);
  out.neutrals = corpus.neutrals;
  out.neutral_subjects = corpus.neutral_subjects;
  return out;
}

AugmentedTrainingSet build_training_set(const EmbeddingModel& model, const ExpressionCorpus& corpus,
                                        const AugmentOptions& options, AugmentSummary* summary)
{
  const Matrix no_lows(0, corpus.peaks.cols());
  const AugmentedTrainingSet reference =
    augment_low_intensity(model, corpus.peaks, corpus.peak_labels, no_lows, {});
  AugmentedTrainingSet base = reference;
  if (options.use_lows && corpus.lows.rows() > 0)
    base = augment_low_intensity(model, corpus.peaks, corpus.peak_labels, corpus.lows, corpus.low_labels,
                                 corpus.low_intensity);

  const Eigen::Index d = model.output_dim();
  AugmentedTrainingSet gen_ne = empty_block(d);
  AugmentedTrainingSet gen_exp = empty_block(d);
  if (options.theta_ne || options.theta_exp)
  {
    std::map<std::string, SubjectSet> subjects;
    for (std::size_t i = 0; i < corpus.peak_labels.size(); ++i)
    {
      auto& s = subjects[corpus.peak_subjects[i]];
      s.subject = corpus.peak_subjects[i];
      s.labels.push_back(corpus.peak_labels[i]);
      s.peak_rows.push_back(static_cast<int>(i));
    }
    const Matrix neutral_proj = corpus.neutrals.rows() ? project(model, corpus.neutrals) : Matrix(0, d);
    for (std::size_t n = 0; n < corpus.neutral_subjects.size(); ++n)
      if (auto it = subjects.find(corpus.neutral_subjects[n]); it != subjects.end() && !it->second.neutral)
        it->second.neutral = neutral_proj.row(static_cast<Eigen::Index>(n)).transpose();

    ClassPairSet allowed;
    if (options.filter) allowed = proximate_class_pairs(reference);
    for (auto& [id, s] : subjects)
    {
      s.peaks = gather_rows(reference.vectors, s.peak_rows);
      if (options.theta_ne)
      {
        if (auto block = generate_toward_neutral(s, *options.theta_ne)) append(gen_ne, *block);
        else if (summary) summary->skipped_subjects.push_back(id);
      }
      if (options.theta_exp)
        append(gen_exp, generate_cross_expression(s, *options.theta_exp, options.filter ? &allowed : nullptr));
    }
  }

  const std::size_t generated = static_cast<std::size_t>(gen_ne.size() + gen_exp.size());
  if (options.filter)
  {
    gen_ne = filter_generated(gen_ne, reference);
    gen_exp = filter_generated(gen_exp, reference);
  }
  if (summary)
  {
    summary->generated = generated;
    summary->dropped = generated - static_cast<std::size_t>(gen_ne.size() + gen_exp.size());
  }
  return assemble_augmented(base, gen_ne, gen_exp);
}

} // namespace slpm
