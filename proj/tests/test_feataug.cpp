#include <doctest.h>

#include <map>

#include "oracle.hpp"
#include "slpm/dataset.hpp"
#include "slpm/error.hpp"
#include "slpm/feataug.hpp"
#include "test_util.hpp"

using namespace slpm;
using namespace slpm::testing;

namespace {

SubjectSet make_subject(std::mt19937_64& rng, const std::vector<int>& labels, int d, bool neutral)
{
  SubjectSet s;
  s.subject = "s";
  s.peaks = random_matrix(rng, static_cast<int>(labels.size()), d);
  s.labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) s.peak_rows.push_back(static_cast<int>(10 + i));
  if (neutral) s.neutral = random_matrix(rng, d, 1).col(0);
  return s;
}

// theta recovered from g = theta a + (1 - theta) b by projection onto a - b.
double recover_theta(const Vector& g, const Vector& a, const Vector& b)
{
  return (g - b).dot(a - b) / (a - b).squaredNorm();
}

AugmentedTrainingSet peaks_block(const Matrix& V, const std::vector<int>& labels)
{
  AugmentedTrainingSet s;
  s.vectors = V;
  s.labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i)
    s.provenance.push_back({Provenance::Kind::original_peak, 1.0, static_cast<int>(i), -1});
  return s;
}

} // namespace

TEST_CASE("frame_index rounds and clamps")
{
  CHECK(frame_index(30, 0.9) == 27);
  CHECK(frame_index(30, 1.0) == 30);
  CHECK(frame_index(10, 0.0) == 1);
  CHECK(frame_index(10, 0.25) == 3);
  CHECK(frame_index(1, 0.4) == 1);
  CHECK_THROWS_AS(frame_index(0, 0.5), DataError);
  CHECK_THROWS_AS(frame_index(10, 1.5), DataError);
}

TEST_CASE("toward-neutral interpolation recovers theta")
{
  std::mt19937_64 rng(8);
  const SubjectSet s = make_subject(rng, {0, 1, 2}, 4, true);
  const auto gen = generate_toward_neutral(s, 0.8);
  REQUIRE(gen);
  REQUIRE(gen->size() == 3);
  for (int j = 0; j < 3; ++j)
  {
    CHECK(std::abs(recover_theta(gen->vectors.row(j).transpose(), s.peaks.row(j).transpose(), *s.neutral) - 0.8) <=
          1e-10);
    CHECK(gen->labels[j] == s.labels[j]);
    CHECK(gen->provenance[j].source == s.peak_rows[j]);
  }
  CHECK(to_string(gen->provenance[0]) == "gen_neutral:theta=0.80000000000000004:src=10");

  const SubjectSet bare = make_subject(rng, {0, 1}, 4, false);
  CHECK_FALSE(generate_toward_neutral(bare, 0.8));
  CHECK_THROWS_AS(generate_toward_neutral(s, 1.0), DataError);
}

TEST_CASE("cross-expression pairs: counts per direction and theta recovery")
{
  std::mt19937_64 rng(9);
  const std::vector<int> labels{0, 0, 1, 2, 2, 2};
  const SubjectSet s = make_subject(rng, labels, 3, false);
  const AugmentedTrainingSet gen = generate_cross_expression(s, 0.7);

  std::map<std::pair<int, int>, int> counts;
  for (Eigen::Index i = 0; i < gen.size(); ++i)
  {
    const auto& p = gen.provenance[i];
    const int j = p.source - 10, k = p.target - 10;
    ++counts[{labels[j], labels[k]}];
    CHECK(gen.labels[i] == labels[j]);
    CHECK(std::abs(recover_theta(gen.vectors.row(i).transpose(), s.peaks.row(j).transpose(),
                                 s.peaks.row(k).transpose()) - 0.7) <= 1e-10);
  }
  const std::map<int, int> n{{0, 2}, {1, 1}, {2, 3}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) CHECK(counts[{a, b}] == n.at(a) * n.at(b));
  CHECK(gen.size() == 2 * (2 * 1 + 2 * 3 + 1 * 3));
  CHECK(to_string(gen.provenance[0]).starts_with("gen_expr:theta=0.69999999999999996:src=10>12"));

  const ClassPairSet allowed{{0, 2}};
  const AugmentedTrainingSet limited = generate_cross_expression(s, 0.7, &allowed);
  CHECK(limited.size() == 2 * 2 * 3);
}

TEST_CASE("proximate_class_pairs keeps pairs up to the median distance")
{
  Matrix V(3, 1);
  V << 0, 1, 3;
  const ClassPairSet pairs = proximate_class_pairs(peaks_block(V, {0, 1, 2}));
  // Distances 1, 3, 2: median 2.
  CHECK(pairs == ClassPairSet{{0, 1}, {1, 2}});
}

TEST_CASE("filter_generated agrees with the nearest-centroid oracle")
{
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial)
  {
    const int classes = 2 + trial % 4;
    const int m = classes * 4;
    const auto labels = random_labels(rng, m, classes);
    Matrix V = random_matrix(rng, m, 2);
    for (int i = 0; i < m; ++i) V(i, 0) += 2.0 * labels[i];
    const AugmentedTrainingSet ref = peaks_block(V, labels);

    std::vector<Vector> centroids(classes, Vector::Zero(2));
    std::vector<int> sizes(classes, 0);
    for (int i = 0; i < m; ++i)
    {
      centroids[labels[i]] += V.row(i).transpose();
      ++sizes[labels[i]];
    }
    for (int c = 0; c < classes; ++c) centroids[c] /= sizes[c];

    AugmentedTrainingSet cand;
    cand.vectors = 1.5 * random_matrix(rng, 30, 2);
    cand.vectors.col(0).array() += static_cast<double>(classes);
    std::uniform_int_distribution<int> pick(0, classes - 1);
    for (int i = 0; i < 30; ++i)
    {
      cand.labels.push_back(pick(rng));
      cand.provenance.push_back({i % 2 ? Provenance::Kind::gen_expr : Provenance::Kind::gen_neutral, 0.8, i, i});
    }
    const AugmentedTrainingSet kept = filter_generated(cand, ref);
    std::vector<int> expected;
    for (int i = 0; i < 30; ++i)
      if (oracle::nearest_centroid_keeps(cand.vectors.row(i).transpose(), cand.labels[i], centroids))
        expected.push_back(i);
    std::vector<int> actual;
    for (const auto& p : kept.provenance) actual.push_back(p.source);
    CHECK(actual == expected);
  }
}

TEST_CASE("filter_generated passes non-generated rows through")
{
  Matrix V(2, 1);
  V << 0, 10;
  const AugmentedTrainingSet ref = peaks_block(V, {0, 1});
  AugmentedTrainingSet cand;
  cand.vectors = Matrix::Constant(2, 1, 9.0);
  cand.labels = {0, 0};
  cand.provenance = {{Provenance::Kind::low_intensity, 0.5, 0, -1}, {Provenance::Kind::gen_neutral, 0.8, 0, -1}};
  const AugmentedTrainingSet kept = filter_generated(cand, ref);
  REQUIRE(kept.size() == 1);
  CHECK(kept.provenance[0].kind == Provenance::Kind::low_intensity);
}

TEST_CASE("select_samples on sequence data")
{
  const std::string csv =
    "f0,label,subject,sequence,frame\n"
    "0,happy,a,q1,1\n"
    "5,happy,a,q1,10\n"
    "4,happy,a,q1,9\n"
    "1,happy,a,q1,2\n"
    "2,happy,a,q1,3\n"
    "3,happy,a,q1,4\n"
    "0.5,sad,a,q2,1\n"
    "7,sad,a,q2,2\n"
    "0.1,sad,b,q3,1\n"
    "8,sad,b,q3,2\n";
  const Dataset data = parse_dataset_csv(csv);
  const ExpressionCorpus c = select_samples(data, 0.5);
  REQUIRE(c.peaks.rows() == 3);
  CHECK(c.peaks(0, 0) == 5.0);
  CHECK(c.peaks(1, 0) == 7.0);
  CHECK(c.peak_subjects == std::vector<std::string>{"a", "a", "b"});
  // 6-frame sequence: frame_index(6, 0.5) = 3 (value 2). Two-frame sequences give frame 1.
  REQUIRE(c.lows.rows() == 3);
  CHECK(c.lows(0, 0) == 2.0);
  CHECK(c.low_owner == std::vector<int>{0, 1, 2});
  CHECK(c.neutral_subjects == std::vector<std::string>{"a", "b"});
  CHECK(c.neutrals(0, 0) == 0.0);
  CHECK(c.neutrals(1, 0) == 0.1);

  const ExpressionCorpus plain = select_samples(data);
  CHECK(plain.lows.rows() == 0);

  const std::vector<int> keep{2};
  const ExpressionCorpus sub = subset_corpus(c, keep);
  CHECK(sub.peaks.rows() == 1);
  CHECK(sub.low_owner == std::vector<int>{0});
  CHECK(sub.neutrals.rows() == 2);
}

TEST_CASE("select_samples on static data")
{
  const std::string csv =
    "f0,label,subject,intensity\n"
    "0,happy,a,0\n"
    "3,happy,a,1\n"
    "1.5,happy,a,0.5\n"
    "4,sad,b,1\n"
    "2,sad,c,0.4\n";
  const ExpressionCorpus c = select_samples(parse_dataset_csv(csv));
  CHECK(c.peaks.rows() == 2);
  CHECK(c.lows.rows() == 2);
  CHECK(c.low_owner == std::vector<int>{0, -1});
  CHECK(c.low_intensity == std::vector<double>{0.5, 0.4});
  CHECK(c.neutral_subjects == std::vector<std::string>{"a"});

  const ExpressionCorpus anon = select_samples(parse_dataset_csv("f0,label\n1,x\n2,y\n"));
  CHECK(anon.peak_subjects == std::vector<std::string>{"#0", "#1"});
}

TEST_CASE("build_training_set assembles base, toward-neutral and cross-expression rows")
{
  std::mt19937_64 rng(31);
  Dataset data;
  const int subjects = 6, classes = 3;
  data.label_names = {"a", "b", "c"};
  data.features.resize(subjects * (classes + 1), 5);
  int row = 0;
  for (int s = 0; s < subjects; ++s)
  {
    for (int c = -1; c < classes; ++c, ++row)
    {
      data.features.row(row) = 0.3 * random_matrix(rng, 1, 5);
      if (c >= 0) data.features(row, c) += 4.0;
      data.labels.push_back(std::max(c, 0));
      data.subjects.push_back("s" + std::to_string(s));
      data.intensities.push_back(c < 0 ? 0.0 : 1.0);
    }
  }
  const ExpressionCorpus corpus = select_samples(data);
  REQUIRE(corpus.neutrals.rows() == subjects);
  EmbeddingConfig cfg;
  cfg.d = 2;
  cfg.k_w = 2;
  cfg.k_b = 2;
  cfg.pca_energy = 1.0;
  const EmbeddingModel model = fit(corpus.peaks, corpus.peak_labels, cfg);

  AugmentSummary summary;
  const AugmentedTrainingSet all =
    build_training_set(model, corpus, {false, 0.8, 0.8, false}, &summary);
  const int r = subjects * classes;
  CHECK(all.size() == r + r + subjects * classes * (classes - 1));
  CHECK(summary.generated == static_cast<std::size_t>(r + subjects * 6));
  CHECK(summary.dropped == 0);
  CHECK(summary.skipped_subjects.empty());
  CHECK(all.provenance[r].kind == Provenance::Kind::gen_neutral);
  CHECK(all.provenance.back().kind == Provenance::Kind::gen_expr);

  const AugmentedTrainingSet filtered = build_training_set(model, corpus, {false, 0.8, 0.8, true}, &summary);
  CHECK(filtered.size() <= all.size());
  CHECK(summary.generated - summary.dropped == static_cast<std::size_t>(filtered.size() - r));

  const AugmentedTrainingSet base = build_training_set(model, corpus, {});
  CHECK(base.size() == r);
  CHECK((base.vectors - project(model, corpus.peaks)).cwiseAbs().maxCoeff() == 0.0);
}
