#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "slpm/dataset.hpp"
#include "slpm/error.hpp"
#include "slpm/export.hpp"
#include "slpm/lbp.hpp"
#include "slpm/model_io.hpp"
#include "slpm/synth.hpp"
#include "test_util.hpp"

using namespace slpm;
using namespace slpm::testing;

namespace {

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / "slpm_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::size_t parse_line(const std::string& text)
{
  try
  {
    parse_dataset_csv(text);
  }
  catch (const ParseError& e)
  {
    return e.line();
  }
  return 0;
}

const char* kHandModel =
  "SLPM-MODEL v1\n"
  "method slpm\n"
  "dims 2 2 1\n"
  "beta 1\n"
  "kw 5\n"
  "kb 5\n"
  "t auto\n"
  "alpha 1\n"
  "energy 0.98\n"
  "mean 1 2\n"
  "pca_basis\n"
  "0 1\n"
  "1 0\n"
  "manifold_basis\n"
  "0.6\n"
  "0.8\n"
  "end\n";

} // namespace

TEST_CASE("dataset csv parses optional columns in any order")
{
  const Dataset d = parse_dataset_csv(
    "subject,f1,label,f0,intensity\n"
    "a,2,happy,1,1\n"
    "\n"
    "b,4,sad,3,0.5\r\n"
    "a,6,happy,5,0\n");
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.features(1, 0) == 3.0);
  CHECK(d.features(1, 1) == 4.0);
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.label_names == std::vector<std::string>{"happy", "sad"});
  CHECK(d.subjects == std::vector<std::string>{"a", "b", "a"});
  CHECK(d.intensities == std::vector<double>{1.0, 0.5, 0.0});
  CHECK_FALSE(d.has_sequences());
}

TEST_CASE("dataset csv groups sequences and sorts frames")
{
  const Dataset d = parse_dataset_csv(
    "f0,label,sequence,frame\n"
    "1,x,q,2\n"
    "9,y,r,1\n"
    "0,x,q,1\n");
  CHECK(d.sequences == std::vector<std::string>{"q", "q", "r"});
  CHECK(d.frames == std::vector<long long>{1, 2, 1});
  CHECK(d.features(0, 0) == 0.0);
}

TEST_CASE("dataset csv reports line numbers")
{
  CHECK(parse_line("") == 1);
  CHECK(parse_line("f0,label,bogus\n1,a,2\n") == 1);
  CHECK(parse_line("f0,f0,label\n") == 1);
  CHECK(parse_line("f0,f2,label\n") == 1);
  CHECK(parse_line("f0\n1\n") == 1);
  CHECK(parse_line("f0,label\n1,a\n2\n") == 3);
  CHECK(parse_line("f0,label\n1,a\nxx,b\n") == 3);
  CHECK(parse_line("f0,label\n1,\n") == 2);
  CHECK(parse_line("f0,label,intensity\n1,a,1.5\n") == 2);
  CHECK(parse_line("f0,label,frame,sequence\n1,a,1.5,q\n") == 2);
  CHECK(parse_line("f0,label\n") == 1);
  CHECK_THROWS_AS(load_dataset_csv(scratch("missing.csv")), DataError);
}

TEST_CASE("dataset csv round-trips exactly")
{
  SynthOptions o;
  o.classes = 3;
  o.per_class = 4;
  o.dim = 5;
  Dataset d = synth_blobs(o);
  d.intensities.assign(static_cast<std::size_t>(d.size()), 1.0);
  d.intensities[2] = 0.1 + 0.2;
  const auto path = scratch("round.csv");
  save_dataset_csv(d, path);
  const Dataset back = load_dataset_csv(path);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(back.subjects == d.subjects);
  CHECK(back.intensities == d.intensities);
  CHECK(format_dataset_csv(back) == format_dataset_csv(d));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST_CASE("hand-written model file loads and projects")
{
  const EmbeddingModel m = parse_model(kHandModel);
  CHECK(m.method == Method::slpm);
  CHECK(m.input_dim() == 2);
  CHECK(m.output_dim() == 1);
  CHECK_FALSE(m.config.t);
  CHECK(std::isnan(m.pca.energy_kept));
  Matrix x(1, 2);
  x << 4, 7;
  // Centered (3, 5) -> PCA (5, 3) -> 0.6*5 + 0.8*3.
  CHECK(project(m, x)(0, 0) == doctest::Approx(5.4));
  CHECK(format_model(parse_model(format_model(m))) == format_model(m));
  CHECK(format_model(m).find("0.59999999999999998\n") != std::string::npos);
}

TEST_CASE("model files round-trip bit-exactly")
{
  std::mt19937_64 rng(12);
  const Matrix X = random_matrix(rng, 30, 6);
  const std::vector<int> y = random_labels(rng, 30, 3);
  for (Method method : {Method::slpm, Method::sdm, Method::mfa, Method::lsda, Method::pca_only})
  {
    EmbeddingConfig cfg;
    cfg.method = method;
    cfg.d = 2;
    cfg.k_w = 3;
    cfg.k_b = 2;
    cfg.t = method == Method::slpm ? std::optional<double>(1.0 / 3.0) : std::nullopt;
    const EmbeddingModel m = fit(X, y, cfg);
    const auto path = scratch("model.txt");
    save_model(m, path);
    const EmbeddingModel back = load_model(path);
    CHECK(back.method == method);
    CHECK(back.pca.mean == m.pca.mean);
    CHECK(back.pca.basis == m.pca.basis);
    CHECK(back.manifold_basis == m.manifold_basis);
    CHECK(back.config.t == m.config.t);
    CHECK(project(back, X) == project(m, X));
    CHECK(format_model(back) == format_model(m));
  }
}

TEST_CASE("malformed model files")
{
  const std::string good = kHandModel;
  CHECK_THROWS_WITH_AS(parse_model("SLPM-MODEL v2\n"), doctest::Contains("unsupported model version"), ParseError);
  CHECK_THROWS_AS(parse_model("hello\n"), ParseError);
  CHECK_THROWS_AS(parse_model(good.substr(0, good.find("manifold_basis"))), ParseError);
  std::string bad = good;
  bad.replace(bad.find("0.6"), 3, "abc");
  CHECK_THROWS_AS(parse_model(bad), ParseError);
  bad = good;
  bad.replace(bad.find("dims 2 2 1"), 10, "dims 2 3 1");
  CHECK_THROWS_AS(parse_model(bad), ParseError);
  bad = good;
  bad.replace(bad.find("method slpm"), 11, "method what");
  CHECK_THROWS_AS(parse_model(bad), ParseError);
}

TEST_CASE("synth_blobs shape, geometry and determinism")
{
  const Dataset a = synth_blobs();
  CHECK(a.size() == 360);
  CHECK(a.dim() == 100);
  CHECK(a.label_names.size() == 6);
  CHECK(a.labels[59] == 0);
  CHECK(a.labels[60] == 1);
  CHECK(a.subjects[60] == "s0");
  CHECK(format_dataset_csv(a) == format_dataset_csv(synth_blobs()));
  SynthOptions other;
  other.seed = 7;
  CHECK(synth_blobs(other).features != a.features);
  CHECK((blob_center({}, 0) - blob_center({}, 3)).norm() == doctest::Approx(8.0));

  SynthOptions zero;
  zero.spread = 0.0;
  zero.classes = 2;
  zero.dim = 3;
  zero.per_class = 2;
  const Dataset z = synth_blobs(zero);
  CHECK(z.features.row(0).transpose() == blob_center(zero, 0));

  SynthOptions bad;
  bad.classes = 5;
  bad.dim = 4;
  CHECK_THROWS_AS(synth_blobs(bad), DataError);
}

TEST_CASE("projection export")
{
  SynthOptions o;
  o.classes = 3;
  o.per_class = 8;
  o.dim = 6;
  Dataset d = synth_blobs(o);
  d.intensities.assign(static_cast<std::size_t>(d.size()), 1.0);
  d.intensities[0] = 0.0;
  d.intensities[1] = 0.5;
  EmbeddingConfig cfg;
  cfg.d = 2;
  cfg.k_w = 3;
  cfg.k_b = 3;
  const EmbeddingModel m = fit(d.features, d.labels, cfg);

  const auto prov = dataset_provenance(d);
  CHECK(prov[0].kind == Provenance::Kind::neutral);
  CHECK(prov[1].kind == Provenance::Kind::low_intensity);
  CHECK(prov[2].kind == Provenance::Kind::original_peak);

  const auto csv = scratch("proj.csv");
  export_projection(m, d, csv, ExportFormat::csv);
  const std::string text = read_file(csv);
  CHECK(text.starts_with("y0,y1,label,provenance\n"));
  CHECK(text.find(",c0,neutral\n") != std::string::npos);
  CHECK(text.find(",c0,low_intensity:xi=0.5\n") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 25);

  const auto svg = scratch("proj.svg");
  export_projection(m, d, svg, ExportFormat::svg);
  const std::string pic = read_file(svg);
  CHECK(pic.find("width=\"800\"") != std::string::npos);
  CHECK(pic.find("height=\"600\"") != std::string::npos);
  std::size_t circles = 0;
  for (auto pos = pic.find("<circle"); pos != std::string::npos; pos = pic.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 24);
  CHECK(pic.find("</svg>") != std::string::npos);

  cfg.d = 1;
  const EmbeddingModel one = fit(d.features, d.labels, cfg);
  CHECK_THROWS_AS(export_projection(one, d, svg, ExportFormat::svg), DataError);
}

TEST_CASE("LBP codes follow the hand table")
{
  GrayImage img;
  img.width = 5;
  img.height = 5;
  img.pixels = {10, 20, 30, 40, 50,
                60, 25, 10, 90, 15,
                5,  40, 35, 20, 70,
                1,  2,  3,  4,  5,
                9,  9,  9,  9,  9};
  const int expected[3][3] = {{45, 255, 0}, {128, 33, 81}, {254, 254, 254}};
  for (int y = 1; y <= 3; ++y)
    for (int x = 1; x <= 3; ++x) CHECK(lbp_code(img, x, y) == expected[y - 1][x - 1]);

  const auto h = lbp_histogram(img, 1, 1);
  REQUIRE(h.size() == 256);
  CHECK(h[254] == 3.0);
  CHECK(h[45] == 1.0);
  CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 9.0);

  GrayImage flat{4, 4, std::vector<std::uint8_t>(16, 7)};
  const auto hf = lbp_histogram(flat, 2, 2);
  REQUIRE(hf.size() == 4 * 256);
  // Interior pixels (1,1),(2,1),(1,2),(2,2) land in one cell each.
  for (int c = 0; c < 4; ++c) CHECK(hf[c * 256 + 255] == 1.0);
  CHECK_THROWS_AS(lbp_histogram(flat, 5, 1), DataError);
}

TEST_CASE("PGM parsing")
{
  std::string bytes = "P5\n# comment\n3 2\n255\n";
  bytes += std::string("\x01\x02\x03\x04\x05\x06", 6);
  const GrayImage img = parse_pgm(bytes);
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.at(2, 1) == 6);
  const auto path = scratch("img.pgm");
  write_file_atomic(path, bytes);
  CHECK(lbp_extract_pgm(path, 1, 1).size() == 256);

  CHECK_THROWS_AS(parse_pgm("P2\n3 2\n255\n"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P5\n3 2\n255\n\x01"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P5\n3 2\n65535\n"), ParseError);
}
