#include "slpm/cli.hpp"

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slpm/dataset.hpp"
#include "slpm/embed.hpp"
#include "slpm/error.hpp"
#include "slpm/eval.hpp"
#include "slpm/export.hpp"
#include "slpm/feataug.hpp"
#include "slpm/lbp.hpp"
#include "slpm/model_io.hpp"
#include "slpm/synth.hpp"

namespace slpm::cli {

namespace {

using Json = nlohmann::ordered_json;

struct ModelFlags
{
  std::string method = "slpm";
  int dim = 11;
  double beta = 1.0;
  int kw = 5;
  int kb = 5;
  std::string t = "auto";
  std::optional<double> alpha;
  double pca_energy = 0.98;
  std::uint64_t seed = 42;
};

struct AugmentFlags
{
  std::optional<double> theta_ne;
  std::optional<double> theta_exp;
  std::optional<double> xi;
  bool no_filter = false;
};

const CLI::Validator kHeatWidth(
  [](std::string& value) -> std::string {
    if (value == "auto") return {};
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !(v > 0.0))
      return "must be 'auto' or a positive real";
    return {};
  },
  "auto|REAL>0");

const CLI::Validator kMethodName(
  [](std::string& value) -> std::string {
    return parse_method(value) ? std::string{} : "unknown method '" + value + "'";
  },
  "slpm|sdm|mmc|slpp|mfa|lsda|pca");

const CLI::Validator kOpenUnit(
  [](std::string& value) -> std::string {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !(v > 0.0 && v < 1.0))
      return "must lie strictly between 0 and 1";
    return {};
  },
  "(0,1)");

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_method = true)
{
  if (with_method) cmd->add_option("--method", f.method, "Subspace method")->check(kMethodName)->capture_default_str();
  cmd->add_option("--dim", f.dim, "Subspace dimension")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--beta", f.beta, "Within-class spread weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--kw", f.kw, "Within-class neighbours")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--kb", f.kb, "Between-class neighbours")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--t", f.t, "Heat-kernel width")->check(kHeatWidth)->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "SDM softening / LSDA trade-off");
  cmd->add_option("--pca-energy", f.pca_energy, "PCA energy to keep")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
}

void add_augment_flags(CLI::App* cmd, AugmentFlags& f)
{
  cmd->add_option("--theta-ne", f.theta_ne, "Interpolation weight toward neutral")->check(kOpenUnit);
  cmd->add_option("--theta-exp", f.theta_exp, "Interpolation weight between expressions")->check(kOpenUnit);
  cmd->add_option("--xi", f.xi, "Low-intensity frame position")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--no-filter", f.no_filter, "Keep every generated vector");
}

EmbeddingConfig to_config(const ModelFlags& f)
{
  EmbeddingConfig cfg;
  cfg.method = *parse_method(f.method);
  cfg.d = f.dim;
  cfg.beta = f.beta;
  cfg.k_w = f.kw;
  cfg.k_b = f.kb;
  if (f.t != "auto") cfg.t = std::stod(f.t);
  cfg.alpha = f.alpha;
  cfg.pca_energy = f.pca_energy;
  return cfg;
}

void write_output(const std::string& path, const std::string& contents, std::ostream& out)
{
  if (path.empty() || path == "-") out << contents;
  else write_file_atomic(path, contents);
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

Json report_json(const EvalReport& report, const ExpressionCorpus& corpus, const EmbeddingConfig& cfg, int folds,
                 std::uint64_t seed, bool timing)
{
  Json j;
  j["method"] = std::string(method_name(cfg.method));
  j["folds"] = folds;
  j["seed"] = seed;
  j["accuracy"] = report.accuracy;
  j["correct"] = report.confusion.correct();
  j["total"] = report.confusion.total();
  j["fold_accuracy"] = report.fold_accuracy;
  j["labels"] = corpus.label_names;
  Json rows = Json::array();
  for (int t = 0; t < report.confusion.classes(); ++t)
  {
    Json row = Json::array();
    for (int p = 0; p < report.confusion.classes(); ++p) row.push_back(report.confusion.count(t, p));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  j["fold_assignment"] = report.fold_assignment;
  j["training_rows"] = report.training_rows;
  if (timing) j["timing_ms"] = {{"fit", report.fit_ms}, {"predict", report.predict_ms}};
  return j;
}

int cmd_fit(const ModelFlags& f, const std::string& input, const std::string& out_path, std::ostream& out)
{
  const Dataset data = load_dataset_csv(input);
  const ExpressionCorpus corpus = select_samples(data);
  const EmbeddingModel model = fit(corpus.peaks, corpus.peak_labels, to_config(f));
  save_model(model, out_path);
  out << "fitted " << method_name(model.method) << ": D=" << model.input_dim() << " p=" << model.pca_dim()
      << " d=" << model.output_dim() << " in " << model.fit_time_ms << " ms\n";
  return kExitOk;
}

int cmd_project(const std::string& model_path, const std::string& input, const std::string& out_path,
                const std::string& format)
{
  const EmbeddingModel model = load_model(model_path);
  const Dataset data = load_dataset_csv(input);
  export_projection(model, data, out_path, format == "svg" ? ExportFormat::svg : ExportFormat::csv);
  return kExitOk;
}

int cmd_generate(const std::string& model_path, const std::string& input, const AugmentFlags& a,
                 const std::string& out_path, std::ostream& out)
{
  const EmbeddingModel model = load_model(model_path);
  const Dataset data = load_dataset_csv(input);
  const ExpressionCorpus corpus = select_samples(data, a.xi);
  AugmentOptions options;
  options.use_lows = a.xi.has_value() || (!data.has_sequences() && corpus.lows.rows() > 0);
  options.theta_ne = a.theta_ne;
  options.theta_exp = a.theta_exp;
  options.filter = !a.no_filter;
  AugmentSummary summary;
  const AugmentedTrainingSet set = build_training_set(model, corpus, options, &summary);
  write_file_atomic(out_path, format_projection_csv(set, corpus.label_names));
  out << "rows " << set.size() << " (generated " << summary.generated << ", dropped " << summary.dropped
      << ", subjects without neutral " << summary.skipped_subjects.size() << ")\n";
  return kExitOk;
}

int cmd_eval(const ModelFlags& f, const std::string& input, int folds, bool augment, const AugmentFlags& a,
             const std::string& report_path, bool timing, std::ostream& out)
{
  const Dataset data = load_dataset_csv(input);
  const double xi = a.xi.value_or(0.9);
  const ExpressionCorpus corpus = select_samples(data, augment ? std::optional<double>(xi) : std::nullopt);
  AugmentOptions options;
  if (augment)
  {
    options.use_lows = true;
    options.theta_ne = a.theta_ne.value_or(0.8);
    options.theta_exp = a.theta_exp.value_or(0.8);
    options.filter = !a.no_filter;
  }
  const EmbeddingConfig cfg = to_config(f);
  const EvalReport report = cross_validate(cfg, corpus, folds, f.seed, options);
  out << method_name(cfg.method) << (augment ? "+aug" : "") << " accuracy " << format_real(report.accuracy) << " ("
      << report.confusion.correct() << "/" << report.confusion.total() << "), fit " << report.fit_ms << " ms\n";
  if (!report_path.empty())
    write_file_atomic(report_path, report_json(report, corpus, cfg, folds, f.seed, timing).dump(2) + "\n");
  return kExitOk;
}

int cmd_bench(const ModelFlags& f, const std::string& input, const std::string& methods_list, int repeats,
              const std::string& report_path, std::ostream& out)
{
  std::vector<Method> methods;
  for (const auto& name : split_list(methods_list))
  {
    const auto m = parse_method(name);
    if (!m) throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
    methods.push_back(*m);
  }
  if (methods.empty()) throw CLI::ValidationError("--methods", "no methods given");
  const Dataset data = input.empty() ? synth_blobs() : load_dataset_csv(input);
  const ExpressionCorpus corpus = select_samples(data);
  const auto entries = benchmark_fit_runtime(methods, corpus.peaks, corpus.peak_labels, to_config(f), repeats);
  Json j = Json::array();
  for (const auto& e : entries)
  {
    char line[96];
    std::snprintf(line, sizeof line, "%-6s %10.3f ms (median of %d)\n", std::string(method_name(e.method)).c_str(),
                  e.median_ms, repeats);
    out << line;
    j.push_back({{"method", std::string(method_name(e.method))}, {"median_ms", e.median_ms}, {"samples_ms", e.samples_ms}});
  }
  if (!report_path.empty()) write_file_atomic(report_path, j.dump(2) + "\n");
  return kExitOk;
}

std::pair<int, int> parse_grid(const std::string& grid)
{
  const auto x = grid.find('x');
  int gx = 0, gy = 0;
  const auto ok = [](std::string_view s, int& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && v >= 1;
  };
  if (x == std::string::npos || !ok(std::string_view(grid).substr(0, x), gx) ||
      !ok(std::string_view(grid).substr(x + 1), gy))
    throw CLI::ValidationError("--grid", "expected GXxGY, e.g. 4x3");
  return {gx, gy};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Soft locality preserving map subspace toolkit"};
  app.require_subcommand(1);

  ModelFlags fit_flags;
  std::string fit_input, fit_out;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a subspace model");
  add_model_flags(fit_cmd, fit_flags);
  fit_cmd->add_option("--input", fit_input, "Training CSV")->required();
  fit_cmd->add_option("--out", fit_out, "Model file")->required();

  std::string proj_model, proj_input, proj_out, proj_format = "csv";
  auto* proj_cmd = app.add_subcommand("project", "Project a dataset with a model");
  proj_cmd->add_option("--model", proj_model)->required();
  proj_cmd->add_option("--input", proj_input)->required();
  proj_cmd->add_option("--out", proj_out)->required();
  proj_cmd->add_option("--format", proj_format)->check(CLI::IsMember({"csv", "svg"}))->capture_default_str();

  std::string gen_model, gen_input, gen_out;
  AugmentFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("generate", "Build an augmented training set in the subspace");
  gen_cmd->add_option("--model", gen_model)->required();
  gen_cmd->add_option("--input", gen_input)->required();
  gen_cmd->add_option("--out", gen_out)->required();
  add_augment_flags(gen_cmd, gen_flags);

  ModelFlags eval_flags;
  AugmentFlags eval_aug;
  std::string eval_input, eval_report;
  int eval_folds = 10;
  bool eval_augment = false, eval_timing = false;
  auto* eval_cmd = app.add_subcommand("eval", "Stratified k-fold 1-NN evaluation");
  add_model_flags(eval_cmd, eval_flags);
  eval_cmd->add_option("--input", eval_input)->required();
  eval_cmd->add_option("--folds", eval_folds)->check(CLI::Range(2, 1 << 30))->capture_default_str();
  eval_cmd->add_flag("--augment", eval_augment, "Add low-intensity and generated vectors");
  eval_cmd->add_option("--report", eval_report, "JSON report path");
  eval_cmd->add_flag("--timing", eval_timing, "Include timings in the report");
  add_augment_flags(eval_cmd, eval_aug);

  ModelFlags bench_flags;
  std::string bench_methods = "slpm,mfa,sdm", bench_input, bench_report;
  int bench_repeats = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Median fit runtime per method");
  add_model_flags(bench_cmd, bench_flags, false);
  bench_cmd->add_option("--methods", bench_methods)->capture_default_str();
  bench_cmd->add_option("--repeats", bench_repeats)->check(CLI::Range(3, 1 << 20))->capture_default_str();
  bench_cmd->add_option("--input", bench_input, "Dataset CSV (default: synthetic blobs)");
  bench_cmd->add_option("--report", bench_report, "JSON report path");

  SynthOptions synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate Gaussian blob data");
  synth_cmd->add_option("--classes", synth.classes)->check(CLI::Range(2, 1 << 20))->capture_default_str();
  synth_cmd->add_option("--per-class", synth.per_class)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--spread", synth.spread)->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--separation", synth.separation)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "CSV path (default: stdout)");

  std::string lbp_image, lbp_grid = "4x3", lbp_out;
  auto* lbp_cmd = app.add_subcommand("lbp", "LBP histogram features of a PGM image");
  lbp_cmd->add_option("--image", lbp_image)->required();
  lbp_cmd->add_option("--grid", lbp_grid)->capture_default_str();
  lbp_cmd->add_option("--out", lbp_out, "Output path (default: stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try
  {
    app.parse(rev);
    if (*fit_cmd) return cmd_fit(fit_flags, fit_input, fit_out, out);
    if (*proj_cmd) return cmd_project(proj_model, proj_input, proj_out, proj_format);
    if (*gen_cmd) return cmd_generate(gen_model, gen_input, gen_flags, gen_out, out);
    if (*eval_cmd)
      return cmd_eval(eval_flags, eval_input, eval_folds, eval_augment, eval_aug, eval_report, eval_timing, out);
    if (*bench_cmd) return cmd_bench(bench_flags, bench_input, bench_methods, bench_repeats, bench_report, out);
    if (*synth_cmd)
    {
      write_output(synth_out, format_dataset_csv(synth_blobs(synth)), out);
      return kExitOk;
    }
    if (*lbp_cmd)
    {
      const auto [gx, gy] = parse_grid(lbp_grid);
      std::string line;
      for (double v : lbp_extract_pgm(lbp_image, gx, gy)) line += (line.empty() ? "" : ",") + format_real(v);
      write_output(lbp_out, line + "\n", out);
      return kExitOk;
    }
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e, out, err);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e, out, err);
    return kExitUsage;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

} // namespace slpm::cli
