#include "slpm/model_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "slpm/dataset.hpp"
#include "slpm/error.hpp"

namespace slpm {

namespace {

constexpr std::string_view kMagic = "SLPM-MODEL v1";

void put_row(std::string& out, std::string_view key, const Eigen::Ref<const Eigen::RowVectorXd>& row)
{
  out += key;
  for (Eigen::Index i = 0; i < row.size(); ++i)
  {
    if (!key.empty() || i) out += ' ';
    out += format_real(row(i));
  }
  out += '\n';
}

class Reader
{
public:
  explicit Reader(const std::string& text)
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
    {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      mLines.push_back(line);
    }
  }

  std::size_t line_no() const { return mNext; }

  const std::string& next()
  {
    if (mNext >= mLines.size()) throw ParseError("truncated model file", mNext + 1);
    return mLines[mNext++];
  }

  std::vector<std::string> tokens()
  {
    std::istringstream in(next());
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
  }

  // "key value..." with an exact token count.
  std::vector<std::string> keyed(std::string_view key, std::size_t values)
  {
    auto toks = tokens();
    if (toks.empty() || toks.front() != key) throw ParseError("expected '" + std::string(key) + "'", mNext);
    if (toks.size() != values + 1)
      throw ParseError("'" + std::string(key) + "' expects " + std::to_string(values) + " values", mNext);
    toks.erase(toks.begin());
    return toks;
  }

  double real(const std::string& tok)
  {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError("malformed real '" + tok + "'", mNext);
    return v;
  }

  long integer(const std::string& tok)
  {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("malformed integer '" + tok + "'", mNext);
    return v;
  }

  Matrix block(std::string_view key, Eigen::Index rows, Eigen::Index cols)
  {
    keyed(key, 0);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      const auto toks = tokens();
      if (toks.size() != static_cast<std::size_t>(cols))
        throw ParseError("expected " + std::to_string(cols) + " values in " + std::string(key) + " row", mNext);
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = real(toks[static_cast<std::size_t>(c)]);
    }
    return out;
  }

private:
  std::vector<std::string> mLines;
  std::size_t mNext = 0;
};

} // namespace

std::string format_model(const EmbeddingModel& model)
{
  const auto& cfg = model.config;
  std::string out;
  out += kMagic;
  out += '\n';
  out += "method " + std::string(method_name(model.method)) + '\n';
  out += "dims " + std::to_string(model.input_dim()) + ' ' + std::to_string(model.pca_dim()) + ' ' +
         std::to_string(model.output_dim()) + '\n';
  out += "beta " + format_real(cfg.beta) + '\n';
  out += "kw " + std::to_string(cfg.k_w) + '\n';
  out += "kb " + std::to_string(cfg.k_b) + '\n';
  out += "t " + (cfg.t ? format_real(*cfg.t) : std::string("auto")) + '\n';
  out += "alpha " + format_real(resolved_alpha(cfg)) + '\n';
  out += "energy " + format_real(cfg.pca_energy) + '\n';
  put_row(out, "mean", model.pca.mean.transpose());
  out += "pca_basis\n";
  for (Eigen::Index r = 0; r < model.pca.basis.rows(); ++r) put_row(out, "", model.pca.basis.row(r));
  out += "manifold_basis\n";
  for (Eigen::Index r = 0; r < model.manifold_basis.rows(); ++r) put_row(out, "", model.manifold_basis.row(r));
  out += "end\n";
  return out;
}

EmbeddingModel parse_model(const std::string& text)
{
  Reader in(text);
  const std::string& magic = in.next();
  if (magic != kMagic)
  {
    if (magic.rfind("SLPM-MODEL ", 0) == 0) throw ParseError("unsupported model version '" + magic + "'", 1);
    throw ParseError("not a model file (bad magic)", 1);
  }

  EmbeddingModel model;
  const auto method = parse_method(in.keyed("method", 1)[0]);
  if (!method) throw ParseError("unknown method", in.line_no());
  model.method = *method;
  model.config.method = *method;

  const auto dims = in.keyed("dims", 3);
  const long D = in.integer(dims[0]);
  const long p = in.integer(dims[1]);
  const long d = in.integer(dims[2]);
  if (D < 1 || p < 1 || d < 1 || p > D || d > p) throw ParseError("inconsistent dims", in.line_no());

  model.config.beta = in.real(in.keyed("beta", 1)[0]);
  model.config.k_w = static_cast<int>(in.integer(in.keyed("kw", 1)[0]));
  model.config.k_b = static_cast<int>(in.integer(in.keyed("kb", 1)[0]));
  const auto t = in.keyed("t", 1)[0];
  if (t != "auto") model.config.t = in.real(t);
  model.config.alpha = in.real(in.keyed("alpha", 1)[0]);
  model.config.pca_energy = in.real(in.keyed("energy", 1)[0]);
  model.config.d = static_cast<int>(d);

  const auto mean = in.keyed("mean", static_cast<std::size_t>(D));
  model.pca.mean.resize(D);
  for (long i = 0; i < D; ++i) model.pca.mean(i) = in.real(mean[static_cast<std::size_t>(i)]);
  model.pca.basis = in.block("pca_basis", D, p);
  model.pca.energy_kept = std::numeric_limits<double>::quiet_NaN();
  model.manifold_basis = in.block("manifold_basis", p, d);
  in.keyed("end", 0);
  return model;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path)
{
  write_file_atomic(path, format_model(model));
}

EmbeddingModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

} // namespace slpm
