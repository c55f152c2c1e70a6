#include "slpm/embed.hpp"

#include <chrono>
#include <map>
#include <set>

#include "slpm/error.hpp"

namespace slpm {

namespace {

struct Prepared
{
  PcaModel pca;
  Matrix Z;
};

std::size_t class_count(std::span<const int> labels)
{
  return std::set<int>(labels.begin(), labels.end()).size();
}

Prepared prepare(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg,
                 bool supervised)
{
  if (labels.size() != static_cast<std::size_t>(X.rows()))
    throw DataError("expected one label per sample");
  if (X.rows() < 2) throw DataError("fitting needs at least two samples");
  if (cfg.d < 1) throw DataError("target dimension must be >= 1");
  if (supervised && class_count(labels) < 2)
    throw DataError("between-class graph empty: at least two classes are required");

  Prepared out;
  out.pca = pca_fit(X, PcaOptions{cfg.pca_energy, std::nullopt});
  if (cfg.d > out.pca.basis.cols())
    throw DataError("target dimension " + std::to_string(cfg.d) + " exceeds PCA dimension " +
                    std::to_string(out.pca.basis.cols()));
  out.Z = (X.rowwise() - out.pca.mean.transpose()) * out.pca.basis;
  return out;
}

Matrix quadratic(const Matrix& Z, const SparseMatrix& L)
{
  const Matrix LZ = L * Z;
  return Z.transpose() * LZ;
}

Matrix quadratic_diag(const Matrix& Z, const Vector& diag)
{
  return Z.transpose() * diag.asDiagonal() * Z;
}

EmbeddingModel finish(Method method, Prepared&& prep, Matrix basis, const EmbeddingConfig& cfg)
{
  EmbeddingModel model;
  model.method = method;
  model.pca = std::move(prep.pca);
  model.manifold_basis = std::move(basis);
  model.config = cfg;
  model.config.method = method;
  if (method == Method::mmc) model.config.alpha = 1.0;
  else if (method == Method::sdm || method == Method::lsda) model.config.alpha = resolved_alpha(cfg);
  return model;
}

Matrix leading(const EigResult& eig, int d) { return eig.vectors.leftCols(d); }

// d eigenvectors with the smallest eigenvalues, smallest first.
Matrix trailing(const EigResult& eig, int d)
{
  const Eigen::Index n = eig.vectors.cols();
  Matrix out(eig.vectors.rows(), d);
  for (int c = 0; c < d; ++c) out.col(c) = eig.vectors.col(n - 1 - c);
  return out;
}

void require_rank(const EigResult& eig, int d)
{
  if (eig.vectors.cols() < d)
    throw DataError("constraint matrix rank " + std::to_string(eig.vectors.cols()) +
                    " is below the target dimension " + std::to_string(d));
}

GraphSpec binary_knn(int k, ClassRelation relation)
{
  GraphSpec spec;
  spec.neighborhood = Knn{k};
  spec.relation = relation;
  spec.scheme = WeightScheme::binary;
  return spec;
}

} // namespace

std::string_view method_name(Method method)
{
  switch (method)
  {
    case Method::slpm: return "slpm";
    case Method::sdm: return "sdm";
    case Method::mmc: return "mmc";
    case Method::slpp: return "slpp";
    case Method::mfa: return "mfa";
    case Method::lsda: return "lsda";
    case Method::pca_only: return "pca";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name)
{
  for (Method m : {Method::slpm, Method::sdm, Method::mmc, Method::slpp, Method::mfa, Method::lsda,
                   Method::pca_only})
    if (name == method_name(m)) return m;
  if (name == "pca_only") return Method::pca_only;
  return std::nullopt;
}

double resolved_alpha(const EmbeddingConfig& cfg)
{
  if (cfg.method == Method::mmc) return 1.0;
  if (cfg.alpha) return *cfg.alpha;
  return cfg.method == Method::lsda ? 0.5 : 1.0;
}

EmbeddingModel fit(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  const auto start = std::chrono::steady_clock::now();
  EmbeddingModel model;
  switch (cfg.method)
  {
    case Method::slpm: model = fit_slpm(X, labels, cfg); break;
    case Method::sdm: model = fit_sdm(X, labels, cfg); break;
    case Method::mmc: model = fit_mmc(X, labels, cfg); break;
    case Method::slpp: model = fit_slpp(X, labels, cfg); break;
    case Method::mfa: model = fit_mfa(X, labels, cfg); break;
    case Method::lsda: model = fit_lsda(X, labels, cfg); break;
    case Method::pca_only: model = fit_pca_only(X, labels, cfg); break;
  }
  model.fit_time_ms =
    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return model;
}

std::pair<GraphSpec, GraphSpec> slpm_graph_specs(const EmbeddingConfig& cfg)
{
  GraphSpec within;
  within.neighborhood = Knn{cfg.k_w};
  within.relation = ClassRelation::same;
  within.scheme = WeightScheme::heat;
  within.t = cfg.t;
  GraphSpec between = within;
  between.neighborhood = Knn{cfg.k_b};
  between.relation = ClassRelation::different;
  return {within, between};
}

Matrix slpm_matrix(const Matrix& Z, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  const auto [within_spec, between_spec] = slpm_graph_specs(cfg);
  const Matrix dist2 = pairwise_sq_dist(Z);
  const WeightMatrix Wb = build_weights_from_dist(dist2, labels, between_spec);
  if (Wb.edge_count() == 0) throw DataError("between-class graph empty");
  const WeightMatrix Ww = build_weights_from_dist(dist2, labels, within_spec);
  return quadratic(Z, laplacian(Wb).L) - cfg.beta * quadratic(Z, laplacian(Ww).L);
}

EmbeddingModel fit_slpm(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  if (cfg.beta < 0.0) throw DataError("beta must be >= 0");
  Prepared prep = prepare(X, labels, cfg, true);
  const EigResult eig = sym_eig(slpm_matrix(prep.Z, labels, cfg));
  return finish(Method::slpm, std::move(prep), leading(eig, cfg.d), cfg);
}

EmbeddingModel fit_sdm(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  EmbeddingConfig local = cfg;
  local.method = Method::sdm;
  Prepared prep = prepare(X, labels, local, true);
  const ScatterPair scatter = scatter_matrices(prep.Z, labels);
  const EigResult eig = sym_eig(scatter.between - resolved_alpha(local) * scatter.within);
  return finish(Method::sdm, std::move(prep), leading(eig, local.d), local);
}

EmbeddingModel fit_mmc(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  EmbeddingConfig local = cfg;
  local.method = Method::sdm;
  local.alpha = 1.0;
  EmbeddingModel model = fit_sdm(X, labels, local);
  model.method = Method::mmc;
  model.config.method = Method::mmc;
  return model;
}

EmbeddingModel fit_slpp(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  Prepared prep = prepare(X, labels, cfg, true);
  const WeightMatrix W = build_weights(prep.Z, labels, binary_knn(cfg.k_w, ClassRelation::same));
  const LaplacianPair lap = laplacian(W);
  const EigResult eig = generalized_sym_eig(quadratic(prep.Z, lap.L), quadratic_diag(prep.Z, lap.degree));
  require_rank(eig, cfg.d);
  return finish(Method::slpp, std::move(prep), trailing(eig, cfg.d), cfg);
}

EmbeddingModel fit_mfa(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  Prepared prep = prepare(X, labels, cfg, true);
  const Matrix dist2 = pairwise_sq_dist(prep.Z);
  const WeightMatrix intrinsic = build_weights_from_dist(dist2, labels, binary_knn(cfg.k_w, ClassRelation::same));
  const WeightMatrix penalty = build_weights_from_dist(dist2, labels, binary_knn(cfg.k_b, ClassRelation::different));
  const EigResult eig = generalized_sym_eig(quadratic(prep.Z, laplacian(intrinsic).L),
                                            quadratic(prep.Z, laplacian(penalty).L));
  require_rank(eig, cfg.d);
  return finish(Method::mfa, std::move(prep), trailing(eig, cfg.d), cfg);
}

EmbeddingModel fit_lsda(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  EmbeddingConfig local = cfg;
  local.method = Method::lsda;
  const double alpha = resolved_alpha(local);
  if (alpha < 0.0 || alpha > 1.0) throw DataError("lsda alpha must lie in [0, 1]");
  Prepared prep = prepare(X, labels, local, true);

  // One neighbourhood of k_w + k_b points, split by label afterwards.
  GraphSpec within = binary_knn(cfg.k_w + cfg.k_b, ClassRelation::same);
  within.filter_after_selection = true;
  GraphSpec between = within;
  between.relation = ClassRelation::different;
  const Matrix dist2 = pairwise_sq_dist(prep.Z);
  const WeightMatrix Ww = build_weights_from_dist(dist2, labels, within);
  const WeightMatrix Wb = build_weights_from_dist(dist2, labels, between);
  const LaplacianPair lw = laplacian(Ww);

  const Matrix objective = alpha * quadratic(prep.Z, laplacian(Wb).L) + (1.0 - alpha) * quadratic(prep.Z, Ww.w);
  const EigResult eig = generalized_sym_eig(objective, quadratic_diag(prep.Z, lw.degree));
  require_rank(eig, cfg.d);
  return finish(Method::lsda, std::move(prep), leading(eig, cfg.d), local);
}

EmbeddingModel fit_pca_only(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg)
{
  Prepared prep = prepare(X, labels, cfg, false);
  const Eigen::Index p = prep.pca.basis.cols();
  return finish(Method::pca_only, std::move(prep), Matrix::Identity(p, cfg.d), cfg);
}

Matrix pca_coordinates(const EmbeddingModel& model, const Matrix& X)
{
  if (X.cols() != model.input_dim())
    throw DataError("expected " + std::to_string(model.input_dim()) + " feature columns, got " +
                    std::to_string(X.cols()));
  return (X.rowwise() - model.pca.mean.transpose()) * model.pca.basis;
}

Matrix project(const EmbeddingModel& model, const Matrix& X)
{
  return pca_coordinates(model, X) * model.manifold_basis;
}

ObjectiveValue objective_value(const EmbeddingModel& model, const Matrix& X, std::span<const int> labels)
{
  if (model.method != Method::slpm) throw DataError("objective value is defined for slpm models only");
  if (labels.size() != static_cast<std::size_t>(X.rows()))
    throw DataError("expected one label per sample");

  const Matrix Z = pca_coordinates(model, X);
  const Matrix& A = model.manifold_basis;
  const Matrix Y = Z * A;
  const auto [within_spec, between_spec] = slpm_graph_specs(model.config);
  const Matrix dist2 = pairwise_sq_dist(Z);
  const WeightMatrix Wb = build_weights_from_dist(dist2, labels, between_spec);
  const WeightMatrix Ww = build_weights_from_dist(dist2, labels, within_spec);

  const auto pairwise = [&Y](const WeightMatrix& W) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < W.w.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(W.w, c); it; ++it)
        sum += it.value() * (Y.row(it.row()) - Y.row(it.col())).squaredNorm();
    return 0.5 * sum;
  };

  ObjectiveValue out;
  out.between = (A.transpose() * quadratic(Z, laplacian(Wb).L) * A).trace();
  out.within = (A.transpose() * quadratic(Z, laplacian(Ww).L) * A).trace();
  out.total = out.between - model.config.beta * out.within;
  out.between_pairwise = pairwise(Wb);
  out.within_pairwise = pairwise(Ww);
  out.total_pairwise = out.between_pairwise - model.config.beta * out.within_pairwise;
  return out;
}

ScatterPair scatter_matrices(const Matrix& Z, std::span<const int> labels)
{
  if (labels.size() != static_cast<std::size_t>(Z.rows()))
    throw DataError("expected one label per sample");
  const Eigen::Index p = Z.cols();
  const Vector mu = Z.colwise().mean().transpose();

  std::map<int, std::pair<Vector, int>> classes;
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
  {
    auto [it, inserted] = classes.try_emplace(labels[static_cast<std::size_t>(i)], Vector::Zero(p), 0);
    it->second.first += Z.row(i).transpose();
    ++it->second.second;
  }
  for (auto& [label, acc] : classes) acc.first /= static_cast<double>(acc.second);

  ScatterPair out{Matrix::Zero(p, p), Matrix::Zero(p, p)};
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
  {
    const Vector diff = Z.row(i).transpose() - classes.at(labels[static_cast<std::size_t>(i)]).first;
    out.within.noalias() += diff * diff.transpose();
  }
  for (const auto& [label, acc] : classes)
  {
    const Vector diff = acc.first - mu;
    out.between.noalias() += static_cast<double>(acc.second) * diff * diff.transpose();
  }
  return out;
}

} // namespace slpm
