#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "slpm/graph.hpp"
#include "slpm/numerics.hpp"

namespace slpm {

enum class Method { slpm, sdm, mmc, slpp, mfa, lsda, pca_only };

std::string_view method_name(Method method);
/// Accepts the CLI spellings; "pca" is an alias of pca_only.
std::optional<Method> parse_method(std::string_view name);

struct EmbeddingConfig
{
  Method method = Method::slpm;
  int d = 11;
  /// Within-class spread weight of SLPM.
  double beta = 1.0;
  /// SDM softening or LSDA trade-off; nullopt means the method default
  /// (1 for sdm, 0.5 for lsda).
  std::optional<double> alpha;
  int k_w = 5;
  int k_b = 5;
  /// Heat-kernel width; nullopt selects it per graph from its edges.
  std::optional<double> t;
  double pca_energy = 0.98;
};

double resolved_alpha(const EmbeddingConfig& cfg);

/// Two-stage linear map: x -> basis_mL^T basis_pca^T (x - mean).
struct EmbeddingModel
{
  Method method = Method::slpm;
  PcaModel pca;
  /// p x d; columns are the selected eigenvectors.
  Matrix manifold_basis;
  EmbeddingConfig config;
  double fit_time_ms = 0.0;

  Eigen::Index input_dim() const { return pca.mean.size(); }
  Eigen::Index pca_dim() const { return pca.basis.cols(); }
  Eigen::Index output_dim() const { return manifold_basis.cols(); }
};

struct ScatterPair
{
  Matrix within;
  Matrix between;
};

struct ObjectiveValue
{
  double between = 0.0;  // trace(A^T Z^T L_b Z A)
  double within = 0.0;   // trace(A^T Z^T L_w Z A)
  double total = 0.0;    // between - beta * within
  double between_pairwise = 0.0;  // 1/2 sum w^b_ij |y_i - y_j|^2
  double within_pairwise = 0.0;
  double total_pairwise = 0.0;
};

/// Dispatches on cfg.method and records the wall time of the fit.
EmbeddingModel fit(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);

EmbeddingModel fit_slpm(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
EmbeddingModel fit_sdm(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
/// SDM with alpha fixed to 1.
EmbeddingModel fit_mmc(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
EmbeddingModel fit_slpp(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
EmbeddingModel fit_mfa(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
EmbeddingModel fit_lsda(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);
EmbeddingModel fit_pca_only(const Matrix& X, std::span<const int> labels, const EmbeddingConfig& cfg);

/// Maps rows of X (m x D) to the subspace (m x d).
Matrix project(const EmbeddingModel& model, const Matrix& X);

/// Centered PCA coordinates (m x p) of X under the model.
Matrix pca_coordinates(const EmbeddingModel& model, const Matrix& X);

/// Within and between graph specifications SLPM uses for a config.
std::pair<GraphSpec, GraphSpec> slpm_graph_specs(const EmbeddingConfig& cfg);

/// Z^T (L_b - beta L_w) Z for sample-major PCA coordinates Z.
Matrix slpm_matrix(const Matrix& Z, std::span<const int> labels, const EmbeddingConfig& cfg);

/// SLPM objective terms for a fitted SLPM model on its training data.
ObjectiveValue objective_value(const EmbeddingModel& model, const Matrix& X, std::span<const int> labels);

/// LDA-style scatter of sample-major Z.
ScatterPair scatter_matrices(const Matrix& Z, std::span<const int> labels);

} // namespace slpm
