#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "slpm/numerics.hpp"

namespace slpm {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ClassRelation { same, different, any };
enum class WeightScheme { binary, heat };

struct Knn { int k = 5; };
struct EpsBall { double eps = 1.0; };
struct ClassOnly {};

using Neighborhood = std::variant<Knn, EpsBall, ClassOnly>;

/// How to connect samples and weight the resulting edges.
///
/// By default `relation` restricts the candidate pool before the k nearest
/// are chosen (k same-class neighbours). With `filter_after_selection` the k
/// nearest are taken among all samples and only then split by class, which is
/// the LSDA construction.
struct GraphSpec
{
  Neighborhood neighborhood = Knn{};
  ClassRelation relation = ClassRelation::any;
  WeightScheme scheme = WeightScheme::binary;
  /// Heat-kernel width; nullopt selects it from the edge set (auto_t).
  std::optional<double> t;
  bool filter_after_selection = false;
};

/// Symmetric, zero-diagonal affinity matrix.
struct WeightMatrix
{
  SparseMatrix w;

  Eigen::Index order() const { return w.rows(); }
  Eigen::Index edge_count() const { return w.nonZeros() / 2; }
  Matrix dense() const { return Matrix(w); }
};

/// L = diag(degree) - W.
struct LaplacianPair
{
  SparseMatrix L;
  Vector degree;
};

/// The k indices j != i closest to i among those satisfying `relation`,
/// ties broken by smaller index. Returns every candidate when fewer than k exist.
/// `dist2` is the pairwise squared-distance matrix.
std::vector<int> neighbor_set(const Matrix& dist2, std::span<const int> labels, int i, int k,
                              ClassRelation relation);

/// { j != i : dist2(i, j) < eps }, ascending.
std::vector<int> eps_ball(const Matrix& dist2, int i, double eps);

inline double heat_weight(double d2, double t) { return std::exp(-d2 / t); }

/// Mean squared distance over the (unordered) edges `spec` would create.
/// Throws DataError when there are no edges or the mean is zero.
double auto_t(const Matrix& X, std::span<const int> labels, const GraphSpec& spec);

WeightMatrix build_weights(const Matrix& X, std::span<const int> labels, const GraphSpec& spec);

/// Same as build_weights, from a precomputed pairwise_sq_dist matrix.
WeightMatrix build_weights_from_dist(const Matrix& dist2, std::span<const int> labels, const GraphSpec& spec);

LaplacianPair laplacian(const WeightMatrix& W);

} // namespace slpm
