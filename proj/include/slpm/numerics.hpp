#pragma once

#include <optional>

#include <Eigen/Dense>

namespace slpm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigen-pairs sorted by descending eigenvalue. For generalized problems the
/// columns are B-orthonormal instead of orthonormal.
struct EigResult
{
  Vector values;
  Matrix vectors;
};

/// Mean and orthonormal principal directions (D x p) of a sample-major matrix.
struct PcaModel
{
  Vector mean;
  Matrix basis;
  /// Fraction of total variance explained by `basis`. NaN when unknown,
  /// e.g. for a model restored from disk.
  double energy_kept = 0.0;
};

struct PcaOptions
{
  double energy = 0.98;
  /// Fixed component count; overrides `energy` when set.
  std::optional<int> components;
};

/// m x m matrix of squared Euclidean distances between the rows of X, via the
/// Gram matrix and clamped at zero. Each unordered pair is computed once, so
/// the result is exactly symmetric.
Matrix pairwise_sq_dist(const Matrix& X);

/// Full spectrum of a symmetric matrix. Input is symmetrized first.
/// Throws DataError on non-finite input.
EigResult sym_eig(const Matrix& S);

/// Solves S v = lambda B v by whitening B. Directions of B whose eigenvalue
/// falls below 1e-10 * max eigenvalue are discarded, so the result holds
/// rank(B) pairs.
EigResult generalized_sym_eig(const Matrix& S, const Matrix& B);

PcaModel pca_fit(const Matrix& X, const PcaOptions& options = {});

/// Flips the sign of every column so its largest-magnitude entry is positive.
void fix_signs(Matrix& vectors);

} // namespace slpm
