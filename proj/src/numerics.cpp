#include "slpm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "slpm/error.hpp"

namespace slpm {

namespace {

Eigen::Index pivot_index(const Eigen::Ref<const Vector>& v)
{
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  return best;
}

// Eigen-pairs descending; within a cluster of eigenvalues tied to 1e-10 the
// vectors are ordered by the row of their largest-magnitude entry.
EigResult sort_descending(const Vector& values, Matrix vectors, double scale)
{
  fix_signs(vectors);
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  const double tie = 1e-10 * std::max(scale, 1.0);
  std::size_t start = 0;
  while (start < order.size())
  {
    std::size_t end = start + 1;
    while (end < order.size() && values(order[end - 1]) - values(order[end]) <= tie) ++end;
    if (end - start > 1)
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return pivot_index(vectors.col(a)) < pivot_index(vectors.col(b));
                       });
    start = end;
  }

  EigResult out;
  out.values.resize(n);
  out.vectors.resize(vectors.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    out.values(i) = values(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

void require_square_finite(const Matrix& S, const char* name)
{
  if (S.rows() != S.cols())
    throw DataError(std::string(name) + " must be square");
  if (!S.allFinite())
    throw DataError(std::string(name) + " has non-finite entries");
}

} // namespace

void fix_signs(Matrix& vectors)
{
  for (Eigen::Index c = 0; c < vectors.cols(); ++c)
  {
    const Eigen::Index p = pivot_index(vectors.col(c));
    if (vectors(p, c) < 0) vectors.col(c) *= -1.0;
  }
}

Matrix pairwise_sq_dist(const Matrix& X)
{
  const Eigen::Index m = X.rows();
  Matrix gram = Matrix::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X);
  const Vector norms = gram.diagonal();
  Matrix out = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = j + 1; i < m; ++i)
    {
      const double d2 = std::max(0.0, norms(i) + norms(j) - 2.0 * gram(i, j));
      out(i, j) = d2;
      out(j, i) = d2;
    }
  return out;
}

EigResult sym_eig(const Matrix& S)
{
  require_square_finite(S, "matrix");
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw DataError("symmetric eigensolver failed to converge");
  const double scale = sym.cwiseAbs().maxCoeff();
  return sort_descending(solver.eigenvalues(), solver.eigenvectors(), scale);
}

EigResult generalized_sym_eig(const Matrix& S, const Matrix& B)
{
  require_square_finite(S, "matrix");
  require_square_finite(B, "constraint matrix");
  if (S.rows() != B.rows())
    throw DataError("generalized eigenproblem: dimension mismatch");

  const Matrix bsym = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> bsolver(bsym);
  if (bsolver.info() != Eigen::Success)
    throw DataError("constraint eigensolver failed to converge");
  const Vector& sigma = bsolver.eigenvalues();
  const double top = sigma.maxCoeff();
  if (!(top > 0.0))
    throw DataError("constraint matrix is entirely singular");

  const double floor = 1e-10 * top;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > floor) kept.push_back(i);

  // Whitening map: columns U_i / sqrt(sigma_i) over the kept range of B.
  Matrix whiten(B.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    whiten.col(static_cast<Eigen::Index>(c)) =
      bsolver.eigenvectors().col(kept[c]) / std::sqrt(sigma(kept[c]));

  const Matrix ssym = 0.5 * (S + S.transpose());
  Matrix reduced = whiten.transpose() * ssym * whiten;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(reduced);
  if (solver.info() != Eigen::Success)
    throw DataError("generalized eigensolver failed to converge");

  const Matrix mapped = whiten * solver.eigenvectors();
  const double scale = reduced.size() ? reduced.cwiseAbs().maxCoeff() : 0.0;
  return sort_descending(solver.eigenvalues(), mapped, scale);
}

PcaModel pca_fit(const Matrix& X, const PcaOptions& options)
{
  const Eigen::Index m = X.rows();
  const Eigen::Index D = X.cols();
  if (m < 2) throw DataError("PCA needs at least two samples");
  if (D < 1) throw DataError("PCA needs at least one feature");
  if (!X.allFinite()) throw DataError("data has non-finite entries");

  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector variance = svd.singularValues().array().square();
  const double total = variance.sum();
  if (!(total > 0.0)) throw DataError("degenerate dataset: zero total variance");

  const Eigen::Index cap = std::min<Eigen::Index>(m - 1, D);
  Eigen::Index p = 0;
  if (options.components)
  {
    if (*options.components < 1) throw DataError("PCA component count must be >= 1");
    p = std::min<Eigen::Index>(*options.components, cap);
  }
  else
  {
    if (!(options.energy > 0.0 && options.energy <= 1.0))
      throw DataError("PCA energy must lie in (0, 1]");
    double acc = 0.0;
    while (p < cap)
    {
      acc += variance(p);
      ++p;
      if (acc >= (options.energy - 1e-12) * total) break;
    }
  }

  model.basis = svd.matrixV().leftCols(p);
  fix_signs(model.basis);
  model.energy_kept = variance.head(p).sum() / total;
  return model;
}

} // namespace slpm
