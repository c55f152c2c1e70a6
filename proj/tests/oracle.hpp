#pragma once

// Dense brute-force reference implementations used to check the library.

#include <algorithm>
#include <optional>
#include <vector>

#include "slpm/numerics.hpp"

namespace slpm::oracle {

enum class Rel { same, different, any };

inline bool admits(Rel r, int a, int b)
{
  return r == Rel::any || (r == Rel::same) == (a == b);
}

inline double sqd(const Matrix& Z, int i, int j) { return (Z.row(i) - Z.row(j)).squaredNorm(); }

/// Dense OR-symmetrized kNN affinity. With `pooled` the k nearest are taken
/// over all samples and then restricted to `rel`. t = nullopt means the mean
/// squared distance over the graph's unordered edges; heat = false gives 0/1.
inline Matrix knn_weights(const Matrix& Z, const std::vector<int>& y, int k, Rel rel, bool heat,
                          std::optional<double> t = std::nullopt, bool pooled = false)
{
  const int m = static_cast<int>(Z.rows());
  Matrix adj = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
  {
    std::vector<std::pair<double, int>> c;
    for (int j = 0; j < m; ++j)
      if (j != i && (pooled || admits(rel, y[i], y[j]))) c.emplace_back(sqd(Z, i, j), j);
    std::sort(c.begin(), c.end());
    for (int n = 0; n < k && n < static_cast<int>(c.size()); ++n)
    {
      const int j = c[n].second;
      if (pooled && !admits(rel, y[i], y[j])) continue;
      adj(i, j) = adj(j, i) = 1.0;
    }
  }
  if (!heat) return adj;
  double tt = 0.0;
  if (t) tt = *t;
  else
  {
    double sum = 0.0;
    int edges = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (adj(i, j) != 0.0)
        {
          sum += sqd(Z, i, j);
          ++edges;
        }
    tt = edges ? sum / edges : 1.0;
  }
  Matrix W = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (adj(i, j) != 0.0) W(i, j) = std::exp(-sqd(Z, i, j) / tt);
  return W;
}

inline Matrix laplacian(const Matrix& W)
{
  Matrix L = -W;
  L.diagonal() += W.rowwise().sum();
  return L;
}

/// 1/2 sum_ij W_ij |y_i - y_j|^2 for the rows of Y.
inline double pairwise_energy(const Matrix& W, const Matrix& Y)
{
  double s = 0.0;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      if (W(i, j) != 0.0) s += W(i, j) * (Y.row(i) - Y.row(j)).squaredNorm();
  return 0.5 * s;
}

/// Heat-weighted within (same-class kNN) and between (different-class kNN) graphs.
inline std::pair<Matrix, Matrix> slpm_weights(const Matrix& Z, const std::vector<int>& y, int kw, int kb,
                                              std::optional<double> t = std::nullopt)
{
  return {knn_weights(Z, y, kw, Rel::same, true, t), knn_weights(Z, y, kb, Rel::different, true, t)};
}

inline Matrix slpm_matrix(const Matrix& Z, const std::vector<int>& y, int kw, int kb, double beta,
                          std::optional<double> t = std::nullopt)
{
  const auto [Ww, Wb] = slpm_weights(Z, y, kw, kb, t);
  return Z.transpose() * (laplacian(Wb) - beta * laplacian(Ww)) * Z;
}

/// Summing over the pairs gives the class scatter matrices directly.
inline std::pair<Matrix, Matrix> scatter(const Matrix& Z, const std::vector<int>& y)
{
  const int m = static_cast<int>(Z.rows());
  const Eigen::Index p = Z.cols();
  Matrix Sw = Matrix::Zero(p, p), St = Matrix::Zero(p, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
    {
      const Vector diff = (Z.row(i) - Z.row(j)).transpose();
      St += diff * diff.transpose() / (2.0 * m);
      if (y[i] == y[j])
      {
        const int n = static_cast<int>(std::count(y.begin(), y.end(), y[i]));
        Sw += diff * diff.transpose() / (2.0 * n);
      }
    }
  return {Sw, St - Sw};
}

/// Nearest-centroid rule: keep v when its own class centroid is no farther than any other.
inline bool nearest_centroid_keeps(const Vector& v, int label, const std::vector<Vector>& centroids)
{
  const double own = (v - centroids[label]).squaredNorm();
  for (std::size_t c = 0; c < centroids.size(); ++c)
    if ((v - centroids[c]).squaredNorm() < own) return false;
  return true;
}

} // namespace slpm::oracle
