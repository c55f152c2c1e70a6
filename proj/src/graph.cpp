#include "slpm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "slpm/error.hpp"

namespace slpm {

namespace {

bool related(ClassRelation relation, std::span<const int> labels, int i, int j)
{
  switch (relation)
  {
    case ClassRelation::same: return labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
    case ClassRelation::different: return labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)];
    case ClassRelation::any: return true;
  }
  return false;
}

void validate(const Matrix& X, std::span<const int> labels, const GraphSpec& spec)
{
  if (spec.relation != ClassRelation::any && labels.size() != static_cast<std::size_t>(X.rows()))
    throw DataError("graph construction needs one label per sample");
  if (const auto* knn = std::get_if<Knn>(&spec.neighborhood); knn && knn->k < 1)
    throw DataError("knn neighbourhood needs k >= 1");
  if (const auto* ball = std::get_if<EpsBall>(&spec.neighborhood); ball && !(ball->eps > 0.0))
    throw DataError("eps-ball neighbourhood needs eps > 0");
  if (spec.scheme == WeightScheme::heat && spec.t && !(*spec.t > 0.0))
    throw DataError("heat kernel needs t > 0");
}

// Directed neighbourhood of every sample, before OR-symmetrization.
std::vector<std::vector<int>> neighbourhoods(const Matrix& dist2, std::span<const int> labels,
                                             const GraphSpec& spec)
{
  const int m = static_cast<int>(dist2.rows());
  std::vector<std::vector<int>> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
  {
    auto& nb = out[static_cast<std::size_t>(i)];
    if (const auto* knn = std::get_if<Knn>(&spec.neighborhood))
    {
      if (spec.filter_after_selection)
      {
        for (int j : neighbor_set(dist2, labels, i, knn->k, ClassRelation::any))
          if (related(spec.relation, labels, i, j)) nb.push_back(j);
      }
      else
        nb = neighbor_set(dist2, labels, i, knn->k, spec.relation);
    }
    else if (const auto* ball = std::get_if<EpsBall>(&spec.neighborhood))
    {
      for (int j : eps_ball(dist2, i, ball->eps))
        if (related(spec.relation, labels, i, j)) nb.push_back(j);
    }
    else
    {
      for (int j = 0; j < m; ++j)
        if (j != i && related(spec.relation, labels, i, j)) nb.push_back(j);
    }
  }
  return out;
}

// Upper-triangle edge list (i < j) of the OR-symmetrized graph, sorted.
std::vector<std::pair<int, int>> edge_list(const Matrix& dist2, std::span<const int> labels,
                                           const GraphSpec& spec)
{
  std::vector<std::pair<int, int>> edges;
  const auto nbs = neighbourhoods(dist2, labels, spec);
  for (std::size_t i = 0; i < nbs.size(); ++i)
    for (int j : nbs[i])
    {
      const int a = std::min(static_cast<int>(i), j);
      const int b = std::max(static_cast<int>(i), j);
      edges.emplace_back(a, b);
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double mean_edge_distance(const Matrix& dist2, const std::vector<std::pair<int, int>>& edges)
{
  if (edges.empty()) throw DataError("cannot choose heat-kernel t: graph has no edges");
  double sum = 0.0;
  for (const auto& [i, j] : edges) sum += dist2(i, j);
  const double t = sum / static_cast<double>(edges.size());
  if (!(t > 0.0)) throw DataError("cannot choose heat-kernel t: all connected samples coincide");
  return t;
}

} // namespace

std::vector<int> neighbor_set(const Matrix& dist2, std::span<const int> labels, int i, int k,
                              ClassRelation relation)
{
  const int m = static_cast<int>(dist2.rows());
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    if (j != i && related(relation, labels, i, j)) candidates.push_back(j);

  const auto closer = [&](int a, int b) {
    const double da = dist2(i, a);
    const double db = dist2(i, b);
    return da < db || (da == db && a < b);
  };
  const std::size_t take = std::min(candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), closer);
  candidates.resize(take);
  return candidates;
}

std::vector<int> eps_ball(const Matrix& dist2, int i, double eps)
{
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(dist2.rows()); ++j)
    if (j != i && dist2(i, j) < eps) out.push_back(j);
  return out;
}

double auto_t(const Matrix& X, std::span<const int> labels, const GraphSpec& spec)
{
  validate(X, labels, spec);
  const Matrix dist2 = pairwise_sq_dist(X);
  return mean_edge_distance(dist2, edge_list(dist2, labels, spec));
}

WeightMatrix build_weights(const Matrix& X, std::span<const int> labels, const GraphSpec& spec)
{
  validate(X, labels, spec);
  return build_weights_from_dist(pairwise_sq_dist(X), labels, spec);
}

WeightMatrix build_weights_from_dist(const Matrix& dist2, std::span<const int> labels, const GraphSpec& spec)
{
  if (dist2.rows() != dist2.cols()) throw DataError("distance matrix must be square");
  validate(dist2, labels, spec);
  const auto edges = edge_list(dist2, labels, spec);

  double t = 1.0;
  if (spec.scheme == WeightScheme::heat && !edges.empty())
    t = spec.t ? *spec.t : mean_edge_distance(dist2, edges);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& [i, j] : edges)
  {
    const double w = spec.scheme == WeightScheme::heat ? heat_weight(dist2(i, j), t) : 1.0;
    triplets.emplace_back(i, j, w);
    triplets.emplace_back(j, i, w);
  }
  WeightMatrix out;
  out.w.resize(dist2.rows(), dist2.rows());
  out.w.setFromTriplets(triplets.begin(), triplets.end());
  out.w.makeCompressed();
  return out;
}

LaplacianPair laplacian(const WeightMatrix& W)
{
  const Eigen::Index m = W.order();
  LaplacianPair out;
  out.degree = Vector::Zero(m);
  for (Eigen::Index c = 0; c < W.w.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(W.w, c); it; ++it) out.degree(it.row()) += it.value();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(W.w.nonZeros() + m));
  for (Eigen::Index i = 0; i < m; ++i) triplets.emplace_back(i, i, out.degree(i));
  for (Eigen::Index c = 0; c < W.w.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(W.w, c); it; ++it)
      triplets.emplace_back(it.row(), it.col(), -it.value());
  out.L.resize(m, m);
  out.L.setFromTriplets(triplets.begin(), triplets.end());
  out.L.makeCompressed();
  return out;
}

} // namespace slpm
