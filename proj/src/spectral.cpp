#include "speclhs/spectral.hpp"

#include <cmath>

#include "speclhs/errors.hpp"

namespace speclhs {

Eigen::MatrixXd normalized_laplacian(const SimilarityGraph& graph) {
  const int n = graph.n_nodes;
  for (int i = 0; i < n; ++i) {
    if (!(graph.degree[i] > 0.0)) {
      throw IsolatedNode("node " + std::to_string(i) + " has zero degree");
    }
  }
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(graph.degree[i]);

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    lap(i, i) = 1.0;
    for (const auto& [j, w] : graph.adjacency[i]) {
      if (j <= i) continue;  // fill each pair once, mirror exactly
      const double v = -w * inv_sqrt[i] * inv_sqrt[j];
      lap(i, j) = v;
      lap(j, i) = v;
    }
  }
  return lap;
}

SpectralEmbedding embed(const Eigen::MatrixXd& laplacian, int k) {
  const Eigen::Index n = laplacian.rows();
  if (k < 2 || k > n) {
    throw InvalidArgument("embed: K must be in [2, n]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition did not converge");
  }

  SpectralEmbedding emb;
  emb.eigenvalues = solver.eigenvalues().head(k);
  emb.eigenvectors = solver.eigenvectors().leftCols(k);
  emb.coords = emb.eigenvectors;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = emb.coords.row(i).norm();
    if (norm < 1e-15) {
      emb.zero_rows.push_back(static_cast<int>(i));
      continue;
    }
    emb.coords.row(i) /= norm;
  }
  return emb;
}

}  // namespace speclhs
