#pragma once

#include <Eigen/Dense>
#include <vector>

#include "speclhs/graph.hpp"

namespace speclhs {

/// L = I - D^{-1/2} W D^{-1/2}, dense and exactly symmetric.
/// Throws IsolatedNode if any degree is zero.
Eigen::MatrixXd normalized_laplacian(const SimilarityGraph& graph);

/// Rows of the K leading (smallest-eigenvalue) eigenvectors, renormalized
/// to unit length. zero_rows lists rows whose eigencoordinates were all
/// zero and were left unnormalized.
struct SpectralEmbedding {
  Eigen::MatrixXd coords;       // n x K, unit-norm rows
  Eigen::MatrixXd eigenvectors; // n x K, the raw eigenvector columns
  Eigen::VectorXd eigenvalues;  // K smallest, ascending
  std::vector<int> zero_rows;
};

SpectralEmbedding embed(const Eigen::MatrixXd& laplacian, int k);

}  // namespace speclhs
