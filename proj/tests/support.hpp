#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "speclhs/graph.hpp"

namespace testsupport {

struct LabeledPoints {
  Eigen::MatrixXd points;
  std::vector<int> labels;
};

// k Gaussian blobs centered on scaled hypercube corners (needs k <= 2^d).
LabeledPoints make_blobs(const std::vector<int>& sizes, int d, double sep,
                         double sigma, std::uint64_t seed);
LabeledPoints make_blobs(int k, int per, int d, double sep, double sigma,
                         std::uint64_t seed);

// Two concentric rings in 2-D, angles stratified per ring.
LabeledPoints make_rings(int per_ring, double r_inner, double r_outer,
                         double noise, std::uint64_t seed);

double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b);

// Validity metric oracles implemented as direct double loops over the
// definitions, sharing nothing with the library's implementations.
double silhouette_oracle(const Eigen::MatrixXd& points,
                         const std::vector<int>& labels);
double calinski_harabasz_oracle(const Eigen::MatrixXd& points,
                                const std::vector<int>& labels);

// Naive cLHS objective (continuous covariates, unit weights): recomputes
// quantile edges from scratch and scans strata linearly.
double clhs_objective_oracle(const Eigen::MatrixXd& candidates, int n,
                             const std::vector<int>& selected);

// Visits every n-subset of {0..n_c-1} in lexicographic order.
void for_each_subset(int n_c, int n,
                     const std::function<void(const std::vector<int>&)>& fn);

// Erdos-Renyi weighted graph; isolated nodes are re-wired to a random
// neighbor so the normalized Laplacian is defined.
speclhs::SimilarityGraph random_graph(int n, double p, std::uint64_t seed);

// BFS connected-component count, independent of any spectral machinery.
int component_count(const speclhs::SimilarityGraph& graph);

// Minimal XML well-formedness scan: balanced tags, quoted attributes.
bool xml_well_formed(const std::string& text);
int count_open_tags(const std::string& text, const std::string& tag);
std::string read_file(const std::string& path);

}  // namespace testsupport
