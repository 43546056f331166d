#include "speclhs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "speclhs/clhs.hpp"
#include "speclhs/errors.hpp"

namespace speclhs {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string f2(double v) { return fmt("%.2f", v); }
std::string f17(double v) { return fmt("%.17g", v); }

}  // namespace

PCAProjection pca(const Eigen::MatrixXd& values, int d) {
  const int n = static_cast<int>(values.rows());
  const int dim = static_cast<int>(values.cols());
  if (n < 2) throw InvalidArgument("pca: need at least two rows");
  if (d < 1 || d > dim) {
    throw InvalidArgument("pca: d must be in [1, D]");
  }

  const Eigen::RowVectorXd mean = values.colwise().mean();
  const Eigen::MatrixXd centered = values.rowwise() - mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("pca: eigendecomposition did not converge");
  }
  const Eigen::VectorXd evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  double total = 0.0;
  for (int i = 0; i < dim; ++i) total += std::max(0.0, evals(i));
  const double tol = std::max(1e-12, 1e-12 * evals(dim - 1));
  int rank = 0;
  for (int i = 0; i < dim; ++i) {
    if (evals(i) > tol) ++rank;
  }

  PCAProjection proj;
  const int kept = std::min(d, rank);
  proj.degenerate = kept < d;
  proj.components.resize(dim, kept);
  proj.explained_variance_ratio.resize(kept);
  for (int c = 0; c < kept; ++c) {
    Eigen::VectorXd v = evecs.col(dim - 1 - c);
    int arg = 0;
    for (int i = 1; i < dim; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0.0) v = -v;
    proj.components.col(c) = v;
    proj.explained_variance_ratio[c] =
        total > 0.0 ? std::max(0.0, evals(dim - 1 - c)) / total : 0.0;
  }
  proj.scores = centered * proj.components;
  return proj;
}

CoverageSummary summarize(const std::vector<int>& selected,
                          const ClusterModel& model,
                          const FeatureMatrix& features,
                          const std::string& design_tag) {
  if (static_cast<int>(model.labels.size()) != features.n()) {
    throw MismatchedContext("cluster model does not match feature matrix");
  }
  CoverageSummary s;
  s.design_tag = design_tag;
  s.k = model.k;
  s.n = static_cast<int>(selected.size());
  s.covariate_names = features.covariate_names;
  s.per_cluster_counts.assign(model.k, 0);
  for (int idx : selected) {
    if (idx < 0 || idx >= features.n()) {
      throw InvalidArgument("summarize: design index out of range");
    }
    ++s.per_cluster_counts[model.labels[idx]];
  }
  int covered = 0;
  for (int c : s.per_cluster_counts) {
    if (c > 0) ++covered;
  }
  s.clusters_covered_fraction =
      model.k > 0 ? static_cast<double>(covered) / model.k : 0.0;

  s.per_covariate_stratum_occupancy.assign(features.d(), 0.0);
  if (s.n > 0) {
    const Eigen::MatrixXd edges = quantile_strata(features.values, s.n);
    std::vector<char> hit(s.n);
    for (int j = 0; j < features.d(); ++j) {
      std::fill(hit.begin(), hit.end(), 0);
      for (int idx : selected) {
        hit[stratum_of(edges, j, s.n, features.values(idx, j))] = 1;
      }
      const int occupied =
          static_cast<int>(std::count(hit.begin(), hit.end(), 1));
      s.per_covariate_stratum_occupancy[j] =
          static_cast<double>(occupied) / s.n;
    }
  }
  return s;
}

ComparisonTable compare(const CoverageSummary& first,
                        const CoverageSummary& second) {
  if (first.k != second.k || first.n != second.n) {
    throw MismatchedContext("summaries differ in K or n");
  }
  ComparisonTable t;
  t.first_tag = first.design_tag;
  t.second_tag = second.design_tag;
  for (int c = 0; c < first.k; ++c) {
    const double a = first.per_cluster_counts[c];
    const double b = second.per_cluster_counts[c];
    t.rows.push_back({"cluster_" + std::to_string(c) + "_count", a, b, b - a});
  }
  t.rows.push_back({"clusters_covered_fraction",
                    first.clusters_covered_fraction,
                    second.clusters_covered_fraction,
                    second.clusters_covered_fraction -
                        first.clusters_covered_fraction});
  auto mean_occ = [](const CoverageSummary& s) {
    if (s.per_covariate_stratum_occupancy.empty()) return 0.0;
    double sum = 0.0;
    for (double v : s.per_covariate_stratum_occupancy) sum += v;
    return sum / s.per_covariate_stratum_occupancy.size();
  };
  const double ma = mean_occ(first);
  const double mb = mean_occ(second);
  t.rows.push_back({"mean_stratum_occupancy", ma, mb, mb - ma});
  return t;
}

nlohmann::json summary_to_json(const CoverageSummary& summary) {
  nlohmann::json j;
  j["design_tag"] = summary.design_tag;
  j["k"] = summary.k;
  j["n"] = summary.n;
  j["per_cluster_counts"] = summary.per_cluster_counts;
  j["clusters_covered_fraction"] = summary.clusters_covered_fraction;
  j["covariates"] = summary.covariate_names;
  j["stratum_occupancy"] = summary.per_covariate_stratum_occupancy;
  return j;
}

void write_summary_json(const std::string& path,
                        const CoverageSummary& summary) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << summary_to_json(summary).dump(2) << "\n";
}

nlohmann::json comparison_to_json(const ComparisonTable& table) {
  nlohmann::json j;
  j["first"] = table.first_tag;
  j["second"] = table.second_tag;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"metric", r.metric},
                         {"first", r.first},
                         {"second", r.second},
                         {"delta", r.delta}});
  }
  return j;
}

void write_comparison_csv(const std::string& path,
                          const ComparisonTable& table) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "metric," << table.first_tag << "," << table.second_tag
      << ",delta\n";
  for (const auto& r : table.rows) {
    out << r.metric << "," << f17(r.first) << "," << f17(r.second) << ","
        << f17(r.delta) << "\n";
  }
}

const std::string& cluster_color(int cluster_id) {
  static const std::vector<std::string> palette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  int i = cluster_id % static_cast<int>(palette.size());
  if (i < 0) i += static_cast<int>(palette.size());
  return palette[i];
}

namespace {

struct LinearScale {
  double lo = 0.0;
  double span = 1.0;
  double pix_lo = 0.0;
  double pix_span = 1.0;
  double operator()(double v) const {
    return pix_lo + (v - lo) / span * pix_span;
  }
};

LinearScale make_scale(double lo, double hi, double pix_lo, double pix_hi) {
  LinearScale s;
  s.lo = lo;
  s.span = hi > lo ? hi - lo : 1.0;
  if (!(hi > lo)) s.lo = lo - 0.5;
  s.pix_lo = pix_lo;
  s.pix_span = pix_hi - pix_lo;
  return s;
}

}  // namespace

void emit_scatter(const PCAProjection& projection,
                  const std::vector<int>& labels,
                  const std::vector<int>& selected, const std::string& path) {
  const int n = static_cast<int>(projection.scores.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw InvalidArgument("emit_scatter: label count mismatch");
  }
  const bool has_y = projection.scores.cols() >= 2;
  auto px = [&](int i) { return projection.scores(i, 0); };
  auto py = [&](int i) { return has_y ? projection.scores(i, 1) : 0.0; };

  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  if (n > 0 && projection.scores.cols() >= 1) {
    xlo = xhi = px(0);
    ylo = yhi = py(0);
    for (int i = 1; i < n; ++i) {
      xlo = std::min(xlo, px(i));
      xhi = std::max(xhi, px(i));
      ylo = std::min(ylo, py(i));
      yhi = std::max(yhi, py(i));
    }
  }

  const double width = 640.0, height = 480.0, margin = 48.0;
  const LinearScale sx = make_scale(xlo, xhi, margin, width - margin);
  const LinearScale sy = make_scale(ylo, yhi, height - margin, margin);

  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);

  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << static_cast<int>(width) << "\" height=\""
      << static_cast<int>(height) << "\" viewBox=\"0 0 "
      << static_cast<int>(width) << " " << static_cast<int>(height)
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << static_cast<int>(width)
      << "\" height=\"" << static_cast<int>(height)
      << "\" fill=\"#ffffff\"/>\n";
  out << "<g fill=\"#b0b0b0\">\n";
  for (int i = 0; i < n; ++i) {
    out << "<circle cx=\"" << f2(sx(px(i))) << "\" cy=\"" << f2(sy(py(i)))
        << "\" r=\"2\"/>\n";
  }
  out << "</g>\n";
  out << "<g stroke=\"#000000\" stroke-width=\"0.8\">\n";
  for (int idx : selected) {
    if (idx < 0 || idx >= n) {
      throw InvalidArgument("emit_scatter: design index out of range");
    }
    out << "<circle cx=\"" << f2(sx(px(idx))) << "\" cy=\""
        << f2(sy(py(idx))) << "\" r=\"5\" fill=\""
        << cluster_color(labels[idx]) << "\"/>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << f2(width / 2) << "\" y=\"" << f2(height - 12.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">PC1</text>\n";
  out << "<text x=\"16\" y=\"" << f2(height / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << f2(height / 2) << ")\">PC2</text>\n";
  for (int c = 0; c < k; ++c) {
    const double ly = margin + 16.0 * c;
    out << "<rect x=\"" << f2(width - margin + 6.0) << "\" y=\""
        << f2(ly - 9.0) << "\" width=\"10\" height=\"10\" fill=\""
        << cluster_color(c) << "\"/>\n";
    out << "<text x=\"" << f2(width - margin + 20.0) << "\" y=\"" << f2(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << c
        << "</text>\n";
  }
  out << "</svg>\n";
}

void emit_cluster_map(const ClusterModel& model, const FeatureMatrix& features,
                      const std::vector<int>& selected,
                      const std::string& path) {
  if (static_cast<int>(model.labels.size()) != features.n()) {
    throw MismatchedContext("cluster model does not match feature matrix");
  }
  const int w = features.grid_width;
  const int h = features.grid_height;
  const int cell = std::max(2, 640 / std::max(1, std::max(w, h)));
  const int width = w * cell;
  const int height = h * cell;

  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << " " << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#f0f0f0\"/>\n";
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (int i = 0; i < features.n(); ++i) {
    const auto [row, col] = features.cell_index[i];
    out << "<rect x=\"" << col * cell << "\" y=\"" << row * cell
        << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << cluster_color(model.labels[i]) << "\"/>\n";
  }
  out << "</g>\n";
  const double arm = std::max(4.0, cell * 0.6);
  const double sw = std::max(1.5, cell / 5.0);
  out << "<g stroke=\"#e60000\" stroke-width=\"" << f2(sw)
      << "\" stroke-linecap=\"round\">\n";
  for (int idx : selected) {
    if (idx < 0 || idx >= features.n()) {
      throw InvalidArgument("emit_cluster_map: design index out of range");
    }
    const auto [row, col] = features.cell_index[idx];
    const double cx = (col + 0.5) * cell;
    const double cy = (row + 0.5) * cell;
    out << "<line x1=\"" << f2(cx - arm / 2) << "\" y1=\"" << f2(cy - arm / 2)
        << "\" x2=\"" << f2(cx + arm / 2) << "\" y2=\"" << f2(cy + arm / 2)
        << "\"/>\n";
    out << "<line x1=\"" << f2(cx - arm / 2) << "\" y1=\"" << f2(cy + arm / 2)
        << "\" x2=\"" << f2(cx + arm / 2) << "\" y2=\"" << f2(cy - arm / 2)
        << "\"/>\n";
  }
  out << "</g>\n";
  out << "</svg>\n";
}

}  // namespace speclhs
