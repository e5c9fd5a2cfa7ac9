#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "mgl/penalty.hpp"
#include "mgl/schema.hpp"
#include "mgl/solve.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Standardization applied to continuous columns at ingestion.
struct ColumnStandardization {
  bool applied = false;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// A dataset plus the bookkeeping created at ingestion: per-categorical level
/// dictionaries (label for each 0-based code, lexicographically sorted) and
/// the continuous-column standardization.
struct IngestedData {
  Dataset data;
  std::vector<std::vector<std::string>> level_labels;
  ColumnStandardization standardize;
};

struct IngestOptions {
  /// One entry per CSV column: 'c' = continuous, 'd' = categorical. Accepts
  /// "c,d,c" or "cdc".
  std::string types;
  bool standardize = true;
};

/// Reads a header CSV into a Dataset. Missing values (empty, NA, NaN) are a
/// hard error naming the row and column. Continuous columns are reordered
/// before categorical ones; the header supplies variable names.
IngestedData ingest_csv(const std::string& path, const IngestOptions& options);

/// Ingests new data against existing dictionaries and standardization (for
/// held-out evaluation). An unseen categorical level is an error.
IngestedData ingest_csv_as(const std::string& path, const IngestOptions& options,
                           const IngestedData& reference);

void save_dataset_json(const std::string& path, const IngestedData& ingested);
IngestedData load_dataset_json(const std::string& path);

/// Writes the dataset back out as CSV (continuous columns first, categorical
/// codes as their labels). Doubles are printed with round-trip precision.
void export_csv(const std::string& path, const IngestedData& ingested);

/// Self-describing JSON model document: schema, level dictionaries, all
/// parameter blocks in canonical order, penalty weights and fit metadata.
/// Loading reproduces every numeric block exactly.
struct ModelFile {
  std::string estimator = "pl";
  Schema schema;
  Eigen::VectorXd theta;  ///< base layout flat vector
  std::vector<std::vector<std::string>> level_labels;
  ColumnStandardization standardize;
  PenaltySpec penalty;
  double lambda = 0.0;
  std::string solver;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::uint64_t seed = 0;
  // conditional-model extras
  int feature_count = 0;
  std::vector<std::string> feature_names;
  Eigen::VectorXd crf_theta;  ///< full CrfLayout vector when feature_count > 0
  // node-wise extras: one directed parameter vector per node
  std::vector<Eigen::VectorXd> per_node_thetas;
};

void save_model_json(const std::string& path, const ModelFile& model);
ModelFile load_model_json(const std::string& path);

/// Adjacency list with group norms: kind, endpoints, names, norm, active flag.
void write_edges_csv(const std::string& path, const ParamLayout& layout,
                     const std::vector<std::pair<double, Eigen::VectorXd>>& lambda_thetas);

/// Generic CSV table writer (used by the experiment commands).
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

std::string format_double(double value);

}  // namespace mgl
