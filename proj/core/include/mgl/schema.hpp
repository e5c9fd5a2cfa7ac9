#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mgl {

/// Describes a set of mixed variables: p continuous variables followed by
/// q categorical variables with level counts levels[0..q-1].
///
/// Level codes are 0-based everywhere inside the library; external formats
/// (CSV, JSON) use 1-based codes and the io layer converts at the boundary.
struct Schema {
  int p = 0;                       ///< number of continuous variables
  int q = 0;                       ///< number of categorical variables
  std::vector<int> levels;         ///< q level counts, each >= 2
  std::vector<std::string> names;  ///< optional labels, size 0 or p+q (continuous first)

  int var_count() const { return p + q; }
  int level_count(int j) const { return levels[static_cast<std::size_t>(j)]; }

  /// Label for variable index v in [0, p+q): stored name or a generated one
  /// ("x1".."xp" for continuous, "y1".."yq" for categorical).
  std::string variable_name(int v) const;

  /// Throws std::invalid_argument unless p,q >= 0, p+q >= 1, all levels >= 2
  /// and names is empty or has p+q entries.
  void validate() const;

  /// Product of all level counts (1 when q == 0), or nullopt when the product
  /// does not fit in 64 bits.
  std::optional<std::uint64_t> discrete_state_count() const;

  bool operator==(const Schema& other) const;
};

/// One observation: x holds the p continuous values, y the q level codes
/// (0-based).
struct MixedRow {
  Eigen::VectorXd x;
  Eigen::VectorXi y;
};

/// Dummy encoding of a MixedRow: the raw continuous values followed by one
/// 0/1 indicator block per categorical variable. The indicators of each block
/// sum to exactly 1.
struct DummyEncodedRow {
  Eigen::VectorXd z;
};

/// n observations of mixed rows. Rejects out-of-range level codes and
/// non-finite continuous values at validation.
struct Dataset {
  Schema schema;
  Eigen::MatrixXd x;  ///< n x p
  Eigen::MatrixXi y;  ///< n x q, 0-based codes

  Dataset() = default;
  Dataset(Schema schema_, Eigen::MatrixXd x_, Eigen::MatrixXi y_);

  int n() const { return static_cast<int>(schema.p > 0 ? x.rows() : y.rows()); }
  MixedRow row(int i) const;

  /// Throws std::invalid_argument on dimension mismatch, non-finite x entries
  /// or level codes outside [0, L_j).
  void validate() const;
};

/// Dummy-encodes a row against a schema. Throws on out-of-range codes.
DummyEncodedRow encode(const Schema& schema, const MixedRow& row);

/// Inverse of encode for valid encodings (each indicator block has a single 1).
MixedRow decode(const Schema& schema, const DummyEncodedRow& enc);

}  // namespace mgl
