#include "mgl/schema.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgl {

std::string Schema::variable_name(int v) const {
  if (!names.empty()) return names[static_cast<std::size_t>(v)];
  if (v < p) return "x" + std::to_string(v + 1);
  return "y" + std::to_string(v - p + 1);
}

void Schema::validate() const {
  if (p < 0 || q < 0) throw std::invalid_argument("schema: negative variable count");
  if (p + q < 1) throw std::invalid_argument("schema: need at least one variable");
  if (static_cast<int>(levels.size()) != q)
    throw std::invalid_argument("schema: levels size must equal q");
  for (int j = 0; j < q; ++j) {
    if (levels[static_cast<std::size_t>(j)] < 2)
      throw std::invalid_argument("schema: categorical variable " + std::to_string(j + 1) +
                                  " needs at least 2 levels");
  }
  if (!names.empty() && static_cast<int>(names.size()) != p + q)
    throw std::invalid_argument("schema: names must be empty or have p+q entries");
}

std::optional<std::uint64_t> Schema::discrete_state_count() const {
  std::uint64_t count = 1;
  for (int j = 0; j < q; ++j) {
    const auto lj = static_cast<std::uint64_t>(levels[static_cast<std::size_t>(j)]);
    if (count > std::numeric_limits<std::uint64_t>::max() / lj) return std::nullopt;
    count *= lj;
  }
  return count;
}

bool Schema::operator==(const Schema& other) const {
  return p == other.p && q == other.q && levels == other.levels && names == other.names;
}

Dataset::Dataset(Schema schema_, Eigen::MatrixXd x_, Eigen::MatrixXi y_)
    : schema(std::move(schema_)), x(std::move(x_)), y(std::move(y_)) {
  validate();
}

MixedRow Dataset::row(int i) const {
  MixedRow r;
  r.x = schema.p > 0 ? Eigen::VectorXd(x.row(i)) : Eigen::VectorXd(0);
  r.y = schema.q > 0 ? Eigen::VectorXi(y.row(i)) : Eigen::VectorXi(0);
  return r;
}

void Dataset::validate() const {
  schema.validate();
  if (x.cols() != schema.p) throw std::invalid_argument("dataset: x has wrong column count");
  if (y.cols() != schema.q) throw std::invalid_argument("dataset: y has wrong column count");
  if (schema.p > 0 && schema.q > 0 && x.rows() != y.rows())
    throw std::invalid_argument("dataset: x and y row counts differ");
  if (!x.allFinite()) throw std::invalid_argument("dataset: non-finite continuous value");
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < schema.q; ++j) {
      const int code = y(i, j);
      if (code < 0 || code >= schema.level_count(j))
        throw std::invalid_argument("dataset: level code out of range at row " +
                                    std::to_string(i + 1) + ", variable " + std::to_string(j + 1));
    }
  }
}

DummyEncodedRow encode(const Schema& schema, const MixedRow& row) {
  if (row.x.size() != schema.p || row.y.size() != schema.q)
    throw std::invalid_argument("encode: row does not conform to schema");
  int total = schema.p;
  for (int j = 0; j < schema.q; ++j) total += schema.level_count(j);
  DummyEncodedRow enc;
  enc.z = Eigen::VectorXd::Zero(total);
  enc.z.head(schema.p) = row.x;
  int off = schema.p;
  for (int j = 0; j < schema.q; ++j) {
    const int code = row.y[j];
    if (code < 0 || code >= schema.level_count(j))
      throw std::invalid_argument("encode: level code out of range for variable " +
                                  std::to_string(j + 1));
    enc.z[off + code] = 1.0;
    off += schema.level_count(j);
  }
  return enc;
}

MixedRow decode(const Schema& schema, const DummyEncodedRow& enc) {
  int total = schema.p;
  for (int j = 0; j < schema.q; ++j) total += schema.level_count(j);
  if (enc.z.size() != total) throw std::invalid_argument("decode: wrong encoding length");
  MixedRow row;
  row.x = enc.z.head(schema.p);
  row.y.resize(schema.q);
  int off = schema.p;
  for (int j = 0; j < schema.q; ++j) {
    const int lj = schema.level_count(j);
    int hit = -1;
    for (int l = 0; l < lj; ++l) {
      if (enc.z[off + l] == 1.0) {
        if (hit >= 0) throw std::invalid_argument("decode: multiple indicators set");
        hit = l;
      } else if (enc.z[off + l] != 0.0) {
        throw std::invalid_argument("decode: indicator not 0/1");
      }
    }
    if (hit < 0) throw std::invalid_argument("decode: no indicator set");
    row.y[j] = hit;
    off += lj;
  }
  return row;
}

}  // namespace mgl
