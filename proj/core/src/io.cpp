#include "mgl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"  // vendored nlohmann/json

namespace mgl {

using json = nlohmann::json;

namespace {

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower = cell;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  return lower == "na" || lower == "nan" || lower == "null";
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Minimal CSV line splitter with double-quote support.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::vector<char> parse_types(const std::string& types, std::size_t columns) {
  std::vector<char> out;
  for (char c : types) {
    if (c == ',' || c == ' ') continue;
    if (c != 'c' && c != 'd')
      throw std::invalid_argument("ingest: column types must be 'c' or 'd'");
    out.push_back(c);
  }
  if (out.size() != columns)
    throw std::invalid_argument("ingest: got " + std::to_string(out.size()) +
                                " column types for " + std::to_string(columns) + " columns");
  return out;
}

double parse_double(const std::string& cell, int row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("ingest: cannot parse '" + cell + "' as a number at row " +
                             std::to_string(row) + ", column " + column);
  }
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest: empty file " + path);
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error("ingest: row " + std::to_string(table.rows.size() + 2) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

IngestedData ingest_table(const RawTable& table, const IngestOptions& options,
                          const IngestedData* reference) {
  const std::size_t columns = table.header.size();
  const std::vector<char> types = parse_types(options.types, columns);
  const int n = static_cast<int>(table.rows.size());
  if (n == 0) throw std::runtime_error("ingest: no data rows");

  std::vector<std::size_t> cont_cols, disc_cols;
  for (std::size_t c = 0; c < columns; ++c)
    (types[c] == 'c' ? cont_cols : disc_cols).push_back(c);

  // missing-value scan first, so the error names the exact cell
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c < columns; ++c)
      if (is_missing(table.rows[static_cast<std::size_t>(i)][c]))
        throw std::runtime_error("ingest: missing value at row " + std::to_string(i + 2) +
                                 ", column '" + table.header[c] + "'");

  Schema schema;
  schema.p = static_cast<int>(cont_cols.size());
  schema.q = static_cast<int>(disc_cols.size());
  for (std::size_t c : cont_cols) schema.names.push_back(table.header[c]);
  for (std::size_t c : disc_cols) schema.names.push_back(table.header[c]);

  // level dictionaries, lexicographically sorted for stability
  std::vector<std::vector<std::string>> labels(disc_cols.size());
  if (reference) {
    if (reference->data.schema.p != schema.p || reference->data.schema.q != schema.q)
      throw std::runtime_error("ingest: column types do not match the reference dataset");
    labels = reference->level_labels;
  } else {
    for (std::size_t k = 0; k < disc_cols.size(); ++k) {
      std::vector<std::string> seen;
      for (int i = 0; i < n; ++i) seen.push_back(table.rows[static_cast<std::size_t>(i)][disc_cols[k]]);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      if (seen.size() < 2)
        throw std::runtime_error("ingest: categorical column '" +
                                 table.header[disc_cols[k]] + "' has a single observed level");
      labels[k] = std::move(seen);
    }
  }
  for (const auto& dict : labels) schema.levels.push_back(static_cast<int>(dict.size()));

  Eigen::MatrixXd x(n, schema.p);
  Eigen::MatrixXi y(n, schema.q);
  for (int i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < cont_cols.size(); ++k)
      x(i, static_cast<Eigen::Index>(k)) =
          parse_double(row[cont_cols[k]], i + 2, table.header[cont_cols[k]]);
    for (std::size_t k = 0; k < disc_cols.size(); ++k) {
      const std::string& cell = row[disc_cols[k]];
      const auto& dict = labels[k];
      const auto it = std::lower_bound(dict.begin(), dict.end(), cell);
      if (it == dict.end() || *it != cell)
        throw std::runtime_error("ingest: unseen level '" + cell + "' at row " +
                                 std::to_string(i + 2) + ", column '" +
                                 table.header[disc_cols[k]] + "'");
      y(i, static_cast<int>(k)) = static_cast<int>(it - dict.begin());
    }
  }

  IngestedData out;
  out.level_labels = std::move(labels);
  if (options.standardize && schema.p > 0) {
    out.standardize.applied = true;
    if (reference) {
      if (!reference->standardize.applied || reference->standardize.mean.size() != schema.p)
        throw std::runtime_error("ingest: reference dataset has no matching standardization");
      out.standardize.mean = reference->standardize.mean;
      out.standardize.sd = reference->standardize.sd;
    } else {
      out.standardize.mean.resize(schema.p);
      out.standardize.sd.resize(schema.p);
      for (int s = 0; s < schema.p; ++s) {
        const double mean = x.col(s).mean();
        double sd = n > 1 ? std::sqrt((x.col(s).array() - mean).square().sum() / (n - 1)) : 0.0;
        if (sd <= 0.0) sd = 1.0;  // constant column
        out.standardize.mean[s] = mean;
        out.standardize.sd[s] = sd;
      }
    }
    for (int s = 0; s < schema.p; ++s)
      x.col(s) = (x.col(s).array() - out.standardize.mean[s]) / out.standardize.sd[s];
  }
  out.data = Dataset(schema, std::move(x), std::move(y));
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json schema_to_json(const Schema& schema) {
  return json{{"p", schema.p}, {"q", schema.q}, {"levels", schema.levels}, {"names", schema.names}};
}

Schema schema_from_json(const json& j) {
  Schema schema;
  schema.p = j.at("p").get<int>();
  schema.q = j.at("q").get<int>();
  schema.levels = j.at("levels").get<std::vector<int>>();
  schema.names = j.at("names").get<std::vector<std::string>>();
  schema.validate();
  return schema;
}

json standardize_to_json(const ColumnStandardization& st) {
  return json{{"applied", st.applied},
              {"mean", vector_to_json(st.mean)},
              {"sd", vector_to_json(st.sd)}};
}

ColumnStandardization standardize_from_json(const json& j) {
  ColumnStandardization st;
  st.applied = j.at("applied").get<bool>();
  st.mean = vector_from_json(j.at("mean"));
  st.sd = vector_from_json(j.at("sd"));
  return st;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

IngestedData ingest_csv(const std::string& path, const IngestOptions& options) {
  return ingest_table(read_csv(path), options, nullptr);
}

IngestedData ingest_csv_as(const std::string& path, const IngestOptions& options,
                           const IngestedData& reference) {
  return ingest_table(read_csv(path), options, &reference);
}

void save_dataset_json(const std::string& path, const IngestedData& ingested) {
  const Dataset& data = ingested.data;
  json j;
  j["format"] = "mgl-dataset";
  j["version"] = 1;
  j["schema"] = schema_to_json(data.schema);
  j["level_labels"] = ingested.level_labels;
  j["standardize"] = standardize_to_json(ingested.standardize);
  json x = json::array();
  for (int i = 0; i < data.n(); ++i) {
    json row = json::array();
    for (int s = 0; s < data.schema.p; ++s) row.push_back(data.x(i, s));
    x.push_back(std::move(row));
  }
  j["x"] = std::move(x);
  json y = json::array();
  for (int i = 0; i < data.n(); ++i) {
    json row = json::array();
    for (int r = 0; r < data.schema.q; ++r) row.push_back(data.y(i, r) + 1);  // 1-based outside
    y.push_back(std::move(row));
  }
  j["y"] = std::move(y);
  write_json_file(path, j);
}

IngestedData load_dataset_json(const std::string& path) {
  const json j = load_json_file(path);
  if (j.value("format", "") != "mgl-dataset")
    throw std::runtime_error(path + " is not an mgl dataset file");
  IngestedData out;
  Schema schema = schema_from_json(j.at("schema"));
  out.level_labels = j.at("level_labels").get<std::vector<std::vector<std::string>>>();
  out.standardize = standardize_from_json(j.at("standardize"));
  const auto& jx = j.at("x");
  const auto& jy = j.at("y");
  const int n = static_cast<int>(std::max(jx.size(), jy.size()));
  Eigen::MatrixXd x(n, schema.p);
  Eigen::MatrixXi y(n, schema.q);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < schema.p; ++s) x(i, s) = jx[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)].get<double>();
    for (int r = 0; r < schema.q; ++r) y(i, r) = jy[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)].get<int>() - 1;
  }
  out.data = Dataset(std::move(schema), std::move(x), std::move(y));
  return out;
}

void export_csv(const std::string& path, const IngestedData& ingested) {
  const Dataset& data = ingested.data;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const Schema& schema = data.schema;
  for (int v = 0; v < schema.var_count(); ++v) {
    if (v) out << ',';
    out << schema.variable_name(v);
  }
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int s = 0; s < schema.p; ++s) {
      if (s) out << ',';
      out << format_double(data.x(i, s));
    }
    for (int r = 0; r < schema.q; ++r) {
      if (schema.p > 0 || r > 0) out << ',';
      out << ingested.level_labels[static_cast<std::size_t>(r)][static_cast<std::size_t>(data.y(i, r))];
    }
    out << '\n';
  }
}

void save_model_json(const std::string& path, const ModelFile& model) {
  json j;
  j["format"] = "mgl-model";
  j["version"] = 1;
  j["estimator"] = model.estimator;
  j["schema"] = schema_to_json(model.schema);
  j["level_labels"] = model.level_labels;
  j["standardize"] = standardize_to_json(model.standardize);
  j["theta"] = vector_to_json(model.theta);
  j["penalty"] = json{{"lambda", model.penalty.lambda},
                      {"weights", vector_to_json(model.penalty.weights)},
                      {"calibrated", model.penalty.calibrated}};
  j["fit"] = json{{"lambda", model.lambda},
                  {"solver", model.solver},
                  {"iterations", model.iterations},
                  {"converged", model.converged},
                  {"objective", model.objective},
                  {"seed", model.seed}};
  if (model.feature_count > 0) {
    j["crf"] = json{{"feature_count", model.feature_count},
                    {"feature_names", model.feature_names},
                    {"theta", vector_to_json(model.crf_theta)}};
  }
  if (!model.per_node_thetas.empty()) {
    json nodes = json::array();
    for (const auto& theta : model.per_node_thetas) nodes.push_back(vector_to_json(theta));
    j["per_node_thetas"] = std::move(nodes);
  }
  write_json_file(path, j);
}

ModelFile load_model_json(const std::string& path) {
  const json j = load_json_file(path);
  if (j.value("format", "") != "mgl-model")
    throw std::runtime_error(path + " is not an mgl model file");
  ModelFile model;
  model.estimator = j.at("estimator").get<std::string>();
  model.schema = schema_from_json(j.at("schema"));
  model.level_labels = j.at("level_labels").get<std::vector<std::vector<std::string>>>();
  model.standardize = standardize_from_json(j.at("standardize"));
  model.theta = vector_from_json(j.at("theta"));
  model.penalty.lambda = j.at("penalty").at("lambda").get<double>();
  model.penalty.weights = vector_from_json(j.at("penalty").at("weights"));
  model.penalty.calibrated = j.at("penalty").at("calibrated").get<bool>();
  model.lambda = j.at("fit").at("lambda").get<double>();
  model.solver = j.at("fit").at("solver").get<std::string>();
  model.iterations = j.at("fit").at("iterations").get<int>();
  model.converged = j.at("fit").at("converged").get<bool>();
  model.objective = j.at("fit").at("objective").get<double>();
  model.seed = j.at("fit").at("seed").get<std::uint64_t>();
  if (j.contains("crf")) {
    model.feature_count = j.at("crf").at("feature_count").get<int>();
    model.feature_names = j.at("crf").at("feature_names").get<std::vector<std::string>>();
    model.crf_theta = vector_from_json(j.at("crf").at("theta"));
  }
  if (j.contains("per_node_thetas"))
    for (const auto& node : j.at("per_node_thetas"))
      model.per_node_thetas.push_back(vector_from_json(node));
  return model;
}

void write_edges_csv(const std::string& path, const ParamLayout& layout,
                     const std::vector<std::pair<double, Eigen::VectorXd>>& lambda_thetas) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const Schema& schema = layout.schema();
  out << "lambda,kind,a,b,name_a,name_b,norm,active\n";
  for (const auto& [lambda, theta] : lambda_thetas) {
    for (const EdgeGroup& group : layout.groups()) {
      const double norm = group_norm(theta, group);
      int va = group.a, vb = group.b;
      if (group.kind == GroupKind::ContDisc) vb += schema.p;
      if (group.kind == GroupKind::DiscDisc) { va += schema.p; vb += schema.p; }
      out << format_double(lambda) << ',' << group_kind_name(group.kind) << ',' << group.a + 1
          << ',' << group.b + 1 << ',' << schema.variable_name(va) << ','
          << schema.variable_name(vb) << ',' << format_double(norm) << ','
          << (norm > kActiveSetThreshold ? 1 : 0) << '\n';
    }
  }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out << ',';
    out << header[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
}

}  // namespace mgl
