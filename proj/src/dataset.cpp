#include "bncausal/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "bncausal/errors.hpp"

namespace bncausal {

void VariableMeta::check() const {
  if (arity < 2) {
    fail(ErrorCode::InvalidArgument, "variable '" + name + "' needs arity >= 2");
  }
  if (static_cast<int>(labels.size()) != arity) {
    fail(ErrorCode::InvalidArgument,
         "variable '" + name + "' has " + std::to_string(labels.size()) +
             " labels for arity " + std::to_string(arity));
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) {
      fail(ErrorCode::InvalidArgument, "variable '" + name + "' has an empty label");
    }
    if (!seen.insert(label).second) {
      fail(ErrorCode::InvalidArgument,
           "variable '" + name + "' has duplicate label '" + label + "'");
    }
  }
}

Schema Schema::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("schema JSON: ") + e.what());
  }
  Schema s;
  if (!j.contains("treatment") || !j.contains("outcome")) {
    fail(ErrorCode::ParseError, "schema JSON must name 'treatment' and 'outcome'");
  }
  s.treatment = j.at("treatment").get<std::string>();
  s.outcome = j.at("outcome").get<std::string>();
  if (j.contains("levels")) {
    for (const auto& [column, labels] : j.at("levels").items()) {
      s.levels.emplace_back(column, labels.get<std::vector<std::string>>());
    }
  }
  return s;
}

Schema Schema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open schema file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

Dataset::Dataset(VariableMeta treatment_meta, std::vector<Level> treatment,
                 VariableMeta outcome_meta, std::vector<Level> outcome,
                 std::vector<VariableMeta> covariate_meta,
                 std::vector<std::vector<Level>> covariates)
    : treatment_meta_(std::move(treatment_meta)),
      outcome_meta_(std::move(outcome_meta)),
      covariate_meta_(std::move(covariate_meta)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)),
      covariates_(std::move(covariates)) {
  const std::size_t rows = treatment_.size();
  if (rows == 0) fail(ErrorCode::EmptyFile, "dataset has no rows");
  if (treatment_meta_.arity != 2 || outcome_meta_.arity != 2) {
    fail(ErrorCode::NonBinaryRole, "treatment and outcome must be binary");
  }
  treatment_meta_.check();
  outcome_meta_.check();
  if (outcome_.size() != rows) fail(ErrorCode::RaggedRow, "outcome column length mismatch");
  if (covariates_.size() != covariate_meta_.size()) {
    fail(ErrorCode::InvalidArgument, "covariate metadata/column count mismatch");
  }
  for (std::size_t l = 0; l < covariates_.size(); ++l) {
    covariate_meta_[l].check();
    if (covariates_[l].size() != rows) {
      fail(ErrorCode::RaggedRow,
           "covariate '" + covariate_meta_[l].name + "' column length mismatch");
    }
    for (const Level v : covariates_[l]) {
      if (v >= covariate_meta_[l].arity) {
        fail(ErrorCode::ArityMismatch,
             "level out of range in covariate '" + covariate_meta_[l].name + "'");
      }
    }
  }
  bool has0 = false;
  bool has1 = false;
  for (const Level t : treatment_) {
    if (t > 1) fail(ErrorCode::NonBinaryRole, "treatment level out of {0,1}");
    (t == 0 ? has0 : has1) = true;
  }
  if (!has0 || !has1) {
    fail(ErrorCode::EmptyArm, std::string("treatment column lacks arm ") +
                                  (has0 ? "1" : "0"));
  }
  for (const Level y : outcome_) {
    if (y > 1) fail(ErrorCode::NonBinaryRole, "outcome level out of {0,1}");
  }
}

std::size_t Dataset::num_strata() const {
  std::size_t prod = 1;
  for (const auto& m : covariate_meta_) prod *= static_cast<std::size_t>(m.arity);
  return prod;
}

std::size_t Dataset::stratum_index(std::size_t i) const {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < covariates_.size(); ++l) {
    idx = idx * static_cast<std::size_t>(covariate_meta_[l].arity) + covariates_[l][i];
  }
  return idx;
}

Dataset Dataset::drop_row(std::size_t drop) const {
  if (drop >= n()) fail(ErrorCode::InvalidArgument, "drop_row index out of range");
  auto without = [drop](const std::vector<Level>& col) {
    std::vector<Level> out;
    out.reserve(col.size() - 1);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (i != drop) out.push_back(col[i]);
    }
    return out;
  };
  std::vector<std::vector<Level>> covs;
  covs.reserve(covariates_.size());
  for (const auto& col : covariates_) covs.push_back(without(col));
  return Dataset(treatment_meta_, without(treatment_), outcome_meta_,
                 without(outcome_), covariate_meta_, std::move(covs));
}

namespace {

// Minimal RFC 4180 reader: quoted fields, embedded commas/quotes/newlines,
// both LF and CRLF endings.
std::vector<std::vector<std::string>> read_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto push_field = [&]() {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto push_row = [&]() {
    push_field();
    records.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        ++i;
        break;
      case ',':
        push_field();
        field_started = false;
        ++i;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        push_row();
        ++i;
        break;
      default:
        field.push_back(c);
        field_started = true;
        ++i;
        break;
    }
  }
  if (field_started || !field.empty() || !row.empty()) push_row();
  return records;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

// Encodes one binary role column. Declared levels map [label0, label1] to
// {0, 1}; otherwise the raw values must literally be "0"/"1".
std::vector<Level> encode_binary_role(const std::string& column_name,
                                      const std::vector<std::string>& values,
                                      const std::vector<std::string>* declared,
                                      VariableMeta* meta) {
  std::vector<std::string> labels;
  if (declared != nullptr) {
    if (declared->size() != 2) {
      fail(ErrorCode::NonBinaryRole,
           "column '" + column_name + "' needs exactly two declared levels");
    }
    labels = *declared;
  } else {
    labels = {"0", "1"};
  }
  std::vector<Level> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (v == labels[0]) {
      out.push_back(0);
    } else if (v == labels[1]) {
      out.push_back(1);
    } else {
      fail(ErrorCode::NonBinaryRole, "column '" + column_name + "' has value '" + v +
                                         "' outside {" + labels[0] + "," + labels[1] + "}");
    }
  }
  meta->name = column_name;
  meta->arity = 2;
  meta->labels = labels;
  return out;
}

}  // namespace

Dataset parse_csv_text(const std::string& text, const Schema& schema) {
  const auto records = read_csv_records(text);
  if (records.empty()) fail(ErrorCode::EmptyFile, "CSV has no header row");
  const auto& header = records.front();
  if (records.size() < 2) fail(ErrorCode::EmptyFile, "CSV has a header but no data rows");

  const std::size_t ncols = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != ncols) {
      fail(ErrorCode::RaggedRow, "row " + std::to_string(r + 1) + " has " +
                                     std::to_string(records[r].size()) + " fields, expected " +
                                     std::to_string(ncols));
    }
    for (const auto& cell : records[r]) {
      if (cell.empty()) {
        fail(ErrorCode::MissingValue, "empty cell in row " + std::to_string(r + 1));
      }
    }
  }

  auto column_index = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      fail(ErrorCode::MissingColumn, "CSV is missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t t_col = column_index(schema.treatment);
  const std::size_t y_col = column_index(schema.outcome);
  if (t_col == y_col) {
    fail(ErrorCode::InvalidArgument, "treatment and outcome map to the same column");
  }

  auto declared_levels = [&](const std::string& name) -> const std::vector<std::string>* {
    for (const auto& [column, labels] : schema.levels) {
      if (column == name) return &labels;
    }
    return nullptr;
  };
  auto extract = [&](std::size_t col) {
    std::vector<std::string> values;
    values.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) values.push_back(records[r][col]);
    return values;
  };

  VariableMeta t_meta;
  VariableMeta y_meta;
  std::vector<Level> t_codes = encode_binary_role(schema.treatment, extract(t_col),
                                                  declared_levels(schema.treatment), &t_meta);
  std::vector<Level> y_codes = encode_binary_role(schema.outcome, extract(y_col),
                                                  declared_levels(schema.outcome), &y_meta);

  std::vector<VariableMeta> cov_meta;
  std::vector<std::vector<Level>> cov_cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c == t_col || c == y_col) continue;
    const std::string& name = header[c];
    const auto values = extract(c);
    VariableMeta meta;
    meta.name = name;
    std::vector<Level> codes(values.size());
    if (const auto* declared = declared_levels(name)) {
      meta.labels = *declared;
      meta.arity = static_cast<int>(declared->size());
      std::map<std::string, Level> index;
      for (std::size_t j = 0; j < declared->size(); ++j) {
        index[(*declared)[j]] = static_cast<Level>(j);
      }
      for (std::size_t r = 0; r < values.size(); ++r) {
        const auto it = index.find(values[r]);
        if (it == index.end()) {
          fail(ErrorCode::ParseError, "column '" + name + "' has value '" + values[r] +
                                          "' not in its declared level list");
        }
        codes[r] = it->second;
      }
    } else {
      // First-appearance order, deterministic across runs on identical files.
      std::map<std::string, Level> index;
      for (std::size_t r = 0; r < values.size(); ++r) {
        auto it = index.find(values[r]);
        if (it == index.end()) {
          const Level next = static_cast<Level>(meta.labels.size());
          if (meta.labels.size() >= 255) {
            fail(ErrorCode::ParseError, "column '" + name + "' exceeds 255 levels");
          }
          meta.labels.push_back(values[r]);
          it = index.emplace(values[r], next).first;
        }
        codes[r] = it->second;
      }
      meta.arity = static_cast<int>(meta.labels.size());
    }
    cov_meta.push_back(std::move(meta));
    cov_cols.push_back(std::move(codes));
  }

  return Dataset(std::move(t_meta), std::move(t_codes), std::move(y_meta),
                 std::move(y_codes), std::move(cov_meta), std::move(cov_cols));
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::EmptyFile, "cannot open CSV file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str(), schema);
}

void save_csv(const Dataset& ds, std::ostream& out) {
  out << csv_escape(ds.outcome_meta().name) << ',' << csv_escape(ds.treatment_meta().name);
  for (int l = 0; l < ds.num_covariates(); ++l) {
    out << ',' << csv_escape(ds.covariate_meta(l).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << csv_escape(ds.outcome_meta().labels[ds.outcome(i)]) << ','
        << csv_escape(ds.treatment_meta().labels[ds.treatment(i)]);
    for (int l = 0; l < ds.num_covariates(); ++l) {
      out << ',' << csv_escape(ds.covariate_meta(l).labels[ds.covariate_level(l, i)]);
    }
    out << '\n';
  }
}

std::string to_csv_text(const Dataset& ds) {
  std::ostringstream out;
  save_csv(ds, out);
  return out.str();
}

PositivityReport validate(const Dataset& ds) {
  std::map<std::size_t, StratumCount> by_stratum;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t s = ds.stratum_index(i);
    auto it = by_stratum.find(s);
    if (it == by_stratum.end()) {
      StratumCount sc;
      sc.codes.resize(ds.num_covariates());
      for (int l = 0; l < ds.num_covariates(); ++l) sc.codes[l] = ds.covariate_code(l, i);
      it = by_stratum.emplace(s, std::move(sc)).first;
    }
    if (ds.treatment(i) == 1) {
      ++it->second.treated;
    } else {
      ++it->second.control;
    }
  }
  PositivityReport report;
  report.strata.reserve(by_stratum.size());
  for (auto& [_, sc] : by_stratum) {
    if (sc.treated == 0 || sc.control == 0) {
      report.violations.push_back(report.strata.size());
    }
    report.strata.push_back(std::move(sc));
  }
  return report;
}

}  // namespace bncausal
