#include "causirl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "causirl/error.hpp"
#include "causirl/rng.hpp"

namespace causirl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where(path, line) + "expected a number, got '" + text + "'");
  }
}

void check_continuous(const DatasetSchema& schema, const std::vector<std::string>& fields,
                      const std::filesystem::path& path, std::size_t line) {
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].kind == ColumnKind::continuous) parse_number(fields[c], path, line);
  }
}

void read_adult_file(const std::filesystem::path& path, SplitTag tag, TabularDataset& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  const std::size_t feature_count = out.schema.columns.size();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '|') continue;  // blank lines, test-file banner

    std::vector<std::string> fields;
    std::istringstream ss(stripped);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(trim(cell));
    if (fields.size() != feature_count + 1) {
      throw ParseError(where(path, line_no) + "expected " + std::to_string(feature_count + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    if (std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return f == "?"; })) {
      continue;
    }

    std::string label = fields.back();
    if (!label.empty() && label.back() == '.') label.pop_back();
    int target;
    if (label == ">50K") {
      target = 1;
    } else if (label == "<=50K") {
      target = 0;
    } else {
      throw ParseError(where(path, line_no) + "unknown income label '" + fields.back() + "'");
    }
    const std::string& sex = fields[9];
    if (sex != "Male" && sex != "Female") {
      throw ParseError(where(path, line_no) + "unknown sex value '" + sex + "'");
    }
    fields.pop_back();
    check_continuous(out.schema, fields, path, line_no);

    out.sensitive.push_back(sex == "Male" ? 1 : 0);
    out.target.push_back(target);
    out.split.push_back(tag);
    out.rows.push_back(std::move(fields));
  }
}

}  // namespace

TabularDataset TabularDataset::subset(SplitTag tag) const {
  TabularDataset out;
  out.schema = schema;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (split[i] != tag) continue;
    out.rows.push_back(rows[i]);
    out.target.push_back(target[i]);
    out.sensitive.push_back(sensitive[i]);
    out.split.push_back(tag);
  }
  return out;
}

ClassBalance class_balance(const TabularDataset& data) {
  ClassBalance out;
  out.rows = data.size();
  if (out.rows == 0) return out;
  const auto n = static_cast<double>(out.rows);
  const auto pos_target = static_cast<double>(std::count(data.target.begin(), data.target.end(), 1));
  const auto pos_sensitive =
      static_cast<double>(std::count(data.sensitive.begin(), data.sensitive.end(), 1));
  out.majority_target = std::max(pos_target, n - pos_target) / n;
  out.majority_sensitive = std::max(pos_sensitive, n - pos_sensitive) / n;
  return out;
}

TabularDataset load_adult(const std::filesystem::path& data_path,
                          const std::filesystem::path& test_path) {
  TabularDataset out;
  out.schema = adult_schema();
  read_adult_file(data_path, SplitTag::train, out);
  read_adult_file(test_path, SplitTag::test, out);
  return out;
}

TabularDataset load_german(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  TabularDataset out;
  out.schema = german_schema();
  const auto& columns = out.schema.columns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string cell;
    while (ss >> cell) fields.push_back(cell);
    if (fields.size() != columns.size() + 1) {
      throw ParseError(where(path, line_no) + "expected " + std::to_string(columns.size() + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& codes = columns[c].codes;
      if (columns[c].kind == ColumnKind::categorical &&
          std::find(codes.begin(), codes.end(), fields[c]) == codes.end()) {
        throw ParseError(where(path, line_no) + "unknown code '" + fields[c] + "' for " +
                         columns[c].name);
      }
    }
    const std::string label = fields.back();
    if (label != "1" && label != "2") {
      throw ParseError(where(path, line_no) + "unknown credit label '" + label + "'");
    }
    fields.pop_back();
    check_continuous(out.schema, fields, path, line_no);

    // A92 / A95: female; A91, A93, A94: male.
    const std::string& status = fields[8];
    out.sensitive.push_back(status == "A92" || status == "A95" ? 0 : 1);
    out.target.push_back(label == "1" ? 1 : 0);
    out.split.push_back(SplitTag::train);
    out.rows.push_back(std::move(fields));
  }
  return out;
}

void assign_stratified_split(TabularDataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  Rng rng = Rng::substream(seed, "stratified-split");
  std::fill(data.split.begin(), data.split.end(), SplitTag::train);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.target[i] == cls) members.push_back(i);
    }
    rng.shuffle(members);
    const auto n_test =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t j = 0; j < n_test; ++j) data.split[members[j]] = SplitTag::test;
  }
}

std::vector<std::string> Preprocessor::feature_names() const {
  std::vector<std::string> names;
  names.reserve(feature_dim);
  for (const auto& col : columns) {
    if (col.kind == ColumnKind::continuous) {
      names.push_back(col.name);
    } else {
      for (const auto& cat : col.categories) names.push_back(col.name + "=" + cat);
    }
  }
  return names;
}

Preprocessor fit_preprocessor(const TabularDataset& train, bool include_sensitive) {
  if (train.size() == 0) throw InputError("cannot fit a preprocessor on an empty split");
  Preprocessor prep;
  prep.dataset = train.schema.name;
  prep.schema_columns = train.schema.columns.size();
  prep.include_sensitive = include_sensitive;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < train.schema.columns.size(); ++c) {
    const ColumnSchema& col = train.schema.columns[c];
    if (col.sensitive_source && !include_sensitive) continue;
    ColumnEncoding enc;
    enc.name = col.name;
    enc.kind = col.kind;
    enc.source = c;
    enc.offset = offset;
    if (col.kind == ColumnKind::categorical) {
      std::set<std::string> levels;
      for (const auto& row : train.rows) levels.insert(row[c]);
      enc.categories.assign(levels.begin(), levels.end());
    } else {
      double sum = 0.0;
      for (const auto& row : train.rows) sum += std::stod(row[c]);
      const double n = static_cast<double>(train.size());
      enc.mean = sum / n;
      double sq = 0.0;
      for (const auto& row : train.rows) {
        const double diff = std::stod(row[c]) - enc.mean;
        sq += diff * diff;
      }
      enc.stddev = std::sqrt(sq / n);
      if (!(enc.stddev > 0.0)) {
        throw DegenerateColumnError("column '" + col.name + "' is constant on the training split");
      }
    }
    offset += enc.width();
    prep.columns.push_back(std::move(enc));
  }
  prep.feature_dim = offset;
  return prep;
}

EncodedTable apply_preprocessor(const Preprocessor& prep, const TabularDataset& data) {
  if (data.schema.name != prep.dataset || data.schema.columns.size() != prep.schema_columns) {
    throw InputError("dataset '" + data.schema.name + "' does not match the preprocessor schema '" +
                     prep.dataset + "'");
  }
  EncodedTable out;
  out.features = Matrix::Zero(static_cast<Eigen::Index>(data.size()),
                              static_cast<Eigen::Index>(prep.feature_dim));
  out.target = data.target;
  out.sensitive = data.sensitive;

  for (const auto& enc : prep.columns) {
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < enc.categories.size(); ++k) index.emplace(enc.categories[k], k);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::string& value = data.rows[i].at(enc.source);
      const auto row = static_cast<Eigen::Index>(i);
      if (enc.kind == ColumnKind::continuous) {
        out.features(row, static_cast<Eigen::Index>(enc.offset)) = (std::stod(value) - enc.mean) / enc.stddev;
      } else if (auto it = index.find(value); it != index.end()) {
        out.features(row, static_cast<Eigen::Index>(enc.offset + it->second)) = 1.0;
      } else {
        ++out.unseen;
      }
    }
  }
  return out;
}

void write_encoded_csv(const Preprocessor& prep, const EncodedTable& table,
                       const std::vector<SplitTag>& split, const std::filesystem::path& path) {
  if (split.size() != static_cast<std::size_t>(table.features.rows())) {
    throw InputError("split tags do not match table rows");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  for (const auto& name : prep.feature_names()) out << name << ',';
  out << "target,sensitive,split\n";
  for (Eigen::Index i = 0; i < table.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.features.cols(); ++j) out << table.features(i, j) << ',';
    const auto r = static_cast<std::size_t>(i);
    out << table.target[r] << ',' << table.sensitive[r] << ','
        << (split[r] == SplitTag::train ? "train" : "test") << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace causirl
