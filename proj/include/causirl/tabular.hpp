#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "causirl/diffnet.hpp"

namespace causirl {

enum class ColumnKind { categorical, continuous };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  /// Column the sensitive attribute is read from; dropped from the features
  /// when the preprocessor excludes the sensitive attribute.
  bool sensitive_source = false;
  /// Allowed codes for coded categorical columns; empty means free text.
  std::vector<std::string> codes;
};

struct DatasetSchema {
  std::string name;
  std::vector<ColumnSchema> columns;
};

/// Fixed column schemas (see src/tabular_schemas.cpp for per-column notes).
const DatasetSchema& adult_schema();
const DatasetSchema& german_schema();

enum class SplitTag { train, test };

struct TabularDataset {
  DatasetSchema schema;
  std::vector<std::vector<std::string>> rows;  // raw feature fields in schema order
  std::vector<int> target;     // adult: income > 50K; german: good credit
  std::vector<int> sensitive;  // 1 = male, 0 = female
  std::vector<SplitTag> split;

  std::size_t size() const { return rows.size(); }
  TabularDataset subset(SplitTag tag) const;
};

struct ClassBalance {
  std::size_t rows = 0;
  double majority_target = 0.0;
  double majority_sensitive = 0.0;
};

ClassBalance class_balance(const TabularDataset& data);

/// Published UCI Adult files: 15 comma-separated fields, "?" marks a missing
/// value (such rows are dropped), test labels carry a trailing ".". The data
/// file becomes the train split and the test file the test split.
TabularDataset load_adult(const std::filesystem::path& data_path,
                          const std::filesystem::path& test_path);

/// Published UCI German credit file: 20 space-separated coded attributes and
/// a label (1 good, 2 bad). Gender comes from the personal-status code.
/// Every row is tagged train; see `assign_stratified_split`.
TabularDataset load_german(const std::filesystem::path& path);

/// Seeded split stratified by target: round(test_fraction * n_class) rows of
/// each class go to test.
void assign_stratified_split(TabularDataset& data, double test_fraction, std::uint64_t seed);

struct ColumnEncoding {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  std::vector<std::string> categories;  // sorted; one-hot order
  double mean = 0.0;
  double stddev = 1.0;
  std::size_t source = 0;  // index into the raw row
  std::size_t offset = 0;  // first output feature

  std::size_t width() const { return kind == ColumnKind::categorical ? categories.size() : 1; }
  friend bool operator==(const ColumnEncoding&, const ColumnEncoding&) = default;
};

struct Preprocessor {
  std::string dataset;
  std::size_t schema_columns = 0;
  bool include_sensitive = true;
  std::vector<ColumnEncoding> columns;
  std::size_t feature_dim = 0;

  std::vector<std::string> feature_names() const;
  friend bool operator==(const Preprocessor&, const Preprocessor&) = default;
};

/// One-hot category lists and z-score statistics (population std) from
/// `train`. Throws DegenerateColumnError naming a constant continuous column.
Preprocessor fit_preprocessor(const TabularDataset& train, bool include_sensitive);

struct EncodedTable {
  Matrix features;
  std::vector<int> target;
  std::vector<int> sensitive;
  std::size_t unseen = 0;  // categorical values absent from the fitted lists
};

/// Unseen categories encode as an all-zero block and bump `unseen`.
EncodedTable apply_preprocessor(const Preprocessor& prep, const TabularDataset& data);

/// Archive CSV: one column per feature, then target,sensitive,split.
void write_encoded_csv(const Preprocessor& prep, const EncodedTable& table,
                       const std::vector<SplitTag>& split, const std::filesystem::path& path);

}  // namespace causirl
