// Column schemas for the two UCI fairness datasets. Each entry names the
// column, whether it is one-hot encoded or standardized, and (for German)
// the attribute codes the published file may contain.

#include "causirl/tabular.hpp"

namespace causirl {

namespace {

ColumnSchema categorical(std::string name, std::vector<std::string> codes = {}) {
  return {std::move(name), ColumnKind::categorical, false, std::move(codes)};
}

ColumnSchema continuous(std::string name) { return {std::move(name), ColumnKind::continuous, false, {}}; }

std::vector<std::string> code_range(const std::string& prefix, int first, int last) {
  std::vector<std::string> out;
  for (int i = first; i <= last; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

const DatasetSchema& adult_schema() {
  static const DatasetSchema schema = [] {
    DatasetSchema s{"adult", {}};
    s.columns = {
        continuous("age"),
        categorical("workclass"),
        continuous("fnlwgt"),          // census sampling weight
        categorical("education"),
        continuous("education_num"),   // ordinal years of education
        categorical("marital_status"),
        categorical("occupation"),
        categorical("relationship"),
        categorical("race"),
        categorical("sex"),            // sensitive: Male / Female
        continuous("capital_gain"),
        continuous("capital_loss"),
        continuous("hours_per_week"),
        categorical("native_country"),
    };
    s.columns[9].sensitive_source = true;
    return s;
  }();
  return schema;
}

const DatasetSchema& german_schema() {
  static const DatasetSchema schema = [] {
    DatasetSchema s{"german", {}};
    s.columns = {
        categorical("checking_status", code_range("A1", 1, 4)),
        continuous("duration_months"),
        categorical("credit_history", code_range("A3", 0, 4)),
        categorical("purpose", code_range("A4", 0, 10)),  // A40 .. A410
        continuous("credit_amount"),
        categorical("savings", code_range("A6", 1, 5)),
        categorical("employment_since", code_range("A7", 1, 5)),
        continuous("installment_rate"),
        categorical("personal_status", code_range("A9", 1, 5)),  // sex + marital status
        categorical("other_debtors", code_range("A10", 1, 3)),
        continuous("residence_since"),
        categorical("property", code_range("A12", 1, 4)),
        continuous("age"),
        categorical("other_installments", code_range("A14", 1, 3)),
        categorical("housing", code_range("A15", 1, 3)),
        continuous("existing_credits"),
        categorical("job", code_range("A17", 1, 4)),
        continuous("people_liable"),
        categorical("telephone", code_range("A19", 1, 2)),
        categorical("foreign_worker", code_range("A20", 1, 2)),
    };
    s.columns[8].sensitive_source = true;
    return s;
  }();
  return schema;
}

}  // namespace causirl
