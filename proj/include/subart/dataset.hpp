#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace subart {

enum class ColumnKind { Numeric, Binary, Categorical };

/// Column-role assignment for a CEA input file.
struct Schema {
  std::string treatment;
  std::string cost;
  std::string health;
  std::vector<std::string> covariates;  // model covariates, in design order
  std::vector<std::string> factors;     // subset of covariates to treat as unordered factors
};

/// Validated CEA dataset. Covariates and treatment are complete by
/// construction; only outcome cells may be missing. Immutable after load.
struct Dataset {
  struct Covariate {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<double> values;        // numeric / binary storage
    std::vector<std::string> levels;   // categorical: distinct levels, lexicographic
    std::vector<int> codes;            // categorical: index into levels, per row
  };

  std::vector<Covariate> covariates;
  std::vector<int> treatment;        // 0 = control, 1 = intervention
  Eigen::MatrixX2d outcomes;         // col 0 = cost, col 1 = health
  std::vector<std::array<bool, 2>> missing;  // true = missing

  Eigen::Index n() const { return outcomes.rows(); }
  const Covariate& covariate(const std::string& name) const;
};

/// Numeric design matrix with factor columns expanded to reference-level
/// dummies. factor_origin maps each dummy column name to (source, level).
struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  std::map<std::string, std::pair<std::string, std::string>> factor_origin;

  Eigen::Index column_index(const std::string& name) const;
  std::optional<Eigen::Index> find_column(const std::string& name) const;
};

/// Parse a comma-separated file under the given schema. Cells equal to any
/// na_code (string match after trimming), "NA", or the empty string count as
/// missing, and missingness is only legal in the two outcome columns.
Dataset load_csv(const std::string& path, const Schema& schema,
                 const std::vector<std::string>& na_codes = {});

/// Encode to a design matrix: numeric/binary copied, categorical expanded to
/// k-1 dummies (reference level = lexicographically first), treatment
/// included as column "t", extra columns appended last in the order given.
DesignMatrix encode(
    const Dataset& data,
    const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

}  // namespace subart
