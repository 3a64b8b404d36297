#include "subart/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace subart {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

[[noreturn]] void load_error(const std::string& msg) {
  throw std::runtime_error("load_csv: " + msg);
}

}  // namespace

const Dataset::Covariate& Dataset::covariate(const std::string& name) const {
  for (const auto& c : covariates)
    if (c.name == name) return c;
  throw std::runtime_error("unknown covariate: " + name);
}

Eigen::Index DesignMatrix::column_index(const std::string& name) const {
  auto idx = find_column(name);
  if (!idx) throw std::runtime_error("unknown design column: " + name);
  return *idx;
}

std::optional<Eigen::Index> DesignMatrix::find_column(
    const std::string& name) const {
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(column_names.size()); ++j)
    if (column_names[j] == name) return j;
  return std::nullopt;
}

Dataset load_csv(const std::string& path, const Schema& schema,
                 const std::vector<std::string>& na_codes) {
  std::ifstream in(path);
  if (!in) load_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) load_error("empty file " + path);
  const auto header = split_line(line);

  auto col_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      load_error("column '" + name + "' not found in " + path);
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t t_col = col_of(schema.treatment);
  const std::size_t c_col = col_of(schema.cost);
  const std::size_t q_col = col_of(schema.health);
  std::vector<std::size_t> cov_cols;
  for (const auto& name : schema.covariates) cov_cols.push_back(col_of(name));
  for (const auto& f : schema.factors)
    if (std::find(schema.covariates.begin(), schema.covariates.end(), f) ==
        schema.covariates.end())
      load_error("factor '" + f + "' is not a declared covariate");

  auto is_missing_token = [&](const std::string& cell) {
    if (cell.empty() || cell == "NA") return true;
    return std::find(na_codes.begin(), na_codes.end(), cell) != na_codes.end();
  };

  // Raw string storage per needed column; typed conversion afterwards.
  std::vector<std::string> t_raw, c_raw, q_raw;
  std::vector<std::vector<std::string>> cov_raw(cov_cols.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      load_error("row " + std::to_string(row) + " has " +
                 std::to_string(cells.size()) + " cells, expected " +
                 std::to_string(header.size()));
    t_raw.push_back(cells[t_col]);
    c_raw.push_back(cells[c_col]);
    q_raw.push_back(cells[q_col]);
    for (std::size_t k = 0; k < cov_cols.size(); ++k)
      cov_raw[k].push_back(cells[cov_cols[k]]);
  }
  const std::size_t n = t_raw.size();
  if (n < 2) load_error("need at least 2 data rows, got " + std::to_string(n));

  Dataset ds;
  ds.outcomes.resize(static_cast<Eigen::Index>(n), 2);
  ds.missing.assign(n, {false, false});
  ds.treatment.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    if (is_missing_token(t_raw[i]))
      load_error("missing value in treatment column '" + schema.treatment +
                 "', row " + std::to_string(i + 1));
    double tv;
    if (!parse_double(t_raw[i], tv) || (tv != 0.0 && tv != 1.0))
      load_error("treatment column '" + schema.treatment + "' row " +
                 std::to_string(i + 1) + ": expected 0 or 1, got '" +
                 t_raw[i] + "'");
    ds.treatment[i] = static_cast<int>(tv);

    for (int j = 0; j < 2; ++j) {
      const std::string& cell = (j == 0) ? c_raw[i] : q_raw[i];
      const std::string& name = (j == 0) ? schema.cost : schema.health;
      if (is_missing_token(cell)) {
        ds.missing[i][static_cast<std::size_t>(j)] = true;
        ds.outcomes(static_cast<Eigen::Index>(i), j) =
            std::numeric_limits<double>::quiet_NaN();
      } else {
        double v;
        if (!parse_double(cell, v))
          load_error("non-numeric value '" + cell + "' in column '" + name +
                     "', row " + std::to_string(i + 1));
        ds.outcomes(static_cast<Eigen::Index>(i), j) = v;
      }
    }
  }

  for (std::size_t k = 0; k < cov_cols.size(); ++k) {
    const std::string& name = schema.covariates[k];
    const bool is_factor = std::find(schema.factors.begin(),
                                     schema.factors.end(),
                                     name) != schema.factors.end();
    Dataset::Covariate cov;
    cov.name = name;
    for (std::size_t i = 0; i < n; ++i)
      if (is_missing_token(cov_raw[k][i]))
        load_error("missing value in covariate column '" + name + "', row " +
                   std::to_string(i + 1));
    if (is_factor) {
      cov.kind = ColumnKind::Categorical;
      std::set<std::string> level_set(cov_raw[k].begin(), cov_raw[k].end());
      if (level_set.size() < 2)
        load_error("factor column '" + name + "' has fewer than 2 levels");
      cov.levels.assign(level_set.begin(), level_set.end());
      cov.codes.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        cov.codes[i] = static_cast<int>(
            std::lower_bound(cov.levels.begin(), cov.levels.end(),
                             cov_raw[k][i]) -
            cov.levels.begin());
    } else {
      cov.values.resize(n);
      bool binary = true;
      for (std::size_t i = 0; i < n; ++i) {
        double v;
        if (!parse_double(cov_raw[k][i], v))
          load_error("non-numeric value '" + cov_raw[k][i] + "' in column '" +
                     name + "', row " + std::to_string(i + 1));
        cov.values[i] = v;
        if (v != 0.0 && v != 1.0) binary = false;
      }
      cov.kind = binary ? ColumnKind::Binary : ColumnKind::Numeric;
    }
    ds.covariates.push_back(std::move(cov));
  }

  const auto treated =
      std::count(ds.treatment.begin(), ds.treatment.end(), 1);
  if (treated == 0 || treated == static_cast<long>(n))
    load_error("need at least one patient per treatment arm");
  return ds;
}

DesignMatrix encode(
    const Dataset& data,
    const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  const auto n = data.n();
  for (const auto& [name, col] : extra)
    if (static_cast<Eigen::Index>(col.size()) != n)
      throw std::runtime_error("extra column '" + name + "' has length " +
                               std::to_string(col.size()) + ", expected " +
                               std::to_string(n));

  DesignMatrix dm;
  std::vector<std::vector<double>> cols;
  auto push = [&](const std::string& name, std::vector<double> v) {
    dm.column_names.push_back(name);
    cols.push_back(std::move(v));
  };

  {
    std::vector<double> t(data.treatment.begin(), data.treatment.end());
    push("t", std::move(t));
  }
  for (const auto& cov : data.covariates) {
    if (cov.kind == ColumnKind::Categorical) {
      // k-1 dummies; lexicographically first level is the reference.
      for (std::size_t l = 1; l < cov.levels.size(); ++l) {
        std::vector<double> d(static_cast<std::size_t>(n), 0.0);
        for (Eigen::Index i = 0; i < n; ++i)
          if (cov.codes[static_cast<std::size_t>(i)] ==
              static_cast<int>(l))
            d[static_cast<std::size_t>(i)] = 1.0;
        const std::string dummy = cov.name + "_" + cov.levels[l];
        dm.factor_origin[dummy] = {cov.name, cov.levels[l]};
        push(dummy, std::move(d));
      }
    } else {
      push(cov.name, cov.values);
    }
  }
  for (const auto& [name, col] : extra) push(name, col);

  dm.values.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      dm.values(i, static_cast<Eigen::Index>(j)) =
          cols[j][static_cast<std::size_t>(i)];
  return dm;
}

}  // namespace subart
