#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "subart/dataset.hpp"

using namespace subart;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

Schema guided_schema() {
  Schema s;
  s.treatment = "t";
  s.cost = "c";
  s.health = "q";
  s.covariates = {"age", "sex", "education"};
  s.factors = {"education"};
  return s;
}

// First rows of the guided-example table, including outcome missingness.
const char* kTableCsv =
    "c,q,t,age,sex,education\n"
    "NA,0.5865,0,56,0,3\n"
    "2882.69,0.9512,0,70,1,3\n"
    "2275.42,0.9149,0,71,1,3\n"
    "1964.08,NA,0,61,0,3\n"
    "2524.98,0.9133,0,75,1,1\n"
    "2683.89,0.6261,1,50,1,3\n"
    "NA,NA,0,43,1,2\n"
    "1744.14,0.2123,1,21,1,3\n"
    "NA,0.5122,1,28,0,3\n";

}  // namespace

TEST_CASE("load_csv stores observed cells verbatim with correct masks") {
  const auto path = write_temp_csv("dm_table.csv", kTableCsv);
  const Dataset ds = load_csv(path, guided_schema());
  REQUIRE(ds.n() == 9);

  // Fully observed row.
  CHECK(ds.outcomes(1, 0) == 2882.69);
  CHECK(ds.outcomes(1, 1) == 0.9512);
  CHECK(ds.treatment[1] == 0);
  CHECK(ds.covariate("age").values[1] == 70);
  CHECK(ds.covariate("sex").values[1] == 1);
  CHECK_FALSE(ds.missing[1][0]);
  CHECK_FALSE(ds.missing[1][1]);

  // Cost missing, health observed.
  CHECK(ds.missing[0][0]);
  CHECK_FALSE(ds.missing[0][1]);
  CHECK(ds.outcomes(0, 1) == 0.5865);

  // Both outcomes missing.
  CHECK(ds.missing[6][0]);
  CHECK(ds.missing[6][1]);

  CHECK(ds.covariate("education").kind == ColumnKind::Categorical);
  CHECK(ds.covariate("sex").kind == ColumnKind::Binary);
  CHECK(ds.covariate("age").kind == ColumnKind::Numeric);
}

TEST_CASE("sentinel codes in outcome columns become missing") {
  const auto path = write_temp_csv("dm_sentinel.csv",
                                   "c,q,t,age,sex,education\n"
                                   "-99,0.5,0,40,0,1\n"
                                   "100,0.6,1,50,1,2\n"
                                   "200,-99,0,60,0,1\n");
  const Dataset ds = load_csv(path, guided_schema(), {"-99"});
  CHECK(ds.missing[0][0]);
  CHECK_FALSE(ds.missing[0][1]);
  CHECK(ds.missing[2][1]);
  CHECK(ds.outcomes(2, 0) == 200);

  // Without the opt-in code, -99 is a legitimate value.
  const Dataset raw = load_csv(path, guided_schema());
  CHECK_FALSE(raw.missing[0][0]);
  CHECK(raw.outcomes(0, 0) == -99);
}

TEST_CASE("missing treatment or covariate cells are load errors naming the cell") {
  const auto miss_t = write_temp_csv("dm_miss_t.csv",
                                     "c,q,t,age,sex,education\n"
                                     "1,0.5,NA,40,0,1\n"
                                     "2,0.6,1,50,1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(miss_t, guided_schema()),
                       doctest::Contains("treatment"), std::runtime_error);

  const auto miss_cov = write_temp_csv("dm_miss_cov.csv",
                                       "c,q,t,age,sex,education\n"
                                       "1,0.5,0,NA,0,1\n"
                                       "2,0.6,1,50,1,2\n");
  try {
    load_csv(miss_cov, guided_schema());
    FAIL("expected load error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("age") != std::string::npos);
    CHECK(msg.find("row 1") != std::string::npos);
  }
}

TEST_CASE("schema naming an absent column is an error") {
  const auto path = write_temp_csv("dm_nocol.csv",
                                   "c,q,t,age,sex,education\n"
                                   "1,0.5,0,40,0,1\n"
                                   "2,0.6,1,50,1,2\n");
  Schema s = guided_schema();
  s.covariates.push_back("income");
  CHECK_THROWS_WITH_AS(load_csv(path, s), doctest::Contains("income"),
                       std::runtime_error);
}

TEST_CASE("non-numeric content in a numeric column is an error") {
  const auto path = write_temp_csv("dm_text.csv",
                                   "c,q,t,age,sex,education\n"
                                   "1,0.5,0,forty,0,1\n"
                                   "2,0.6,1,50,1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(path, guided_schema()),
                       doctest::Contains("forty"), std::runtime_error);
}

TEST_CASE("single-arm data are rejected") {
  const auto path = write_temp_csv("dm_onearm.csv",
                                   "c,q,t,age,sex,education\n"
                                   "1,0.5,0,40,0,1\n"
                                   "2,0.6,0,50,1,2\n");
  CHECK_THROWS_AS(load_csv(path, guided_schema()), std::runtime_error);
}

TEST_CASE("encode expands factors to reference-level dummies") {
  const auto path = write_temp_csv("dm_enc.csv", kTableCsv);
  const Dataset ds = load_csv(path, guided_schema());
  const DesignMatrix dm = encode(ds);

  // Columns: t, age, sex, education_2, education_3.
  REQUIRE(dm.values.cols() == 5);
  CHECK(dm.column_names[0] == "t");
  CHECK(dm.column_names[3] == "education_2");
  CHECK(dm.column_names[4] == "education_3");
  CHECK(dm.factor_origin.at("education_3") ==
        std::pair<std::string, std::string>("education", "3"));

  // Row 4 has education 1 (reference) -> both dummies zero.
  CHECK(dm.values(4, 3) == 0.0);
  CHECK(dm.values(4, 4) == 0.0);
  // Row 6 has education 2 -> (1, 0).
  CHECK(dm.values(6, 3) == 1.0);
  CHECK(dm.values(6, 4) == 0.0);
  // Row 0 has education 3 -> (0, 1).
  CHECK(dm.values(0, 3) == 0.0);
  CHECK(dm.values(0, 4) == 1.0);

  // Binary column copied unchanged.
  for (Eigen::Index i = 0; i < ds.n(); ++i)
    CHECK(dm.values(i, 2) == ds.covariate("sex").values[static_cast<std::size_t>(i)]);
}

TEST_CASE("encode appends extra columns last and checks lengths") {
  const auto path = write_temp_csv("dm_extra.csv", kTableCsv);
  const Dataset ds = load_csv(path, guided_schema());
  std::vector<double> ps(static_cast<std::size_t>(ds.n()), 0.25);
  const DesignMatrix dm = encode(ds, {{"ps", ps}});
  CHECK(dm.values.cols() == 6);
  CHECK(dm.column_names.back() == "ps");
  CHECK(dm.values.col(5).isApproxToConstant(0.25));

  std::vector<double> short_col(3, 0.0);
  CHECK_THROWS_AS(encode(ds, {{"ps", short_col}}), std::runtime_error);
}

TEST_CASE("encode is deterministic and round-trips observed values") {
  const auto path = write_temp_csv("dm_det.csv", kTableCsv);
  const Dataset ds = load_csv(path, guided_schema());
  const DesignMatrix a = encode(ds);
  const DesignMatrix b = encode(ds);
  CHECK(a.values == b.values);
  CHECK(a.column_names == b.column_names);

  // Numeric covariates recoverable bit-for-bit from the design.
  const Eigen::Index age_col = a.column_index("age");
  for (Eigen::Index i = 0; i < ds.n(); ++i)
    CHECK(a.values(i, age_col) ==
          ds.covariate("age").values[static_cast<std::size_t>(i)]);
}
