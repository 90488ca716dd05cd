#include <doctest.h>

#include <functional>
#include <string>

#include "bncausal/dataset.hpp"
#include "bncausal/errors.hpp"
#include "bncausal/rng.hpp"
#include "oracles.hpp"

using namespace bncausal;

namespace {

const char* kSchemaText = R"({"treatment": "T", "outcome": "Y"})";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("csv ingestion encodes a small table") {
  const std::string csv =
      "Y,T,X\n"
      "1,1,a\n"
      "0,1,a\n"
      "1,0,a\n"
      "1,1,b\n"
      "0,0,b\n"
      "0,0,b\n";
  const Dataset ds = parse_csv_text(csv, Schema::from_json_text(kSchemaText));
  CHECK(ds.n() == 6);
  CHECK(ds.num_covariates() == 1);
  CHECK(ds.covariate_meta(0).arity == 2);
  CHECK(ds.covariate_meta(0).labels == std::vector<std::string>{"a", "b"});
  // First-appearance coding: a -> 1, b -> 2.
  CHECK(ds.covariate_code(0, 0) == 1);
  CHECK(ds.covariate_code(0, 3) == 2);
  CHECK(ds.treatment(0) == 1);
  CHECK(ds.outcome(2) == 1);
}

TEST_CASE("binary roles reject a third value") {
  const std::string csv = "Y,T,X\n1,1,a\n0,2,b\n";
  CHECK(code_of([&] { parse_csv_text(csv, Schema::from_json_text(kSchemaText)); }) ==
        ErrorCode::NonBinaryRole);
}

TEST_CASE("binary roles use declared label mapping, never guesses") {
  const std::string csv = "Y,T,X\nyes,no,a\nno,yes,b\n";
  const auto schema = Schema::from_json_text(
      R"({"treatment": "T", "outcome": "Y",
          "levels": {"T": ["no", "yes"], "Y": ["no", "yes"]}})");
  const Dataset ds = parse_csv_text(csv, schema);
  CHECK(ds.treatment(0) == 0);
  CHECK(ds.treatment(1) == 1);
  CHECK(ds.outcome(0) == 1);

  // Same file without the mapping is not encodable.
  CHECK(code_of([&] { parse_csv_text(csv, Schema::from_json_text(kSchemaText)); }) ==
        ErrorCode::NonBinaryRole);
}

TEST_CASE("ingestion error paths") {
  const auto schema = Schema::from_json_text(kSchemaText);
  CHECK(code_of([&] { parse_csv_text("", schema); }) == ErrorCode::EmptyFile);
  CHECK(code_of([&] { parse_csv_text("Y,T,X\n", schema); }) == ErrorCode::EmptyFile);
  CHECK(code_of([&] { parse_csv_text("Y,X\n1,a\n", schema); }) == ErrorCode::MissingColumn);
  CHECK(code_of([&] { parse_csv_text("Y,T,X\n1,1,a\n0,0\n", schema); }) ==
        ErrorCode::RaggedRow);
  CHECK(code_of([&] { parse_csv_text("Y,T,X\n1,1,a\n0,0,\n", schema); }) ==
        ErrorCode::MissingValue);
  // Single-arm data is unusable for weighting.
  CHECK(code_of([&] { parse_csv_text("Y,T,X\n1,1,a\n0,1,b\n", schema); }) ==
        ErrorCode::EmptyArm);
}

TEST_CASE("declared level order overrides first appearance") {
  const std::string csv = "Y,T,X\n1,1,b\n0,0,a\n";
  const auto schema = Schema::from_json_text(
      R"({"treatment": "T", "outcome": "Y", "levels": {"X": ["a", "b", "c"]}})");
  const Dataset ds = parse_csv_text(csv, schema);
  CHECK(ds.covariate_meta(0).arity == 3);
  CHECK(ds.covariate_code(0, 0) == 2);
  CHECK(ds.covariate_code(0, 1) == 1);
}

TEST_CASE("csv round-trip preserves the code matrix") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = oracles::random_positive_dataset(rng, 12 + 3 * rep, 1 + rep % 3);
    // Reload under the dataset's own level order.
    Schema schema;
    schema.treatment = "T";
    schema.outcome = "Y";
    for (int l = 0; l < ds.num_covariates(); ++l) {
      schema.levels.emplace_back(ds.covariate_meta(l).name, ds.covariate_meta(l).labels);
    }
    const Dataset back = parse_csv_text(to_csv_text(ds), schema);
    REQUIRE(back.n() == ds.n());
    REQUIRE(back.num_covariates() == ds.num_covariates());
    for (std::size_t i = 0; i < ds.n(); ++i) {
      CHECK(back.treatment(i) == ds.treatment(i));
      CHECK(back.outcome(i) == ds.outcome(i));
      for (int l = 0; l < ds.num_covariates(); ++l) {
        CHECK(back.covariate_level(l, i) == ds.covariate_level(l, i));
      }
    }
  }
}

TEST_CASE("quoted fields survive a round trip") {
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X, with comma", 2, {"a\"quote", "plain"}};
  const Dataset ds(t, {1, 0}, y, {0, 1}, {x}, {{0, 1}});
  Schema schema;
  schema.treatment = "T";
  schema.outcome = "Y";
  const Dataset back = parse_csv_text(to_csv_text(ds), schema);
  CHECK(back.covariate_meta(0).name == "X, with comma");
  CHECK(back.covariate_meta(0).labels[0] == "a\"quote");
  CHECK(back.covariate_level(0, 0) == 0);
}

TEST_CASE("validate reports per-stratum arm counts") {
  // Stratum codes (2): all treated -> violation.
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  const Dataset ds(t, {1, 0, 1, 1}, y, {1, 0, 0, 1}, {x}, {{0, 0, 1, 1}});
  const PositivityReport report = validate(ds);
  REQUIRE(report.strata.size() == 2);
  CHECK(report.strata[0].treated == 1);
  CHECK(report.strata[0].control == 1);
  CHECK(report.strata[1].treated == 2);
  CHECK(report.strata[1].control == 0);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.strata[report.violations[0]].codes == std::vector<int>{2});
  CHECK_FALSE(report.ok());
}

TEST_CASE("validate on the worked dataset finds balanced strata") {
  const PositivityReport report = validate(oracles::worked_dataset());
  REQUIRE(report.strata.size() == 2);
  // Hand count: X=1 has 2 treated / 1 control; X=2 has 1 treated / 2 control.
  CHECK(report.strata[0].treated == 2);
  CHECK(report.strata[0].control == 1);
  CHECK(report.strata[1].treated == 1);
  CHECK(report.strata[1].control == 2);
  CHECK(report.ok());
}

TEST_CASE("dataset counters match a direct scan") {
  Rng rng(99);
  const Dataset ds = oracles::random_positive_dataset(rng, 40, 2);
  std::size_t treated = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) treated += ds.treatment(i);
  CHECK(ds.n() == 40);
  CHECK(treated > 0);
  CHECK(treated < ds.n());
  for (int l = 0; l < ds.num_covariates(); ++l) {
    for (std::size_t i = 0; i < ds.n(); ++i) {
      CHECK(ds.covariate_code(l, i) >= 1);
      CHECK(ds.covariate_code(l, i) <= ds.covariate_meta(l).arity);
    }
  }
}
