#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mincerlab/csv.hpp"
#include "mincerlab/errors.hpp"
#include "mincerlab/model_spec.hpp"
#include "mincerlab/records.hpp"
#include "mincerlab/synthetic.hpp"

using namespace mincer;

namespace {

PersonRecord worker(int age, EducationLevel level, std::optional<HigherEdField> field = {}) {
  PersonRecord r;
  r.age = age;
  r.gender = Gender::Male;
  r.married = true;
  r.hours_per_week = 40.0;
  r.weeks_worked = 52.0;
  r.big_town = true;
  r.urban = true;
  r.edu_level = level;
  r.he_field = field;
  r.gross_income = 30000.0;
  r.employed = true;
  return r;
}

}  // namespace

TEST_CASE("schooling years per level") {
  CHECK(education_years(EducationLevel::Primary) == 4);
  CHECK(education_years(EducationLevel::Gymnasium) == 8);
  CHECK(education_years(EducationLevel::Vocational) == 10);
  CHECK(education_years(EducationLevel::HighSchool) == 12);
  CHECK(education_years(EducationLevel::PostSecondary) == 15);
  CHECK(education_years(EducationLevel::Bachelor) == 16);
  CHECK(education_years(EducationLevel::Masters) == 18);
  CHECK(education_years(EducationLevel::Doctorate) == 21);
}

TEST_CASE("potential experience with the zero clamp") {
  CHECK(potential_experience(30, 16) == 8.0);
  CHECK(potential_experience(64, 4) == 54.0);
  CHECK(potential_experience(21, 16) == 0.0);  // raw -1 clamps to zero
}

TEST_CASE("potential experience is non-increasing in schooling and nonnegative") {
  for (int age : {15, 22, 40, 64}) {
    double prev = potential_experience(age, 0);
    for (int edu = 1; edu <= 25; ++edu) {
      const double cur = potential_experience(age, edu);
      CHECK(cur >= 0.0);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("work time is the hours-weeks product") {
  CHECK(work_time(40, 52) == 2080.0);
  CHECK(work_time(0, 52) == 0.0);
  CHECK(work_time(35.5, 48) == 1704.0);
}

TEST_CASE("nearest level mapping clamps and rounds") {
  CHECK(nearest_level_for_years(-3.0) == EducationLevel::Primary);
  CHECK(nearest_level_for_years(4.4) == EducationLevel::Primary);
  CHECK(nearest_level_for_years(10.8) == EducationLevel::Vocational);
  CHECK(nearest_level_for_years(11.2) == EducationLevel::HighSchool);
  CHECK(nearest_level_for_years(16.9) == EducationLevel::Bachelor);
  CHECK(nearest_level_for_years(17.2) == EducationLevel::Masters);
  CHECK(nearest_level_for_years(40.0) == EducationLevel::Doctorate);
  // Ties resolve to the lower level.
  CHECK(nearest_level_for_years(6.0) == EducationLevel::Primary);
}

TEST_CASE("filter keeps employed working-age earners") {
  std::vector<PersonRecord> records;
  records.push_back(worker(14, EducationLevel::Gymnasium));               // too young
  records.push_back(worker(40, EducationLevel::HighSchool));              // kept
  PersonRecord zero_income = worker(40, EducationLevel::HighSchool);
  zero_income.gross_income = 0.0;
  records.push_back(zero_income);                                        // no income
  PersonRecord not_employed = worker(40, EducationLevel::HighSchool);
  not_employed.employed = false;
  records.push_back(not_employed);                                       // not employed
  records.push_back(worker(65, EducationLevel::HighSchool));             // too old

  const FilterResult f = filter_sample(records);
  CHECK(f.counts.total_in == 5);
  CHECK(f.counts.kept == 1);
  CHECK(f.counts.dropped_age == 2);
  CHECK(f.counts.dropped_income == 1);
  CHECK(f.counts.dropped_employment == 1);
  REQUIRE(f.records.size() == 1);
  CHECK(f.records[0].age == 40);
}

TEST_CASE("base design row for the worked example") {
  // First record is the worked example; the rest pad the matrix above n >= k.
  std::vector<PersonRecord> records = {
      worker(30, EducationLevel::Bachelor, HigherEdField::Technical)};
  for (int age : {35, 40, 45, 50, 55, 60, 33, 27}) {
    records.push_back(worker(age, EducationLevel::HighSchool));
  }
  const auto built = build_design(records, ModelKind::Base);
  REQUIRE(built.design.k() == 8);
  const double expected[8] = {1, 16, 8, 64, 1, 1, 2080, 1};
  for (std::size_t j = 0; j < 8; ++j) CHECK(built.design.values()(0, j) == expected[j]);
  CHECK(built.log_income[0] == doctest::Approx(std::log(30000.0)));
  CHECK(built.clamped_experience == 0);
}

TEST_CASE("levels design sets exactly the attained dummy") {
  const auto built = build_design({worker(30, EducationLevel::Bachelor, HigherEdField::Law),
                                   worker(40, EducationLevel::Gymnasium),
                                   worker(50, EducationLevel::Vocational),
                                   worker(44, EducationLevel::Doctorate, HigherEdField::Medicine),
                                   worker(33, EducationLevel::HighSchool),
                                   worker(37, EducationLevel::PostSecondary),
                                   worker(29, EducationLevel::Masters, HigherEdField::Science),
                                   worker(60, EducationLevel::Primary),
                                   worker(41, EducationLevel::HighSchool),
                                   worker(45, EducationLevel::HighSchool),
                                   worker(52, EducationLevel::Bachelor, HigherEdField::Arts),
                                   worker(38, EducationLevel::Gymnasium),
                                   worker(47, EducationLevel::Vocational)},
                                  ModelKind::Levels);
  REQUIRE(built.design.k() == 13);
  CHECK(built.design.labels()[1] == "HAS_PROF");
  CHECK(built.design.labels()[6] == "HAS_DR");

  // Row 0: bachelor -> HAS_HE only.
  CHECK(built.design.values()(0, 4) == 1.0);
  for (std::size_t j : {1u, 2u, 3u, 5u, 6u}) CHECK(built.design.values()(0, j) == 0.0);
  // Row 1: gymnasium is the reference band -> all dummies zero.
  for (std::size_t j = 1; j <= 6; ++j) CHECK(built.design.values()(1, j) == 0.0);
  // Row 7: primary also decodes to the reference band.
  for (std::size_t j = 1; j <= 6; ++j) CHECK(built.design.values()(7, j) == 0.0);

  // At most one dummy per row, and decode round-trips the level.
  for (std::size_t i = 0; i < built.design.n(); ++i) {
    std::vector<double> dummies;
    for (std::size_t j = 1; j <= 6; ++j) dummies.push_back(built.design.values()(i, j));
    CHECK(std::count(dummies.begin(), dummies.end(), 1.0) <= 1);
  }
}

TEST_CASE("levels dummy decode round trip") {
  std::vector<EducationLevel> levels = {
      EducationLevel::Primary,   EducationLevel::Gymnasium,     EducationLevel::Vocational,
      EducationLevel::HighSchool, EducationLevel::PostSecondary, EducationLevel::Bachelor,
      EducationLevel::Masters,   EducationLevel::Doctorate};
  // Repeat the cycle so the design satisfies n >= k.
  levels.insert(levels.end(), levels.begin(), levels.end());
  std::vector<PersonRecord> records;
  for (EducationLevel l : levels) {
    records.push_back(worker(55, l,
                             is_higher_education(l) ? std::optional(HigherEdField::Technical)
                                                    : std::nullopt));
  }
  const auto built = build_design(records, ModelKind::Levels);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<double> dummies;
    for (std::size_t j = 1; j <= 6; ++j) dummies.push_back(built.design.values()(i, j));
    const auto decoded = level_from_dummies(dummies);
    if (levels[i] == EducationLevel::Primary || levels[i] == EducationLevel::Gymnasium) {
      CHECK(!decoded.has_value());
    } else {
      REQUIRE(decoded.has_value());
      CHECK(*decoded == levels[i]);
    }
  }
}

TEST_CASE("fields design uses the reference group for non-graduates") {
  const auto built = build_design({worker(30, EducationLevel::Bachelor, HigherEdField::Medicine),
                                   worker(40, EducationLevel::HighSchool),
                                   worker(40, EducationLevel::Masters, HigherEdField::Economics),
                                   worker(44, EducationLevel::Doctorate, HigherEdField::Law),
                                   worker(39, EducationLevel::Vocational),
                                   worker(31, EducationLevel::Bachelor, HigherEdField::Technical),
                                   worker(36, EducationLevel::Bachelor, HigherEdField::Science),
                                   worker(49, EducationLevel::Bachelor, HigherEdField::Arts),
                                   worker(58, EducationLevel::Gymnasium),
                                   worker(52, EducationLevel::Primary),
                                   worker(45, EducationLevel::PostSecondary),
                                   worker(61, EducationLevel::HighSchool),
                                   worker(26, EducationLevel::HighSchool)},
                                  ModelKind::Fields);
  REQUIRE(built.design.k() == 13);
  // Row 0 medicine -> HE_MED.
  CHECK(built.design.values()(0, built.design.column_index("HE_MED")) == 1.0);
  // Row 1 high school: every field dummy zero.
  for (std::size_t j = 1; j <= 6; ++j) CHECK(built.design.values()(1, j) == 0.0);
  // Exclusivity.
  for (std::size_t i = 0; i < built.design.n(); ++i) {
    int set = 0;
    for (std::size_t j = 1; j <= 6; ++j) set += built.design.values()(i, j) == 1.0 ? 1 : 0;
    CHECK(set <= 1);
  }
}

TEST_CASE("experience clamp is counted per row") {
  const auto built = build_design({worker(21, EducationLevel::Bachelor, HigherEdField::Technical),
                                   worker(30, EducationLevel::Bachelor, HigherEdField::Technical),
                                   worker(20, EducationLevel::Masters, HigherEdField::Law),
                                   worker(40, EducationLevel::HighSchool),
                                   worker(41, EducationLevel::HighSchool),
                                   worker(42, EducationLevel::HighSchool),
                                   worker(43, EducationLevel::HighSchool),
                                   worker(44, EducationLevel::HighSchool)},
                                  ModelKind::Base);
  CHECK(built.clamped_experience == 2);
  CHECK(built.design.values()(0, 2) == 0.0);  // clamped EXP
  CHECK(built.design.values()(0, 3) == 0.0);  // and EXP^2
}

TEST_CASE("build_design rejects bad rows") {
  CHECK_THROWS_AS(build_design({}, ModelKind::Base), InsufficientDataError);

  PersonRecord bad = worker(30, EducationLevel::Bachelor, HigherEdField::Technical);
  bad.gross_income = 0.0;
  CHECK_THROWS_AS(build_design({bad}, ModelKind::Base), SchemaError);

  PersonRecord inconsistent = worker(30, EducationLevel::HighSchool);
  inconsistent.he_field = HigherEdField::Arts;  // field without higher education
  CHECK_THROWS_AS(build_design({inconsistent}, ModelKind::Base), SchemaError);
}

TEST_CASE("record validation bounds") {
  PersonRecord r = worker(30, EducationLevel::Bachelor, HigherEdField::Technical);
  CHECK(!validate(r).has_value());
  r.hours_per_week = 169.0;
  CHECK(validate(r).has_value());
  r.hours_per_week = 40.0;
  r.weeks_worked = 54.0;
  CHECK(validate(r).has_value());
  r.weeks_worked = 52.0;
  r.he_field.reset();  // bachelor must carry a field
  CHECK(validate(r).has_value());
}

TEST_CASE("records survive a CSV round trip unchanged") {
  DgpConfig cfg;
  cfg.n = 200;
  cfg.seed = 99;
  const SyntheticSample sample = generate(cfg);

  std::ostringstream out;
  csv::write_records(out, sample.records);
  std::istringstream in(out.str());
  const auto back = csv::read_records(in, "roundtrip");

  REQUIRE(back.size() == sample.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].age == sample.records[i].age);
    CHECK(back[i].gender == sample.records[i].gender);
    CHECK(back[i].married == sample.records[i].married);
    CHECK(back[i].hours_per_week == sample.records[i].hours_per_week);
    CHECK(back[i].weeks_worked == sample.records[i].weeks_worked);
    CHECK(back[i].big_town == sample.records[i].big_town);
    CHECK(back[i].urban == sample.records[i].urban);
    CHECK(back[i].edu_level == sample.records[i].edu_level);
    CHECK(back[i].he_field == sample.records[i].he_field);
    CHECK(back[i].gross_income == sample.records[i].gross_income);
    CHECK(back[i].employed == sample.records[i].employed);
  }
}

TEST_CASE("CSV reader reports offending rows and columns") {
  const std::string text =
      "age,gender,married,hours_per_week,weeks_worked,big_town,urban,edu_level,he_field,"
      "gross_income,employed\n"
      "30,male,1,40,52,1,1,Bachelor,Technical,30000,1\n"
      "31,robot,1,40,52,1,1,Bachelor,Technical,30000,1\n"
      "32,male,1,200,52,1,1,Bachelor,Technical,30000,1\n";
  std::istringstream in(text);
  try {
    csv::read_records(in, "bad.csv");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    CHECK(what.find("bad.csv:3") != std::string::npos);
    CHECK(what.find("gender") != std::string::npos);
    CHECK(what.find("bad.csv:4") != std::string::npos);
    CHECK(what.find("hours_per_week") != std::string::npos);
  }
}

TEST_CASE("CSV reader rejects wrong headers") {
  std::istringstream missing("age,gender\n");
  CHECK_THROWS_AS(csv::read_records(missing, "m.csv"), SchemaError);
  std::istringstream unknown(
      "age,gender,married,hours_per_week,weeks_worked,big_town,urban,edu_level,he_field,"
      "gross_income,employed,extra\n");
  CHECK_THROWS_AS(csv::read_records(unknown, "u.csv"), SchemaError);
}
