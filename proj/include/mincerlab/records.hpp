#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mincer {

enum class EducationLevel {
  Primary,
  Gymnasium,
  Vocational,
  HighSchool,
  PostSecondary,
  Bachelor,
  Masters,
  Doctorate,
};

enum class HigherEdField { Technical, Science, Economics, Law, Medicine, Arts };

enum class Gender { Female, Male };

inline constexpr std::array<EducationLevel, 8> kEducationLevels = {
    EducationLevel::Primary,    EducationLevel::Gymnasium, EducationLevel::Vocational,
    EducationLevel::HighSchool, EducationLevel::PostSecondary,
    EducationLevel::Bachelor,   EducationLevel::Masters,   EducationLevel::Doctorate};

inline constexpr std::array<HigherEdField, 6> kHigherEdFields = {
    HigherEdField::Technical, HigherEdField::Science, HigherEdField::Economics,
    HigherEdField::Law,       HigherEdField::Medicine, HigherEdField::Arts};

/// Schooling years by attained level: Primary 4, Gymnasium 8, Vocational 10,
/// HighSchool 12, PostSecondary 15, Bachelor 16, Masters 18, Doctorate 21.
int education_years(EducationLevel level);

/// Level whose schooling years are closest to `years` (clamped to [4, 21];
/// ties resolve to the lower level).
EducationLevel nearest_level_for_years(double years);

bool is_higher_education(EducationLevel level);

std::string to_string(EducationLevel level);
std::string to_string(HigherEdField field);
std::string to_string(Gender gender);
std::optional<EducationLevel> parse_education_level(std::string_view text);
std::optional<HigherEdField> parse_higher_ed_field(std::string_view text);
std::optional<Gender> parse_gender(std::string_view text);

/// One microdata row: demographics, education, income and work time.
struct PersonRecord {
  int age = 0;
  Gender gender = Gender::Female;
  bool married = false;
  double hours_per_week = 0.0;
  double weeks_worked = 0.0;
  bool big_town = false;  // city with more than 150,000 inhabitants
  bool urban = false;
  EducationLevel edu_level = EducationLevel::Primary;
  std::optional<HigherEdField> he_field;  // present iff edu_level is higher education
  double gross_income = 0.0;              // currency per year
  bool employed = false;
};

/// Violation message when a record breaks an invariant, nullopt otherwise.
std::optional<std::string> validate(const PersonRecord& r);

/// Potential labor-market experience: max(0, age - edu_years - 6).
double potential_experience(int age, int edu_years);

/// Annual hours worked: hours per week times weeks worked.
double work_time(double hours_per_week, double weeks_worked);

}  // namespace mincer
