#include "mincerlab/records.hpp"

#include <cmath>
#include <sstream>

namespace mincer {

int education_years(EducationLevel level) {
  switch (level) {
    case EducationLevel::Primary: return 4;
    case EducationLevel::Gymnasium: return 8;
    case EducationLevel::Vocational: return 10;
    case EducationLevel::HighSchool: return 12;
    case EducationLevel::PostSecondary: return 15;
    case EducationLevel::Bachelor: return 16;
    case EducationLevel::Masters: return 18;
    case EducationLevel::Doctorate: return 21;
  }
  return 0;
}

EducationLevel nearest_level_for_years(double years) {
  if (years < 4.0) years = 4.0;
  if (years > 21.0) years = 21.0;
  EducationLevel best = EducationLevel::Primary;
  double best_dist = std::fabs(years - 4.0);
  for (EducationLevel level : kEducationLevels) {
    const double dist = std::fabs(years - education_years(level));
    if (dist < best_dist) {
      best_dist = dist;
      best = level;
    }
  }
  return best;
}

bool is_higher_education(EducationLevel level) {
  return level == EducationLevel::Bachelor || level == EducationLevel::Masters ||
         level == EducationLevel::Doctorate;
}

std::string to_string(EducationLevel level) {
  switch (level) {
    case EducationLevel::Primary: return "Primary";
    case EducationLevel::Gymnasium: return "Gymnasium";
    case EducationLevel::Vocational: return "Vocational";
    case EducationLevel::HighSchool: return "HighSchool";
    case EducationLevel::PostSecondary: return "PostSecondary";
    case EducationLevel::Bachelor: return "Bachelor";
    case EducationLevel::Masters: return "Masters";
    case EducationLevel::Doctorate: return "Doctorate";
  }
  return "?";
}

std::string to_string(HigherEdField field) {
  switch (field) {
    case HigherEdField::Technical: return "Technical";
    case HigherEdField::Science: return "Science";
    case HigherEdField::Economics: return "Economics";
    case HigherEdField::Law: return "Law";
    case HigherEdField::Medicine: return "Medicine";
    case HigherEdField::Arts: return "Arts";
  }
  return "?";
}

std::string to_string(Gender gender) {
  return gender == Gender::Male ? "male" : "female";
}

std::optional<EducationLevel> parse_education_level(std::string_view text) {
  for (EducationLevel level : kEducationLevels) {
    if (text == to_string(level)) return level;
  }
  return std::nullopt;
}

std::optional<HigherEdField> parse_higher_ed_field(std::string_view text) {
  for (HigherEdField field : kHigherEdFields) {
    if (text == to_string(field)) return field;
  }
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view text) {
  if (text == "male") return Gender::Male;
  if (text == "female") return Gender::Female;
  return std::nullopt;
}

std::optional<std::string> validate(const PersonRecord& r) {
  std::ostringstream msg;
  if (r.age < 0 || r.age > 150) {
    msg << "age " << r.age << " out of range [0, 150]";
    return msg.str();
  }
  if (!(r.hours_per_week >= 0.0) || r.hours_per_week > 168.0) {
    msg << "hours_per_week " << r.hours_per_week << " out of range [0, 168]";
    return msg.str();
  }
  if (!(r.weeks_worked >= 0.0) || r.weeks_worked > 53.0) {
    msg << "weeks_worked " << r.weeks_worked << " out of range [0, 53]";
    return msg.str();
  }
  if (!std::isfinite(r.gross_income) || r.gross_income < 0.0) {
    msg << "gross_income " << r.gross_income << " must be finite and nonnegative";
    return msg.str();
  }
  const bool higher = is_higher_education(r.edu_level);
  if (higher && !r.he_field.has_value()) {
    return std::string("he_field required for higher-education level ") + to_string(r.edu_level);
  }
  if (!higher && r.he_field.has_value()) {
    return std::string("he_field must be empty for level ") + to_string(r.edu_level);
  }
  return std::nullopt;
}

double potential_experience(int age, int edu_years) {
  const double raw = static_cast<double>(age) - static_cast<double>(edu_years) - 6.0;
  return raw > 0.0 ? raw : 0.0;
}

double work_time(double hours_per_week, double weeks_worked) {
  return hours_per_week * weeks_worked;
}

}  // namespace mincer
