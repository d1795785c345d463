#include "mincerlab/returns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mincerlab/errors.hpp"

namespace mincer {

double relative_effect(double coefficient) {
  if (!std::isfinite(coefficient))
    throw std::invalid_argument("relative_effect: coefficient must be finite");
  return 100.0 * std::expm1(coefficient);
}

double annualized_rate(double coefficient, double total_years) {
  if (!(total_years > 0.0))
    throw std::invalid_argument("annualized_rate: total_years must be positive");
  return relative_effect(coefficient) / total_years;
}

double incremental_rate(double b_hi, double b_lo, double years_hi, double years_lo) {
  if (!(years_hi > years_lo))
    throw std::invalid_argument("incremental_rate: years_hi must exceed years_lo");
  return 100.0 * std::expm1(b_hi - b_lo) / (years_hi - years_lo);
}

FieldDurations FieldDurations::uniform() {
  FieldDurations d;
  for (HigherEdField f : kHigherEdFields) d.years[f] = 4.0;
  return d;
}

FieldDurations FieldDurations::differentiated() {
  FieldDurations d = uniform();
  d.years[HigherEdField::Economics] = 3.0;
  d.years[HigherEdField::Medicine] = 6.0;
  return d;
}

std::optional<EducationLevel> level_for_dummy_label(const std::string& label) {
  if (label == "HAS_PROF") return EducationLevel::Vocational;
  if (label == "HAS_HS") return EducationLevel::HighSchool;
  if (label == "HAS_POST") return EducationLevel::PostSecondary;
  if (label == "HAS_HE") return EducationLevel::Bachelor;
  if (label == "HAS_MA") return EducationLevel::Masters;
  if (label == "HAS_DR") return EducationLevel::Doctorate;
  return std::nullopt;
}

std::optional<HigherEdField> field_for_dummy_label(const std::string& label) {
  if (label == "HE_TECH") return HigherEdField::Technical;
  if (label == "HE_UNIV") return HigherEdField::Science;
  if (label == "HE_EC") return HigherEdField::Economics;
  if (label == "HE_LAW") return HigherEdField::Law;
  if (label == "HE_MED") return HigherEdField::Medicine;
  if (label == "HE_ART") return HigherEdField::Arts;
  return std::nullopt;
}

ReturnsTable build_levels_table(const LabeledCoefficients& coefficients,
                                const std::map<std::string, double>* years_override,
                                const LevelReference* reference) {
  if (coefficients.empty()) throw SchemaError("no coefficients given");

  ReturnsTable table;
  for (const auto& [label, b] : coefficients) {
    ReturnsRow row;
    row.label = label;
    row.coefficient = b;

    double years = 0.0;
    if (years_override && years_override->count(label)) {
      years = years_override->at(label);
    } else if (auto level = level_for_dummy_label(label)) {
      years = static_cast<double>(education_years(*level));
    } else {
      throw SchemaError("unknown education-level label '" + label + "'");
    }
    if (!(years >= 1.0)) throw SchemaError("years for '" + label + "' must be >= 1");

    row.years = years;
    row.relative_effect = relative_effect(b);
    row.annualized_rate = annualized_rate(b, years);

    if (reference) {
      if (auto it = reference->relative.find(label); it != reference->relative.end()) {
        row.published_relative = it->second;
        if (std::fabs(row.relative_effect - it->second) > kRelativeEffectTolerancePp)
          row.flagged = true;
      }
      if (auto it = reference->annualized.find(label); it != reference->annualized.end()) {
        row.published_annualized = it->second;
        if (std::fabs(row.annualized_rate - it->second) > kAnnualizedTolerancePp)
          row.flagged = true;
      }
    }
    table.rows.push_back(std::move(row));
  }

  std::sort(table.rows.begin(), table.rows.end(),
            [](const ReturnsRow& a, const ReturnsRow& b) { return a.years < b.years; });

  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const ReturnsRow& lo = table.rows[i - 1];
    const ReturnsRow& hi = table.rows[i];
    IncrementalRow inc;
    inc.label_hi = hi.label;
    inc.label_lo = lo.label;
    inc.rate = incremental_rate(hi.coefficient, lo.coefficient, hi.years, lo.years);
    if (reference) {
      const auto key = std::make_pair(hi.label, lo.label);
      if (auto it = reference->incremental.find(key); it != reference->incremental.end()) {
        inc.published_rate = it->second;
        if (std::fabs(inc.rate - it->second) > kIncrementalTolerancePp) inc.flagged = true;
      }
    }
    table.incremental.push_back(std::move(inc));
  }

  return table;
}

ReturnsTable build_fields_table(const LabeledCoefficients& coefficients,
                                const FieldDurations& durations, const FieldReference* reference) {
  if (coefficients.empty()) throw SchemaError("no coefficients given");

  // Identify whether the durations match a named preset for reference lookup.
  const bool is_differentiated =
      durations.years == FieldDurations::differentiated().years;
  const bool is_uniform = durations.years == FieldDurations::uniform().years;

  std::map<HigherEdField, double> by_field;
  std::map<HigherEdField, std::string> label_of;
  for (const auto& [label, b] : coefficients) {
    auto field = field_for_dummy_label(label);
    if (!field) throw SchemaError("unknown field label '" + label + "'");
    by_field[*field] = b;
    label_of[*field] = label;
  }
  for (HigherEdField f : kHigherEdFields) {
    if (!by_field.count(f)) throw SchemaError("missing coefficient for field " + to_string(f));
    if (!durations.years.count(f)) throw SchemaError("missing duration for field " + to_string(f));
    if (!(durations.years.at(f) >= 1.0))
      throw SchemaError("duration for field " + to_string(f) + " must be >= 1");
  }

  ReturnsTable table;
  for (HigherEdField f : kHigherEdFields) {
    ReturnsRow row;
    row.label = label_of[f];
    row.coefficient = by_field[f];
    row.years = durations.years.at(f);
    row.relative_effect = relative_effect(row.coefficient);
    row.annualized_rate = annualized_rate(row.coefficient, row.years);

    if (reference) {
      const std::map<std::string, double>* pub = nullptr;
      if (is_differentiated) pub = &reference->differentiated;
      else if (is_uniform) pub = &reference->uniform;
      if (pub) {
        if (auto it = pub->find(row.label); it != pub->end()) {
          row.published_annualized = it->second;
          if (std::fabs(row.annualized_rate - it->second) > kFieldRateTolerancePp)
            row.flagged = true;
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReturnsTable field_rates(const std::map<HigherEdField, double>& coefficients,
                         const FieldDurations& durations) {
  LabeledCoefficients labeled;
  static const char* kLabels[6] = {"HE_TECH", "HE_UNIV", "HE_EC", "HE_LAW", "HE_MED", "HE_ART"};
  for (std::size_t i = 0; i < kHigherEdFields.size(); ++i) {
    HigherEdField f = kHigherEdFields[i];
    if (!coefficients.count(f)) throw SchemaError("missing coefficient for field " + to_string(f));
    labeled.emplace_back(kLabels[i], coefficients.at(f));
  }
  return build_fields_table(labeled, durations);
}

const LevelPreset& table6_preset() {
  static const LevelPreset preset = [] {
    LevelPreset p;
    p.coefficients = {{"HAS_PROF", 0.129}, {"HAS_HS", 0.274}, {"HAS_POST", 0.598},
                      {"HAS_HE", 0.944},   {"HAS_MA", 1.167}, {"HAS_DR", 0.977}};
    p.reference.relative = {{"HAS_PROF", 13.7}, {"HAS_HS", 31.6},  {"HAS_POST", 81.9},
                            {"HAS_HE", 157.2},  {"HAS_MA", 221.5}, {"HAS_DR", 165.5}};
    p.reference.annualized = {{"HAS_PROF", 1.37}, {"HAS_HS", 2.36},  {"HAS_POST", 5.42},
                              {"HAS_HE", 9.83},   {"HAS_MA", 12.30}, {"HAS_DR", 7.88}};
    p.reference.incremental = {{{"HAS_HS", "HAS_PROF"}, 7.8},
                               {{"HAS_POST", "HAS_HS"}, 16.9},
                               {{"HAS_HE", "HAS_POST"}, 41.4},
                               {{"HAS_MA", "HAS_HE"}, 12.5},
                               {{"HAS_DR", "HAS_MA"}, -5.8}};
    return p;
  }();
  return preset;
}

const FieldPreset& table9_preset() {
  static const FieldPreset preset = [] {
    FieldPreset p;
    p.coefficients = {{"HE_TECH", 0.778}, {"HE_UNIV", 0.719}, {"HE_EC", 0.776},
                      {"HE_LAW", 0.725},  {"HE_MED", 0.853},  {"HE_ART", 0.601}};
    p.reference.uniform = {{"HE_TECH", 29.48}, {"HE_UNIV", 26.33}, {"HE_EC", 29.34},
                           {"HE_LAW", 26.65},  {"HE_MED", 33.67},  {"HE_ART", 20.59}};
    p.reference.differentiated = {{"HE_TECH", 29.48}, {"HE_UNIV", 26.33}, {"HE_EC", 39.12},
                                  {"HE_LAW", 26.65},  {"HE_MED", 22.45},  {"HE_ART", 20.59}};
    return p;
  }();
  return preset;
}

}  // namespace mincer
