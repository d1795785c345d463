#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mincerlab/records.hpp"

namespace mincer {

/// Relative income effect of a dummy coefficient in a semilog regression
/// (Halvorsen-Palmquist): 100 * (exp(b) - 1), in percent.
double relative_effect(double coefficient);

/// Relative effect divided by total schooling years, percent per year.
double annualized_rate(double coefficient, double total_years);

/// Rate per extra year between two levels: 100*(exp(b_hi - b_lo) - 1) /
/// (years_hi - years_lo). Requires years_hi > years_lo.
double incremental_rate(double b_hi, double b_lo, double years_hi, double years_lo);

/// Study duration by field. The differentiated preset carries Economics 3,
/// Medicine 6 and 4 years elsewhere; uniform carries 4 years everywhere.
struct FieldDurations {
  std::map<HigherEdField, double> years;

  static FieldDurations uniform();
  static FieldDurations differentiated();
};

// Agreement thresholds (percentage points) between computed rates and the
// bundled published reference values; rows further away get flagged. Sized
// to the reference tables' print precision plus 3-decimal coefficient
// rounding.
inline constexpr double kRelativeEffectTolerancePp = 0.5;
inline constexpr double kAnnualizedTolerancePp = 0.025;
inline constexpr double kIncrementalTolerancePp = 0.1;
inline constexpr double kFieldRateTolerancePp = 0.1;

struct ReturnsRow {
  std::string label;
  double coefficient = 0.0;
  double years = 0.0;
  double relative_effect = 0.0;  // percent
  double annualized_rate = 0.0;  // percent per year
  std::optional<double> published_relative;
  std::optional<double> published_annualized;
  bool flagged = false;  // computed value disagrees with the published one
};

struct IncrementalRow {
  std::string label_hi;
  std::string label_lo;
  double rate = 0.0;  // percent per year
  std::optional<double> published_rate;
  bool flagged = false;
};

struct ReturnsTable {
  std::vector<ReturnsRow> rows;
  std::vector<IncrementalRow> incremental;
};

using LabeledCoefficients = std::vector<std::pair<std::string, double>>;

/// Published reference values used to cross-check a computed levels table.
struct LevelReference {
  std::map<std::string, double> relative;
  std::map<std::string, double> annualized;
  // keyed by (higher label, lower label)
  std::map<std::pair<std::string, std::string>, double> incremental;
};

struct FieldReference {
  std::map<std::string, double> uniform;
  std::map<std::string, double> differentiated;
};

/// Per-level returns table from attainment-dummy coefficients (labels
/// HAS_PROF..HAS_DR). Years default to the level's schooling years;
/// years_override replaces them per label. Rows are ordered by years and
/// the incremental block covers consecutive pairs.
ReturnsTable build_levels_table(const LabeledCoefficients& coefficients,
                                const std::map<std::string, double>* years_override = nullptr,
                                const LevelReference* reference = nullptr);

/// Per-field returns table from field-dummy coefficients (labels
/// HE_TECH..HE_ART) and a duration preset.
ReturnsTable build_fields_table(const LabeledCoefficients& coefficients,
                                const FieldDurations& durations,
                                const FieldReference* reference = nullptr);

/// Map-based variant used when coefficients are already resolved to fields.
ReturnsTable field_rates(const std::map<HigherEdField, double>& coefficients,
                         const FieldDurations& durations);

struct LevelPreset {
  LabeledCoefficients coefficients;
  LevelReference reference;
};

struct FieldPreset {
  LabeledCoefficients coefficients;
  FieldReference reference;
};

/// Bundled published coefficient sets behind the CLI presets.
const LevelPreset& table6_preset();   // --preset paper-table6
const FieldPreset& table9_preset();   // --preset paper-table9

std::optional<EducationLevel> level_for_dummy_label(const std::string& label);
std::optional<HigherEdField> field_for_dummy_label(const std::string& label);

}  // namespace mincer
