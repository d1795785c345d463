// mincerlab: wage-equation estimation, endogeneity diagnostics, returns
// transforms and synthetic microdata, driven from subcommands. Exit codes:
// 0 success, 2 input error, 3 numerical failure.
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mincerlab/csv.hpp"
#include "mincerlab/errors.hpp"
#include "mincerlab/iv.hpp"
#include "mincerlab/model_spec.hpp"
#include "mincerlab/report.hpp"
#include "mincerlab/returns.hpp"
#include "mincerlab/synthetic.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

using nlohmann::json;

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json report_header(const std::string& command, std::uint64_t seed, bool deterministic) {
  json j;
  j["schema_version"] = 1;
  j["tool"] = "mincerlab";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  if (!deterministic) j["timestamp"] = iso_timestamp();
  return j;
}

void emit_report(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw mincer::SchemaError("cannot write '" + out_path + "'");
    out << report.dump(2) << "\n";
  }
}

// Human-readable echo goes to stderr when the JSON owns stdout.
std::ostream& echo_stream(const std::string& out_path) {
  return out_path.empty() ? std::cerr : std::cout;
}

mincer::DesignMatrix instrument_column(const std::vector<mincer::PersonRecord>& records,
                                       const std::string& name) {
  mincer::Matrix z(records.size(), 1);
  std::string label;
  if (name == "urban") {
    label = "URBAN";
    for (std::size_t i = 0; i < records.size(); ++i) z(i, 0) = records[i].urban ? 1.0 : 0.0;
  } else if (name == "big_town") {
    label = "BIG_TOWN";
    for (std::size_t i = 0; i < records.size(); ++i) z(i, 0) = records[i].big_town ? 1.0 : 0.0;
  } else if (name == "married") {
    label = "MARRIED";
    for (std::size_t i = 0; i < records.size(); ++i) z(i, 0) = records[i].married ? 1.0 : 0.0;
  } else if (name == "age") {
    label = "AGE";
    for (std::size_t i = 0; i < records.size(); ++i) z(i, 0) = records[i].age;
  } else {
    throw mincer::SchemaError("unknown instrument column '" + name +
                              "' (expected one of: urban, big_town, married, age)");
  }
  return mincer::DesignMatrix(std::move(z), {label});
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& ability_out, std::optional<std::uint64_t> seed_flag) {
  mincer::DgpConfig cfg = mincer::load_dgp_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;

  const mincer::SyntheticSample sample = mincer::generate(cfg);
  mincer::csv::write_records_file(out_path, sample.records);
  if (!ability_out.empty())
    mincer::csv::write_value_column_file(ability_out, "ability", sample.ability);

  std::cerr << "wrote " << sample.records.size() << " records to " << out_path
            << " (seed " << cfg.seed << ")\n";
  return kExitOk;
}

struct LoadedData {
  std::vector<mincer::PersonRecord> records;
  mincer::FilterCounts filter_counts;
};

LoadedData load_and_filter(const std::string& data_path) {
  const auto raw = mincer::csv::read_records_file(data_path);
  mincer::FilterResult filtered = mincer::filter_sample(raw);
  return LoadedData{std::move(filtered.records), filtered.counts};
}

json warnings_json(const mincer::BuildResult& built, const mincer::IvDiagnostics* diag) {
  json warnings = json::array();
  if (built.clamped_experience > 0) {
    warnings.push_back("clamped_experience_rows: " + std::to_string(built.clamped_experience));
  }
  if (diag) {
    if (diag->hausman.clamped) warnings.push_back("hausman_statistic_clamped");
    if (diag->weak_instrument) warnings.push_back("weak_instrument");
  }
  return warnings;
}

int cmd_estimate(const std::string& data_path, const std::string& model,
                 const std::string& method, const std::string& instrument, bool naive_se,
                 const std::string& out_path, std::uint64_t seed, bool deterministic) {
  const auto kind = mincer::parse_model_kind(model);
  if (!kind) throw mincer::SchemaError("unknown model '" + model + "'");
  if (method != "ols" && method != "2sls")
    throw mincer::SchemaError("unknown method '" + method + "'");
  const bool iv_method = method == "2sls";
  if (iv_method && instrument.empty())
    throw mincer::SchemaError("--method 2sls requires --instrument");
  if (iv_method && *kind != mincer::ModelKind::Base)
    throw mincer::SchemaError("--method 2sls is supported for the base model only");

  LoadedData data = load_and_filter(data_path);
  const mincer::BuildResult built = mincer::build_design(data.records, *kind);

  json report = report_header("estimate", seed, deterministic);
  report["inputs"] = {{"data", {{"path", data_path}, {"fnv1a64", mincer::file_digest(data_path)}}}};
  report["model"] = model;
  report["method"] = method;
  report["data_quality"] = mincer::filter_counts_to_json(data.filter_counts);

  std::ostream& echo = echo_stream(out_path);
  if (!iv_method) {
    const mincer::FitResult fit = mincer::fit_ols(built.design, built.log_income);
    report["fit"] = mincer::fit_to_json(fit);
    report["warnings"] = warnings_json(built, nullptr);
    echo << mincer::format_fit_table(fit);
  } else {
    const mincer::DesignMatrix instruments = instrument_column(data.records, instrument);
    report["instrument"] = instruments.labels()[0];

    const mincer::FitResult ols = mincer::fit_ols(built.design, built.log_income);
    const mincer::IvFitResult iv =
        mincer::fit_2sls(built.design, built.log_income, "EDU", instruments, naive_se);
    mincer::IvDiagnostics diag = mincer::diagnose_endogeneity(built.design, built.log_income,
                                                              "EDU", instruments);

    report["fit"] = mincer::fit_to_json(iv.second_stage);
    report["first_stage"] = mincer::fit_to_json(iv.first_stage);
    report["ols_reference"] = mincer::fit_to_json(ols);
    report["diagnostics"] = mincer::diagnostics_to_json(diag);
    if (naive_se) report["naive_se"] = true;
    report["warnings"] = warnings_json(built, &diag);

    echo << "second stage (2SLS):\n" << mincer::format_fit_table(iv.second_stage);
    echo << "first stage:\n" << mincer::format_fit_table(iv.first_stage);
    echo << "hausman: stat = " << diag.hausman.stat << ", df = " << diag.hausman.df
         << ", p = " << diag.hausman.p_value
         << (diag.hausman.clamped ? " (clamped)" : "") << "\n";
    echo << "first-stage partial F = " << diag.first_stage_partial_f
         << (diag.weak_instrument ? "  [WEAK INSTRUMENT]" : "") << "\n";
  }

  emit_report(report, out_path);
  return kExitOk;
}

int cmd_diagnose(const std::string& data_path, const std::string& instrument,
                 const std::string& out_path, std::uint64_t seed, bool deterministic) {
  LoadedData data = load_and_filter(data_path);
  const mincer::BuildResult built = mincer::build_design(data.records, mincer::ModelKind::Base);
  const mincer::DesignMatrix instruments = instrument_column(data.records, instrument);

  const mincer::IvDiagnostics diag =
      mincer::diagnose_endogeneity(built.design, built.log_income, "EDU", instruments);

  json report = report_header("diagnose", seed, deterministic);
  report["inputs"] = {{"data", {{"path", data_path}, {"fnv1a64", mincer::file_digest(data_path)}}}};
  report["instrument"] = instruments.labels()[0];
  report["diagnostics"] = mincer::diagnostics_to_json(diag);
  report["data_quality"] = mincer::filter_counts_to_json(data.filter_counts);
  report["warnings"] = warnings_json(built, &diag);

  std::ostream& echo = echo_stream(out_path);
  echo << "hausman: stat = " << diag.hausman.stat << ", df = " << diag.hausman.df
       << ", p = " << diag.hausman.p_value << (diag.hausman.clamped ? " (clamped)" : "") << "\n"
       << "first-stage partial F = " << diag.first_stage_partial_f
       << (diag.weak_instrument ? "  [WEAK INSTRUMENT]" : "") << "\n";

  emit_report(report, out_path);
  return kExitOk;
}

int cmd_returns(const std::string& coefficients_path, const std::string& years_path,
                const std::string& preset, const std::string& durations,
                const std::string& format, const std::string& out_path, std::uint64_t seed,
                bool deterministic) {
  if (preset.empty() == coefficients_path.empty())
    throw mincer::SchemaError("exactly one of --preset or --coefficients is required");

  mincer::FieldDurations field_durations = mincer::FieldDurations::uniform();
  if (durations == "differentiated") {
    field_durations = mincer::FieldDurations::differentiated();
  } else if (durations != "uniform") {
    throw mincer::SchemaError("unknown durations preset '" + durations + "'");
  }

  mincer::ReturnsTable table;
  if (preset == "paper-table6") {
    const mincer::LevelPreset& p = mincer::table6_preset();
    table = mincer::build_levels_table(p.coefficients, nullptr, &p.reference);
  } else if (preset == "paper-table9") {
    const mincer::FieldPreset& p = mincer::table9_preset();
    table = mincer::build_fields_table(p.coefficients, field_durations, &p.reference);
  } else if (!preset.empty()) {
    throw mincer::SchemaError("unknown preset '" + preset +
                              "' (expected paper-table6 or paper-table9)");
  } else {
    const auto coeffs = mincer::csv::read_labeled_values_file(coefficients_path, "coefficient");
    if (coeffs.empty()) throw mincer::SchemaError(coefficients_path + ": no coefficients");
    const bool fields = mincer::field_for_dummy_label(coeffs.front().first).has_value();
    if (fields) {
      table = mincer::build_fields_table(coeffs, field_durations);
    } else {
      std::map<std::string, double> years_override;
      if (!years_path.empty()) {
        for (const auto& [label, years] : mincer::csv::read_labeled_values_file(years_path,
                                                                                 "years"))
          years_override[label] = years;
      }
      table = mincer::build_levels_table(coeffs,
                                         years_override.empty() ? nullptr : &years_override);
    }
  }

  json report = report_header("returns", seed, deterministic);
  if (!preset.empty()) report["preset"] = preset;
  if (!coefficients_path.empty()) {
    report["inputs"] = {{"coefficients",
                         {{"path", coefficients_path},
                          {"fnv1a64", mincer::file_digest(coefficients_path)}}}};
  }
  report["durations"] = durations;
  report["returns"] = mincer::returns_to_json(table);

  if (format == "table") {
    if (out_path.empty()) {
      std::cout << mincer::format_returns_table(table);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw mincer::SchemaError("cannot write '" + out_path + "'");
      out << mincer::format_returns_table(table);
    }
  } else if (format == "csv") {
    if (out_path.empty()) {
      std::cout << mincer::returns_to_csv(table);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw mincer::SchemaError("cannot write '" + out_path + "'");
      out << mincer::returns_to_csv(table);
    }
  } else if (format == "json") {
    emit_report(report, out_path);
  } else {
    throw mincer::SchemaError("unknown format '" + format + "'");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mincerlab: wage-equation estimation and simulation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic,
               "omit timestamps so identical inputs give identical bytes");
  app.add_option("--seed", seed, "master seed (default 0; overrides the config seed)")
      ->each([&](const std::string&) { seed_given = true; });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate synthetic microdata CSV");
  std::string sim_config, sim_out, sim_ability_out;
  simulate->add_option("config", sim_config, "DGP config file (key = value)")->required();
  simulate->add_option("--out", sim_out, "output CSV path")->required();
  simulate->add_option("--ability-out", sim_ability_out, "side CSV with the hidden ability");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "fit a wage equation from microdata CSV");
  std::string est_data, est_model = "base", est_method = "ols", est_instrument, est_out;
  bool est_naive_se = false;
  estimate->add_option("data", est_data, "microdata CSV path")->required();
  estimate->add_option("--model", est_model, "base | levels | fields");
  estimate->add_option("--method", est_method, "ols | 2sls");
  estimate->add_option("--instrument", est_instrument, "instrument column (2sls)");
  estimate->add_flag("--naive-se", est_naive_se,
                     "literal two-step stderrs instead of the corrected ones");
  estimate->add_option("--out", est_out, "write the JSON report here instead of stdout");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Hausman and weak-instrument diagnostics");
  std::string diag_data, diag_instrument, diag_out;
  diagnose->add_option("data", diag_data, "microdata CSV path")->required();
  diagnose->add_option("--instrument", diag_instrument, "instrument column")->required();
  diagnose->add_option("--out", diag_out, "write the JSON report here instead of stdout");

  // returns
  auto* returns = app.add_subcommand("returns", "returns-to-education transforms");
  std::string ret_coefficients, ret_years, ret_preset, ret_durations = "uniform",
              ret_format = "table", ret_out;
  returns->add_option("--coefficients", ret_coefficients, "CSV with header label,coefficient");
  returns->add_option("--years", ret_years, "CSV with header label,years (levels only)");
  returns->add_option("--preset", ret_preset, "paper-table6 | paper-table9");
  returns->add_option("--durations", ret_durations, "uniform | differentiated (fields)");
  returns->add_option("--format", ret_format, "table | csv | json");
  returns->add_option("--out", ret_out, "output path instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitInput;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(sim_config, sim_out, sim_ability_out,
                          seed_given ? std::optional(seed) : std::nullopt);
    }
    if (estimate->parsed()) {
      return cmd_estimate(est_data, est_model, est_method, est_instrument, est_naive_se, est_out,
                          seed, deterministic);
    }
    if (diagnose->parsed()) {
      return cmd_diagnose(diag_data, diag_instrument, diag_out, seed, deterministic);
    }
    if (returns->parsed()) {
      return cmd_returns(ret_coefficients, ret_years, ret_preset, ret_durations, ret_format,
                         ret_out, seed, deterministic);
    }
  } catch (const mincer::SingularDesignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const mincer::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const mincer::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
