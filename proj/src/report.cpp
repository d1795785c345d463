#include "mincerlab/report.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mincerlab/errors.hpp"

namespace mincer {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "' for digest");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64_hex(buf.str());
}

nlohmann::json fit_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["labels"] = fit.column_labels;
  j["coefficients"] = fit.coefficients;
  j["stderrs"] = fit.stderrs;
  j["t_stats"] = fit.t_stats;
  j["p_values"] = fit.p_values;
  j["sigma2"] = fit.sigma2;
  j["rss"] = fit.rss;
  j["r_squared"] = fit.r_squared;
  j["adj_r_squared"] = fit.adj_r_squared;
  j["n"] = fit.n;
  j["k"] = fit.k;
  if (fit.degenerate_response) j["degenerate_response"] = true;
  return j;
}

nlohmann::json hausman_to_json(const HausmanResult& h) {
  nlohmann::json j;
  j["stat"] = h.stat;
  j["df"] = h.df;
  j["p_value"] = h.p_value;
  j["clamped"] = h.clamped;
  return j;
}

nlohmann::json diagnostics_to_json(const IvDiagnostics& d) {
  nlohmann::json j;
  j["hausman"] = hausman_to_json(d.hausman);
  j["first_stage_partial_f"] = d.first_stage_partial_f;
  j["weak_instrument"] = d.weak_instrument;
  return j;
}

nlohmann::json returns_to_json(const ReturnsTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReturnsRow& r : t.rows) {
    nlohmann::json j;
    j["label"] = r.label;
    j["coefficient"] = r.coefficient;
    j["years"] = r.years;
    j["relative_effect_pct"] = r.relative_effect;
    j["annualized_rate_pct"] = r.annualized_rate;
    if (r.published_relative) j["published_relative_pct"] = *r.published_relative;
    if (r.published_annualized) j["published_annualized_pct"] = *r.published_annualized;
    j["flagged"] = r.flagged;
    rows.push_back(std::move(j));
  }
  nlohmann::json inc = nlohmann::json::array();
  for (const IncrementalRow& r : t.incremental) {
    nlohmann::json j;
    j["label_hi"] = r.label_hi;
    j["label_lo"] = r.label_lo;
    j["rate_pct"] = r.rate;
    if (r.published_rate) j["published_rate_pct"] = *r.published_rate;
    j["flagged"] = r.flagged;
    inc.push_back(std::move(j));
  }
  nlohmann::json out;
  out["rows"] = std::move(rows);
  out["incremental"] = std::move(inc);
  return out;
}

nlohmann::json filter_counts_to_json(const FilterCounts& c) {
  nlohmann::json j;
  j["rows_read"] = c.total_in;
  j["rows_kept"] = c.kept;
  j["dropped_age"] = c.dropped_age;
  j["dropped_employment"] = c.dropped_employment;
  j["dropped_income"] = c.dropped_income;
  return j;
}

std::string returns_to_csv(const ReturnsTable& t) {
  std::ostringstream out;
  out << "label,coefficient,years,relative_effect_pct,annualized_rate_pct,flagged\n";
  out << std::setprecision(17);
  for (const ReturnsRow& r : t.rows) {
    out << r.label << ',' << r.coefficient << ',' << r.years << ',' << r.relative_effect << ','
        << r.annualized_rate << ',' << (r.flagged ? 1 : 0) << "\n";
  }
  if (!t.incremental.empty()) {
    out << "label_hi,label_lo,rate_pct,flagged\n";
    for (const IncrementalRow& r : t.incremental) {
      out << r.label_hi << ',' << r.label_lo << ',' << r.rate << ',' << (r.flagged ? 1 : 0)
          << "\n";
    }
  }
  return out.str();
}

namespace {

const char* significance_marks(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.10) return ".";
  return "";
}

}  // namespace

std::string format_fit_table(const FitResult& fit) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "term" << std::right << std::setw(14) << "estimate"
      << std::setw(14) << "std.error" << std::setw(12) << "t" << std::setw(12) << "p" << "\n";
  for (std::size_t j = 0; j < fit.k; ++j) {
    out << std::left << std::setw(12) << fit.column_labels[j] << std::right << std::fixed
        << std::setprecision(6) << std::setw(14) << fit.coefficients[j] << std::setw(14)
        << fit.stderrs[j] << std::setprecision(3) << std::setw(12) << fit.t_stats[j]
        << std::setprecision(5) << std::setw(12) << fit.p_values[j] << ' '
        << significance_marks(fit.p_values[j]) << "\n";
    out.unsetf(std::ios::fixed);
  }
  out << "n = " << fit.n << ", R^2 = " << std::fixed << std::setprecision(4) << fit.r_squared
      << ", adj R^2 = " << fit.adj_r_squared << ", sigma^2 = " << std::setprecision(6)
      << fit.sigma2 << "\n";
  out.unsetf(std::ios::fixed);
  return out.str();
}

std::string format_returns_table(const ReturnsTable& t) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "label" << std::right << std::setw(8) << "coef"
      << std::setw(7) << "years" << std::setw(12) << "relative%" << std::setw(14)
      << "annualized%" << "  note\n";
  for (const ReturnsRow& r : t.rows) {
    out << std::left << std::setw(10) << r.label << std::right << std::fixed
        << std::setprecision(3) << std::setw(8) << r.coefficient << std::setprecision(0)
        << std::setw(7) << r.years << std::setprecision(2) << std::setw(12) << r.relative_effect
        << std::setw(14) << r.annualized_rate;
    if (r.flagged && r.published_annualized) {
      out << "  differs from published " << std::setprecision(2) << *r.published_annualized;
    } else if (r.flagged && r.published_relative) {
      out << "  differs from published " << std::setprecision(2) << *r.published_relative;
    }
    out << "\n";
    out.unsetf(std::ios::fixed);
  }
  if (!t.incremental.empty()) {
    out << "incremental (per extra year):\n";
    for (const IncrementalRow& r : t.incremental) {
      out << "  " << std::left << std::setw(10) << r.label_hi << "vs " << std::setw(10)
          << r.label_lo << std::right << std::fixed << std::setprecision(2) << std::setw(10)
          << r.rate;
      if (r.flagged && r.published_rate) {
        out << "  differs from published " << std::setprecision(2) << *r.published_rate;
      }
      out << "\n";
      out.unsetf(std::ios::fixed);
    }
  }
  return out.str();
}

}  // namespace mincer
