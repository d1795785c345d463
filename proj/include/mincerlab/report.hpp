#pragma once

#include <string>

#include <json.hpp>

#include "mincerlab/iv.hpp"
#include "mincerlab/model_spec.hpp"
#include "mincerlab/regression.hpp"
#include "mincerlab/returns.hpp"

namespace mincer {

/// FNV-1a 64-bit digest of a byte string, as lowercase hex.
std::string fnv1a64_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

/// FitResult as JSON (residual vector omitted; reports stay small even at
/// census-scale n).
nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json hausman_to_json(const HausmanResult& h);
nlohmann::json diagnostics_to_json(const IvDiagnostics& d);
nlohmann::json returns_to_json(const ReturnsTable& t);
nlohmann::json filter_counts_to_json(const FilterCounts& c);

std::string returns_to_csv(const ReturnsTable& t);

/// Aligned human-readable coefficient table with significance marks.
std::string format_fit_table(const FitResult& fit);
std::string format_returns_table(const ReturnsTable& t);

}  // namespace mincer
