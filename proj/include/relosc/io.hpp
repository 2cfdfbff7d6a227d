#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "relosc/classify.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/kneser.hpp"
#include "relosc/pruefer.hpp"
#include "relosc/relative.hpp"
#include "relosc/spectra.hpp"

namespace relosc {

/// Insertion-ordered so that reports serialize byte-identically.
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

/// Parses JSON text; syntax errors become ConfigError with line and column.
Json parse_json(std::string_view text, std::string_view source = "<input>");
Json read_json_file(const std::string& path);

/// 64-bit FNV-1a, used as the config hash.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// {"family": ..., "params": {...}, "interval": {"a": ..., "b": number | "inf"}}.
/// Unknown keys and wrong types are ConfigErrors naming the JSON path.
CoefficientSet coefficients_from_json(const Json& j, const std::string& path = "");
Json to_json(const CoefficientSet& c);

Json to_json(const Tolerances& t);
Json to_json(const WindowPolicy& p);
Json to_json(const SolutionTrace& t);
Json to_json(const OscVerdict& v);
Json to_json(const KneserReport& r);
Json to_json(const AlphaBetaReport& r);
Json to_json(const InvarianceReport& r);
Json to_json(const LimitPointReport& r);
Json to_json(const EigenCount& c);
Json to_json(const AccumulationStudy& s);

/// CSV writers. Each header line is prefixed "# ", then one column row.
void write_csv_header(std::ostream& os, std::string_view header);
void write_trace_csv(std::ostream& os, const SolutionTrace& t, std::string_view header);
void write_relative_csv(std::ostream& os, const RelativeTrace& rt, std::span<const double> grid,
                        std::string_view header);
void write_windows_csv(std::ostream& os, const OscVerdict& v, std::string_view header);
void write_kneser_csv(std::ostream& os, const KneserReport& r, std::string_view header);
void write_accumulation_csv(std::ostream& os, const AccumulationStudy& s, std::string_view header);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for the rest.
std::string format_number(double v);

}  // namespace relosc
