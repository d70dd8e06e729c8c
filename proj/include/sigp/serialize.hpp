#pragma once

// JSON, CSV and binary encodings of the library's values.

#include "sigp/analysis.hpp"
#include "sigp/flows.hpp"
#include "sigp/gaussian.hpp"
#include "sigp/regularity.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace sigp {

using Json = nlohmann::ordered_json;

/// Exact decimal expansion when x = m / 2^k with k <= 32, otherwise an
/// empty string.
std::string exact_dyadic_decimal(double x);

/// A coordinate as an exact decimal string when dyadic, else a JSON number.
Json coordinate_to_json(double x);
double coordinate_from_json(const Json& j);

Json to_json(const Point& p);
Point point_from_json(const Json& j);

Json to_json(const Rect& r);
Rect rect_from_json(const Json& j);

Json to_json(const CSet& c);
CSet cset_from_json(const Json& j);

Json to_json(const CovModel& m);
CovModel model_from_json(const Json& j);

Json to_json(const ElementaryFlow& f);
ElementaryFlow elementary_flow_from_json(const Json& j);
Json to_json(const SimpleFlow& f);
/// Accepts {"breakpoints": ...} (one segment) or {"segments": [...]}.
SimpleFlow simple_flow_from_json(const Json& j);

Json to_json(const ExponentReport& r);
Json to_json(const KolmogorovReport& r);
Json to_json(const AssumptionReport& r);
Json to_json(const SummabilityDiagnostic& d);
Json to_json(const UnboundedDemoReport& r);

/// Comma-separated summary row of an ExponentReport and its header.
std::string exponent_csv_header();
std::string exponent_csv_row(const ExponentReport& r);

/// Double as the shortest text that reads back to the same value.
std::string format_double(double x);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// "# config: <json>" line, then a header with one quoted set JSON per
/// column, then one row per replicate.
void write_path_csv(std::ostream& out, const SamplePath& path, const Json& config);
SamplePath read_path_csv(std::istream& in);

/// "SIDX1", then little-endian u64 fields and IEEE doubles.
void write_path_binary(std::ostream& out, const SamplePath& path);
SamplePath read_path_binary(std::istream& in);

} // namespace sigp
