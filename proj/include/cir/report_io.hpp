#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cir/experiments.hpp"

namespace cir {
namespace report_io {

// (key, value) pairs echoed verbatim into every artifact for provenance.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Full round-trip precision, '.' decimal separator.
std::string format_number(double x);

nlohmann::ordered_json to_json(const ErrorReport& report, const ConfigEcho& config);
nlohmann::ordered_json to_json(const SignFlipReport& report, const ConfigEcho& config);

// CSV bodies use '\n' line endings; config and version ride along as leading
// '#' comment lines, then the mandatory header row.
std::string ladder_csv(const ErrorReport& report, const ConfigEcho& config);
std::string signflip_csv(const SignFlipReport& report, const ConfigEcho& config);

std::string csv_preamble(const ConfigEcho& config);

}  // namespace report_io
}  // namespace cir
