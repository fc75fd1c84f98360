#include "cir/report_io.hpp"

#include <cstdio>
#include <sstream>

#include "cir/version.hpp"

namespace cir {
namespace report_io {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

nlohmann::ordered_json config_json(const ConfigEcho& config) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config) j[key] = value;
    return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ErrorReport& report, const ConfigEcho& config) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["version"] = kVersion;
    j["config"] = config_json(config);
    j["scheme"] = to_string(report.scheme.kind);
    if (report.scheme.a) j["a"] = *report.scheme.a;
    j["n_paths"] = report.n_paths;
    j["seed"] = report.seed;
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const auto& lvl : report.ladder) {
        nlohmann::ordered_json row;
        row["delta"] = lvl.delta;
        if (lvl.skipped) {
            row["skipped"] = true;
            row["note"] = lvl.note;
        } else {
            row["strong_error_l2"] = lvl.strong_error_l2;
            row["std_error"] = lvl.std_error;
            row["weak_mean_error"] = lvl.weak_mean_error;
            row["weak_var_error"] = lvl.weak_var_error;
            row["weak_mean_error2"] = lvl.weak_mean_error2;
            row["mean_std_error"] = lvl.mean_std_error;
            row["mean_std_error2"] = lvl.mean_std_error2;
        }
        ladder.push_back(row);
    }
    j["ladder"] = ladder;
    j["fitted_order"] = report.fitted_order;
    j["fit_residual"] = report.fit_residual;
    j["guard_exceedances"] = report.guard_exceedances;
    j["runtime_seconds"] = report.runtime_seconds;
    return j;
}

nlohmann::ordered_json to_json(const SignFlipReport& report, const ConfigEcho& config) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["version"] = kVersion;
    j["config"] = config_json(config);
    j["n_paths"] = report.n_paths;
    j["seed"] = report.seed;
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const auto& lvl : report.ladder) {
        nlohmann::ordered_json row;
        row["delta"] = lvl.delta;
        row["flip_fraction"] = lvl.flip_fraction;
        row["flip_fraction_se"] = lvl.flip_fraction_se;
        row["weighted_stat"] = lvl.weighted_stat;
        row["weighted_stat_se"] = lvl.weighted_stat_se;
        ladder.push_back(row);
    }
    j["ladder"] = ladder;
    j["runtime_seconds"] = report.runtime_seconds;
    return j;
}

std::string csv_preamble(const ConfigEcho& config) {
    std::ostringstream os;
    os << "# version=" << kVersion << "\n";
    for (const auto& [key, value] : config) os << "# " << key << "=" << value << "\n";
    return os.str();
}

std::string ladder_csv(const ErrorReport& report, const ConfigEcho& config) {
    std::ostringstream os;
    os << csv_preamble(config);
    os << "delta,strong_error,std_error\n";
    for (const auto& lvl : report.ladder) {
        if (lvl.skipped) continue;
        os << format_number(lvl.delta) << "," << format_number(lvl.strong_error_l2) << ","
           << format_number(lvl.std_error) << "\n";
    }
    return os.str();
}

std::string signflip_csv(const SignFlipReport& report, const ConfigEcho& config) {
    std::ostringstream os;
    os << csv_preamble(config);
    os << "delta,flip_fraction\n";
    for (const auto& lvl : report.ladder) {
        os << format_number(lvl.delta) << "," << format_number(lvl.flip_fraction) << "\n";
    }
    return os.str();
}

}  // namespace report_io
}  // namespace cir
