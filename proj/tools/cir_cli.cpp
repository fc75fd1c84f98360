#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cir/experiments.hpp"
#include "cir/params.hpp"
#include "cir/report_io.hpp"
#include "cir/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

struct RunConfig {
    std::string scheme = "sd";
    double a = 0.0;
    bool a_set = false;
    double k = 0.0, l = 0.0, sigma = 0.0, x0 = 0.0;
    double lambda11 = 0.0, lambda12 = 0.0, lambda21 = 0.0, lambda22 = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0, x10 = 0.0, x20 = 0.0;
    double t_max = 1.0;
    int steps = 100;
    int paths = 1;
    std::uint64_t seed = 0;
    int levels = 4;
    std::string mode = "strong";
    std::string out = "report";
    std::string format = "csv";
    int workers = 0;  // 0 = library default
};

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--scheme", cfg.scheme,
                    "sd | split | exact | euler | tf-split | tf-squared | tf-cross");
    cmd->add_option("--a", cfg.a, "implicitness weight (sd only)")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--k", cfg.k);
    cmd->add_option("--l", cfg.l);
    cmd->add_option("--sigma", cfg.sigma);
    cmd->add_option("--x0", cfg.x0);
    cmd->add_option("--lambda11", cfg.lambda11);
    cmd->add_option("--lambda12", cfg.lambda12);
    cmd->add_option("--lambda21", cfg.lambda21);
    cmd->add_option("--lambda22", cfg.lambda22);
    cmd->add_option("--sigma1", cfg.sigma1);
    cmd->add_option("--sigma2", cfg.sigma2);
    cmd->add_option("--x10", cfg.x10);
    cmd->add_option("--x20", cfg.x20);
    cmd->add_option("--t-max", cfg.t_max);
    cmd->add_option("--steps", cfg.steps);
    cmd->add_option("--seed", cfg.seed);
}

std::string fmt(double x) { return cir::report_io::format_number(x); }

cir::report_io::ConfigEcho echo_config(const std::string& subcommand, const RunConfig& c) {
    cir::report_io::ConfigEcho e;
    e.emplace_back("subcommand", subcommand);
    e.emplace_back("scheme", c.scheme);
    if (c.scheme == "sd") e.emplace_back("a", fmt(c.a));
    const bool two = c.scheme.rfind("tf-", 0) == 0;
    if (two) {
        e.emplace_back("k", fmt(c.k));
        e.emplace_back("l", fmt(c.l));
        e.emplace_back("lambda11", fmt(c.lambda11));
        e.emplace_back("lambda12", fmt(c.lambda12));
        e.emplace_back("lambda21", fmt(c.lambda21));
        e.emplace_back("lambda22", fmt(c.lambda22));
        e.emplace_back("sigma1", fmt(c.sigma1));
        e.emplace_back("sigma2", fmt(c.sigma2));
        e.emplace_back("x10", fmt(c.x10));
        e.emplace_back("x20", fmt(c.x20));
    } else {
        e.emplace_back("k", fmt(c.k));
        e.emplace_back("l", fmt(c.l));
        e.emplace_back("sigma", fmt(c.sigma));
        e.emplace_back("x0", fmt(c.x0));
    }
    e.emplace_back("t_max", fmt(c.t_max));
    e.emplace_back("steps", std::to_string(c.steps));
    e.emplace_back("paths", std::to_string(c.paths));
    e.emplace_back("seed", std::to_string(c.seed));
    e.emplace_back("levels", std::to_string(c.levels));
    e.emplace_back("mode", c.mode);
    e.emplace_back("format", c.format);
    return e;
}

cir::SchemeSpec make_spec(const RunConfig& c) {
    const auto kind = cir::scheme_kind_from_string(c.scheme);
    if (!kind) throw cir::UsageError("unknown scheme '" + c.scheme + "'");
    if (*kind == cir::SchemeKind::SemiDiscreteSquared) return cir::SchemeSpec::semi_discrete(c.a);
    return cir::SchemeSpec::of(*kind);
}

cir::CirParams one_factor_params(const RunConfig& c) {
    return cir::CirParams(c.k, c.l, c.sigma, c.x0);
}

cir::TwoFactorParams two_factor_params(const RunConfig& c) {
    return cir::TwoFactorParams(c.k, c.l, c.lambda11, c.lambda12, c.lambda21, c.lambda22,
                                c.sigma1, c.sigma2, c.x10, c.x20);
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << body;
    if (!out) throw std::ios_base::failure("write failed for " + path);
}

int cmd_validate(const RunConfig& c) {
    const cir::SchemeSpec spec = make_spec(c);
    const cir::GridSpec g(c.t_max, c.steps);
    cir::ValidityVerdict v = cir::is_two_factor(spec.kind)
                                 ? cir::validate_two_factor(two_factor_params(c), g, spec.kind)
                                 : cir::validate(one_factor_params(c), g, spec);
    std::cout << v.describe() << "\n";
    return v ? kExitOk : kExitDomain;
}

int cmd_simulate(const RunConfig& c) {
    const cir::SchemeSpec spec = make_spec(c);
    const cir::GridSpec g(c.t_max, c.steps);
    const auto config = echo_config("simulate", c);
    const bool two = cir::is_two_factor(spec.kind);

    if (!two) {
        const cir::ValidityVerdict v = cir::validate(one_factor_params(c), g, spec);
        if (!v) {
            std::cerr << v.describe() << "\n";
            return kExitDomain;
        }
    } else if (spec.kind != cir::SchemeKind::TwoFactorCrossDiffusion) {
        const cir::ValidityVerdict v = cir::validate_two_factor(two_factor_params(c), g, spec.kind);
        if (!v) {
            std::cerr << v.describe() << "\n";
            return kExitDomain;
        }
    }

    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["schema"] = 1;
        j["version"] = cir::kVersion;
        auto cfg = nlohmann::ordered_json::object();
        for (const auto& [key, value] : config) cfg[key] = value;
        j["config"] = cfg;
        auto rows = nlohmann::ordered_json::array();
        for (int p = 0; p < c.paths; ++p) {
            cir::SeedSpec seed{c.seed, std::uint32_t(p), 0};
            if (two) {
                const auto r = cir::simulate_pair_path(two_factor_params(c), g, spec, seed);
                for (std::size_t i = 0; i < r.times.size(); ++i) {
                    rows.push_back({p, r.times[i], r.values1[i], r.values2[i]});
                }
            } else {
                const auto r = cir::simulate_path(one_factor_params(c), g, spec, seed);
                for (std::size_t i = 0; i < r.times.size(); ++i) {
                    rows.push_back({p, r.times[i], r.values[i]});
                }
            }
        }
        j["rows"] = rows;
        write_file(c.out, j.dump(2) + "\n");
        return kExitOk;
    }

    std::ostringstream os;
    os << cir::report_io::csv_preamble(config);
    os << (two ? "path_id,t,y1,y2\n" : "path_id,t,y\n");
    for (int p = 0; p < c.paths; ++p) {
        cir::SeedSpec seed{c.seed, std::uint32_t(p), 0};
        if (two) {
            const auto r = cir::simulate_pair_path(two_factor_params(c), g, spec, seed);
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                os << p << "," << fmt(r.times[i]) << "," << fmt(r.values1[i]) << ","
                   << fmt(r.values2[i]) << "\n";
            }
        } else {
            const auto r = cir::simulate_path(one_factor_params(c), g, spec, seed);
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                os << p << "," << fmt(r.times[i]) << "," << fmt(r.values[i]) << "\n";
            }
        }
    }
    write_file(c.out, os.str());
    return kExitOk;
}

int cmd_converge(const RunConfig& c) {
    const cir::SchemeSpec spec = make_spec(c);
    const cir::GridSpec g(c.t_max, c.steps);
    const auto config = echo_config("converge", c);

    cir::ErrorReport report;
    if (c.mode == "strong") {
        if (c.levels < 3) {
            std::cerr << "strong convergence needs --levels >= 3\n";
            return kExitDomain;
        }
        report = cir::strong_self_convergence(one_factor_params(c), g, c.levels, spec,
                                              c.paths, c.seed);
    } else if (c.mode == "weak") {
        if (cir::is_two_factor(spec.kind)) {
            report = cir::weak_moment_error(two_factor_params(c), g, spec, c.paths, c.seed);
        } else {
            const cir::ValidityVerdict v = cir::validate(one_factor_params(c), g, spec);
            if (!v) {
                std::cerr << v.describe() << "\n";
                return kExitDomain;
            }
            report = cir::weak_moment_error(one_factor_params(c), g, spec, c.paths, c.seed);
        }
    } else {
        throw cir::UsageError("--mode must be strong or weak");
    }

    write_file(c.out + ".json", cir::report_io::to_json(report, config).dump(2) + "\n");
    write_file(c.out + ".csv", cir::report_io::ladder_csv(report, config));
    std::cout << "fitted_order " << report.fitted_order << "\n";
    return kExitOk;
}

int cmd_signflip(const RunConfig& c) {
    const auto kind = cir::scheme_kind_from_string(c.scheme);
    if (!kind) throw cir::UsageError("unknown scheme '" + c.scheme + "'");
    if (*kind != cir::SchemeKind::SemiDiscreteSquared) {
        std::cerr << "signflip applies to the sd scheme only\n";
        return kExitDomain;
    }
    if (!(c.x0 > 0.0)) {
        std::cerr << "signflip requires --x0 > 0\n";
        return kExitDomain;
    }
    const cir::GridSpec g(c.t_max, c.steps);
    const auto config = echo_config("signflip", c);
    const cir::SignFlipReport report =
        cir::sign_flip_study(one_factor_params(c), g, c.levels, c.a, c.paths, c.seed);
    write_file(c.out + ".json", cir::report_io::to_json(report, config).dump(2) + "\n");
    write_file(c.out + ".csv", cir::report_io::signflip_csv(report, config));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"positivity-preserving CIR scheme toolkit"};
    app.set_version_flag("--version", cir::kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    CLI::App* validate = app.add_subcommand("validate", "check scheme validity gates");
    CLI::App* simulate = app.add_subcommand("simulate", "write sample paths as CSV/JSON");
    CLI::App* converge = app.add_subcommand("converge", "strong/weak convergence ladder");
    CLI::App* signflip = app.add_subcommand("signflip", "sign-flip fraction over a delta ladder");
    for (CLI::App* cmd : {validate, simulate, converge, signflip}) add_model_flags(cmd, cfg);
    for (CLI::App* cmd : {simulate, converge, signflip}) {
        cmd->add_option("--paths", cfg.paths);
        cmd->add_option("--out", cfg.out);
    }
    simulate->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
    converge->add_option("--levels", cfg.levels);
    converge->add_option("--mode", cfg.mode)->check(CLI::IsMember({"strong", "weak"}));
    signflip->add_option("--levels", cfg.levels);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (converge->parsed()) return cmd_converge(cfg);
        if (signflip->parsed()) return cmd_signflip(cfg);
        return kExitUsage;
    } catch (const cir::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cir::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
