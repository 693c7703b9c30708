// Command-line experiment runner: validates a JSON config, runs the named
// experiment and writes metrics.csv / report.csv (and optional SVG plots).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "wfp/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void emit_error(const std::string& code, const std::string& detail) {
    json err;
    err["error"]["code"] = code;
    err["error"]["detail"] = detail;
    std::cout << err.dump() << std::endl;
}

// Strict parse: unknown keys anywhere are rejected before any compute.
wfp::ExperimentConfig parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

    static const std::vector<std::string> allowed = {"schema_version", "experiment", "seed",
                                                     "output_dir", "params"};
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::runtime_error("unknown config key '" + key + "'");

    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != 1)
        throw std::runtime_error("config requires \"schema_version\": 1");
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw std::runtime_error("config requires a string \"experiment\"");

    wfp::ExperimentConfig cfg;
    cfg.experiment = j["experiment"].get<std::string>();
    const wfp::ExperimentInfo* info = wfp::find_experiment(cfg.experiment);
    if (!info) throw std::runtime_error("unknown experiment '" + cfg.experiment + "'");

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw std::runtime_error("\"seed\" must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string())
            throw std::runtime_error("\"output_dir\" must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw std::runtime_error("\"params\" must be an object");
        for (const auto& [key, value] : j["params"].items()) {
            if (value.is_string()) {
                const auto it = info->choices.find(key);
                if (it == info->choices.end())
                    throw std::runtime_error("unknown selection '" + key + "' for experiment '" +
                                             cfg.experiment + "'");
                const std::string v = value.get<std::string>();
                if (std::find(it->second.begin(), it->second.end(), v) == it->second.end())
                    throw std::runtime_error("selection '" + key + "' does not allow '" + v +
                                             "'");
                cfg.selections[key] = v;
                continue;
            }
            if (!info->defaults.count(key))
                throw std::runtime_error("unknown parameter '" + key + "' for experiment '" +
                                         cfg.experiment + "'");
            if (!value.is_number())
                throw std::runtime_error("parameter '" + key + "' must be numeric");
            cfg.params[key] = value.get<double>();
        }
    }
    return cfg;
}

int cmd_run(const std::string& config_path, bool plots, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed) {
    wfp::ExperimentConfig cfg;
    try {
        cfg = parse_config(config_path);
    } catch (const std::exception& e) {
        emit_error("ConfigError", e.what());
        return kExitConfig;
    }
    if (out) cfg.output_dir = *out;
    if (seed) cfg.seed = *seed;

    wfp::ExperimentResult result;
    try {
        result = wfp::run_experiment(cfg);
    } catch (const wfp::Error& e) {
        emit_error(e.code(), e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return kExitNumerical;
    }

    // all computation succeeded; only now touch the filesystem
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::exists(dir)) {
        emit_error("OutputError", "cannot create output directory '" + dir.string() + "'");
        return kExitNumerical;
    }
    {
        std::ofstream m(dir / "metrics.csv");
        wfp::write_metrics_csv(result.metrics, m);
        std::ofstream r(dir / "report.csv");
        wfp::write_report_csv(result.report, r);
    }
    std::cout << "wrote " << (dir / "metrics.csv").string() << "\n";
    std::cout << "wrote " << (dir / "report.csv").string() << "\n";
    for (const auto& [name, content] : result.files) {
        std::ofstream f(dir / name);
        f << content;
        std::cout << "wrote " << (dir / name).string() << "\n";
    }
    if (plots) {
        for (const auto& plot : result.plots) {
            std::ofstream p(dir / plot.filename);
            wfp::write_svg_plot(plot, result.metrics, p);
            std::cout << "wrote " << (dir / plot.filename).string() << "\n";
        }
    }
    return 0;
}

int cmd_list(bool csv) {
    const auto& registry = wfp::experiment_registry();
    if (csv) {
        std::cout << "experiment,checks\n";
        for (const auto& info : registry) {
            std::string checks = info.checks;
            std::replace(checks.begin(), checks.end(), ',', ';');
            std::cout << info.name << ',' << checks << '\n';
        }
        return 0;
    }
    for (const auto& info : registry) {
        std::cout << info.name << "\n    " << info.checks << "\n    defaults:";
        for (const auto& [k, v] : info.defaults) std::cout << ' ' << k << '=' << v;
        for (const auto& [k, allowed] : info.choices) {
            std::cout << ' ' << k << '=' << allowed.front() << " (";
            for (size_t i = 0; i < allowed.size(); ++i)
                std::cout << (i ? "|" : "") << allowed[i];
            std::cout << ')';
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein convergence toolkit for Fokker-Planck equations"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    std::string config_path;
    bool plots = false;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_flag("--plots", plots, "also write SVG line plots");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--seed", seed_override, "override the seed");

    bool list_csv = false;
    CLI::App* list = app.add_subcommand("list", "list the built-in experiments");
    list->add_flag("--csv", list_csv, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, plots, out_dir, seed_override);
    if (list->parsed()) return cmd_list(list_csv);
    std::cout << app.help();
    return 0;
}
