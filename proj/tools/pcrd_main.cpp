#include "pcrd/codec_proxy.hpp"
#include "pcrd/errors.hpp"
#include "pcrd/metrics.hpp"
#include "pcrd/optimizer.hpp"
#include "pcrd/pipeline.hpp"
#include "pcrd/ply_io.hpp"
#include "pcrd/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// --config accepts inline JSON (first non-space character '{') or a path
json load_config(const std::string& arg) {
    std::string text = arg;
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || arg[first] != '{') {
        std::ifstream in(arg);
        if (!in) throw pcrd::ParseError("cannot open config file: " + arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw pcrd::ParseError(std::string("config is not valid JSON: ") + e.what());
    }
}

struct Settings {
    pcrd::ProxyCodecConfig proxy;
    pcrd::SolverConfig solver;
    pcrd::MetricsConfig metrics;
};

// flat key -> field overrides; unknown keys are errors so typos surface
void apply_config(const json& cfg, Settings& s) {
    if (!cfg.is_object()) throw pcrd::ParseError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        try {
            if (key == "frame_rate")
                s.proxy.frame_rate = value.get<double>();
            else if (key == "rng_seed")
                s.proxy.rng_seed = value.get<std::uint64_t>();
            else if (key == "normals_k")
                s.metrics.normals_k = value.get<int>();
            else if (key == "alpha")
                s.solver.alpha = value.get<double>();
            else if (key == "rho0")
                s.solver.rho0 = value.get<double>();
            else if (key == "lambda0")
                s.solver.lambda0 = value.get<double>();
            else if (key == "gamma")
                s.solver.gamma = value.get<double>();
            else if (key == "outer_tol")
                s.solver.outer_tol = value.get<double>();
            else if (key == "inner_tol")
                s.solver.inner_tol = value.get<double>();
            else if (key == "qp_min")
                s.solver.qp_min = value.get<double>();
            else if (key == "qp_max")
                s.solver.qp_max = value.get<double>();
            else if (key == "q_init")
                s.solver.q_init = value.get<double>();
            else if (key == "max_outer")
                s.solver.max_outer = value.get<int>();
            else if (key == "max_inner")
                s.solver.max_inner = value.get<long>();
            else if (key == "feasibility_slack")
                s.solver.feasibility_slack = value.get<double>();
            else
                throw pcrd::ParseError("config: unknown key '" + key + "'");
        } catch (const json::exception& e) {
            throw pcrd::ParseError("config key '" + key + "': " + e.what());
        }
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw pcrd::ParseError("cannot open for writing: " + out_path);
    out << text;
    if (!out) throw pcrd::ParseError("write failed: " + out_path);
}

pcrd::RdModels models_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pcrd::ParseError("cannot open models file: " + path);
    try {
        return json::parse(in).get<pcrd::RdModels>();
    } catch (const json::exception& e) {
        throw pcrd::ParseError("models file " + path + ": " + e.what());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"point cloud rate-distortion toolkit"};
    app.require_subcommand(1);

    std::string config_arg, out_path;
    std::optional<double> frame_rate_flag;
    std::optional<int> normals_k_flag;
    std::vector<double> target_rates;

    app.add_option("--config", config_arg,
                   "JSON object (inline or a file path) overriding solver/codec settings");
    app.add_option("--out", out_path, "write output here instead of stdout");
    app.add_option("--frame-rate", frame_rate_flag, "frames per second for bit-rate conversion");
    app.add_option("--normals-k", normals_k_flag, "neighborhood size for normal estimation");

    std::string ref_path, test_path, input_path, measurements_path, models_path;

    auto* cmd_metrics = app.add_subcommand("metrics", "distortion report for a cloud pair");
    cmd_metrics->add_option("reference", ref_path, "reference .ply")->required();
    cmd_metrics->add_option("test", test_path, "test .ply")->required();

    auto* cmd_sweep = app.add_subcommand("sweep", "nine-pair pre-encoding measurements");
    cmd_sweep->add_option("input", input_path, "input .ply")->required();

    auto* cmd_fit = app.add_subcommand("fit", "fit rate/distortion models from measurements");
    cmd_fit->add_option("measurements", measurements_path, "measurements .csv")->required();

    auto* cmd_optimize = app.add_subcommand("optimize", "select QPs for a bit-rate budget");
    cmd_optimize->add_option("models", models_path, "models .json")->required();

    auto* cmd_pipeline = app.add_subcommand("pipeline", "sweep, fit and optimize per budget");
    cmd_pipeline->add_option("input", input_path, "input .ply")->required();

    for (auto* cmd : {cmd_optimize, cmd_pipeline})
        cmd->add_option("--target-rate", target_rates, "bit-rate budget in Mbps (repeatable)");

    // shared flags may appear after the subcommand name
    for (auto* cmd : {cmd_metrics, cmd_sweep, cmd_fit, cmd_optimize, cmd_pipeline})
        cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    Settings settings;
    if (!config_arg.empty()) apply_config(load_config(config_arg), settings);
    // explicit flags win over --config
    if (frame_rate_flag) settings.proxy.frame_rate = *frame_rate_flag;
    if (normals_k_flag) settings.metrics.normals_k = *normals_k_flag;

    if (cmd_metrics->parsed()) {
        const pcrd::PointCloud ref = pcrd::load_ply(ref_path);
        const pcrd::PointCloud test = pcrd::load_ply(test_path);
        const json report = pcrd::full_report(ref, test, settings.metrics);
        emit(report.dump(2) + "\n", out_path);
        return 0;
    }
    if (cmd_sweep->parsed()) {
        const pcrd::PointCloud cloud = pcrd::load_ply(input_path);
        const auto sweep = pcrd::preencode_sweep(cloud, settings.proxy, settings.metrics);
        emit(pcrd::measurements_to_csv(sweep), out_path);
        return 0;
    }
    if (cmd_fit->parsed()) {
        const auto measurements = pcrd::ingest_csv(measurements_path);
        const json models = pcrd::fit(measurements);
        emit(models.dump(2) + "\n", out_path);
        return 0;
    }
    if (cmd_optimize->parsed()) {
        if (target_rates.size() != 1)
            throw pcrd::ParseError("optimize needs exactly one --target-rate");
        const pcrd::RdModels models = models_from_json_file(models_path);
        const json result = pcrd::solve(models, target_rates[0], settings.solver);
        emit(result.dump(2) + "\n", out_path);
        return 0;
    }
    if (cmd_pipeline->parsed()) {
        if (target_rates.empty())
            throw pcrd::ParseError("pipeline needs at least one --target-rate");
        const pcrd::PointCloud cloud = pcrd::load_ply(input_path);
        const auto result = pcrd::run_pipeline(cloud, target_rates, settings.proxy,
                                               settings.solver, settings.metrics);
        emit(pcrd::pipeline_to_csv(result.rows), out_path);
        return 0;
    }
    throw pcrd::InternalError("no subcommand dispatched");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const pcrd::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pcrd::FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pcrd::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pcrd::SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
