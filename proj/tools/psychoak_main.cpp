// Command-line surface of the drone-noise annoyance pipeline. Stages are
// file-based and idempotent: ingest -> sqm -> pa -> dataset -> correlate ->
// train -> validate -> report, plus a fixtures generator for self-contained
// runs.
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "psychoak/dataset.hpp"
#include "psychoak/errors.hpp"
#include "psychoak/fixtures.hpp"
#include "psychoak/pipeline.hpp"

using namespace psychoak;

namespace {

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Input:
            return 2;
        case ErrorCategory::Processing:
            return 3;
        case ErrorCategory::Prerequisite:
            return 4;
        case ErrorCategory::Internal:
            return 5;
    }
    return 5;
}

std::string default_workspace() {
    const char* env = std::getenv("PSYCHOAK_WORKSPACE");
    return env ? env : "workspace";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"psychoak: drone noise -> sound quality metrics -> annoyance models"};
    app.require_subcommand(1);

    std::string workspace = default_workspace();
    std::string config_path;
    std::uint64_t seed = 0;
    app.add_option("--workspace", workspace, "workspace root directory")
        ->envname("PSYCHOAK_WORKSPACE");
    app.add_option("--seed", seed, "seed for every stochastic choice");
    app.add_option("--config", config_path, "JSON config file");

    auto* c_ingest = app.add_subcommand("ingest", "decode, calibrate and segment recordings");
    std::vector<std::string> manifests;
    c_ingest->add_option("--manifest", manifests, "session manifest JSON (repeatable)")
        ->required();

    auto* c_sqm = app.add_subcommand("sqm", "compute sound quality metrics per segment");
    auto* c_pa = app.add_subcommand("pa", "compute psychoacoustic annoyance per segment");
    auto* c_dataset = app.add_subcommand("dataset", "assemble the model dataset");
    auto* c_correlate = app.add_subcommand("correlate", "correlation matrix of the dataset");

    std::string model_family = "linear";
    auto* c_train = app.add_subcommand("train", "nested-CV hyperparameter search + final fit");
    c_train->add_option("--model", model_family, "linear|svr|mlp");
    auto* c_validate = app.add_subcommand("validate", "leave-one-drone-out RMSE");
    c_validate->add_option("--model", model_family, "linear|svr|mlp");
    auto* c_report = app.add_subcommand("report", "full + validation RMSE and sweep");
    c_report->add_option("--model", model_family, "linear|svr|mlp");

    auto* c_fixtures =
        app.add_subcommand("fixtures", "generate the synthetic fixture corpus");
    std::string fixtures_out = "fixtures";
    double fixture_noise = 0.5;
    c_fixtures->add_option("--out", fixtures_out, "output directory");
    c_fixtures->add_option("--noise", fixture_noise,
                           "target noise sigma of the noisy linear dataset");

    CLI11_PARSE(app, argc, argv);

    try {
        Workspace ws{workspace};

        DiscLoadingUnits dl_units = DiscLoadingUnits::Pa;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot open config: " + config_path);
            nlohmann::json jc;
            is >> jc;
            const auto units = jc.value("disc_loading_units", "pa");
            if (units == "kg_per_m2")
                dl_units = DiscLoadingUnits::KgPerM2;
            else if (units != "pa")
                throw ConfigError("config.disc_loading_units must be 'pa' or 'kg_per_m2'");
        }
        (void)dl_units;

        if (c_ingest->parsed()) {
            std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
            cmd_ingest(ws, paths, seed);
            std::cout << "ingest: wrote " << (ws.segments_dir() / "index.json").string()
                      << '\n';
        } else if (c_sqm->parsed()) {
            cmd_sqm(ws, seed);
            std::cout << "sqm: wrote " << ws.sqm_dir().string() << '\n';
        } else if (c_pa->parsed()) {
            cmd_pa(ws, seed);
            std::cout << "pa: wrote " << ws.pa_dir().string() << '\n';
        } else if (c_dataset->parsed()) {
            cmd_dataset(ws, seed);
            std::cout << "dataset: wrote " << (ws.dataset_dir() / "dataset.csv").string()
                      << '\n';
        } else if (c_correlate->parsed()) {
            cmd_correlate(ws, seed);
            std::cout << "correlate: wrote "
                      << (ws.dataset_dir() / "correlation.csv").string() << '\n';
        } else if (c_train->parsed()) {
            cmd_train(ws, model_family, seed);
            std::cout << "train: wrote "
                      << (ws.models_dir() / (model_family + ".json")).string() << '\n';
        } else if (c_validate->parsed()) {
            cmd_validate(ws, model_family, seed);
            std::cout << "validate: wrote "
                      << (ws.reports_dir() / ("validation_" + model_family + ".json"))
                             .string()
                      << '\n';
        } else if (c_report->parsed()) {
            cmd_report(ws, model_family, seed);
            std::cout << "report: wrote "
                      << (ws.reports_dir() / ("eval_" + model_family + ".json")).string()
                      << '\n';
        } else if (c_fixtures->parsed()) {
            const auto paths = generate_fixture_workspace(fixtures_out, seed);
            write_dataset_csv(std::filesystem::path(fixtures_out) / "linear_dataset.csv",
                              make_linear_dataset(seed, 0.0));
            write_dataset_csv(
                std::filesystem::path(fixtures_out) / "linear_dataset_noisy.csv",
                make_linear_dataset(seed, fixture_noise));
            std::cout << "fixtures: wrote " << paths.manifests.size()
                      << " session manifests under " << fixtures_out << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
