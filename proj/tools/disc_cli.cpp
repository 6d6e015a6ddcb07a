#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "disc/commands.hpp"
#include "disc/errors.hpp"
#include "disc/io.hpp"

namespace {

nlohmann::json load_config_arg(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    return disc::load_json_file(path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"disc: trajectory-based characterization of distribution shifts"};
    app.require_subcommand(1);

    std::string config_path, data_path, model_path, out_path, detector_path, embeddings_path;
    std::string kind, modality;

    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
    gen->add_option("--config", config_path, "json config")->required();
    gen->add_option("--out", out_path, "output corpus json")->required();

    auto* train = app.add_subcommand("train", "train a denoiser on a corpus");
    train->add_option("--config", config_path, "json config");
    train->add_option("--data", data_path, "corpus json")->required();
    train->add_option("--out", out_path, "output checkpoint json")->required();

    auto* embed = app.add_subcommand("embed", "extract trajectory embeddings");
    embed->add_option("--model", model_path, "denoiser checkpoint")->required();
    embed->add_option("--data", data_path, "corpus json")->required();
    embed->add_option("--config", config_path, "json config");
    embed->add_option("--out", out_path, "output csv")->required();

    auto* fit = app.add_subcommand("fit", "fit a detector on embeddings");
    fit->add_option("--kind", kind, "iforest or kmeans")->required();
    fit->add_option("--embeddings", embeddings_path, "embedding csv")->required();
    fit->add_option("--config", config_path, "json config");
    fit->add_option("--out", out_path, "output detector json")->required();

    auto* score = app.add_subcommand("score", "score embeddings with a detector");
    score->add_option("--detector", detector_path, "detector json")->required();
    score->add_option("--embeddings", embeddings_path, "embedding csv")->required();
    score->add_option("--out", out_path, "output csv")->required();

    auto* bench = app.add_subcommand("bench", "run the synthetic shift benchmark");
    bench->add_option("--modality", modality, "image or tabular")->required();
    bench->add_option("--config", config_path, "json config overrides");
    bench->add_option("--out", out_path, "output directory")->required();

    auto* theory = app.add_subcommand("theory", "run the marginal-collision demo");
    theory->add_option("--config", config_path, "json config");
    theory->add_option("--out", out_path, "output json")->required();

    auto* version = app.add_subcommand("version", "print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            disc::cmd_gen_data(disc::load_json_file(config_path), out_path);
        } else if (train->parsed()) {
            disc::cmd_train_denoiser(load_config_arg(config_path), data_path, out_path);
        } else if (embed->parsed()) {
            disc::cmd_embed(model_path, data_path, load_config_arg(config_path), out_path);
        } else if (fit->parsed()) {
            disc::cmd_fit_detector(kind, embeddings_path, load_config_arg(config_path), out_path);
        } else if (score->parsed()) {
            disc::cmd_score(detector_path, embeddings_path, out_path);
        } else if (bench->parsed()) {
            disc::cmd_bench(modality, load_config_arg(config_path), out_path);
        } else if (theory->parsed()) {
            disc::cmd_theory_demo(load_config_arg(config_path), out_path);
        } else if (version->parsed()) {
            std::printf("%s\n", disc::kToolVersion);
        }
    } catch (const disc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const disc::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const disc::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
