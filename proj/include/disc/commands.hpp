#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "disc/bench.hpp"
#include "disc/shiftgen.hpp"

namespace disc {

namespace fs = std::filesystem;

nlohmann::json corpus_to_json(const Corpus& c);
Corpus corpus_from_json(const nlohmann::json& j);

// Each command reads/writes files and throws ConfigError / DataError /
// NumericError on failure; the CLI maps those to exit codes.

void cmd_gen_data(const nlohmann::json& config, const fs::path& out_path);

void cmd_train_denoiser(const nlohmann::json& config, const fs::path& data_path,
                        const fs::path& out_path);

void cmd_embed(const fs::path& model_path, const fs::path& data_path,
               const nlohmann::json& config, const fs::path& out_csv);

void cmd_fit_detector(const std::string& kind, const fs::path& embeddings_csv,
                      const nlohmann::json& config, const fs::path& out_path);

void cmd_score(const fs::path& detector_path, const fs::path& embeddings_csv,
               const fs::path& out_csv);

void cmd_bench(const std::string& modality, const nlohmann::json& config,
               const fs::path& out_dir);

void cmd_theory_demo(const nlohmann::json& config, const fs::path& out_path);

ImageBenchConfig image_bench_config_from_json(const nlohmann::json& j);
TabularBenchConfig tabular_bench_config_from_json(const nlohmann::json& j);

} // namespace disc
