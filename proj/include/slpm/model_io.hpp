#pragma once

#include <filesystem>
#include <string>

#include "slpm/embed.hpp"

namespace slpm {

/// Line-oriented "SLPM-MODEL v1" text format; reals use 17 significant
/// digits so a load reproduces the saved doubles exactly.
std::string format_model(const EmbeddingModel& model);
EmbeddingModel parse_model(const std::string& text);

void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

} // namespace slpm
