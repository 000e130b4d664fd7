#pragma once

// JSON persistence for the trained predictors. Each file carries the model
// kind, its shape, the PCA projection and a flat parameter array; loaders
// validate every shape before constructing the model.

#include <filesystem>

#include <json.hpp>

#include "eventcure/image_event.hpp"
#include "eventcure/importance.hpp"
#include "eventcure/sequence_event.hpp"

namespace eventcure {

nlohmann::json to_json(const ImageEventModel& model);
nlohmann::json to_json(const SequenceEventModel& model);
nlohmann::json to_json(const ImportanceModel& model);

ImageEventModel image_event_from_json(const nlohmann::json& doc);
SequenceEventModel sequence_event_from_json(const nlohmann::json& doc);
ImportanceModel importance_from_json(const nlohmann::json& doc);

void save_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

template <class Model>
void save_model(const Model& model, const std::filesystem::path& path) {
  save_json(to_json(model), path);
}

ImageEventModel load_image_event_model(const std::filesystem::path& path);
SequenceEventModel load_sequence_event_model(const std::filesystem::path& path);
ImportanceModel load_importance_model(const std::filesystem::path& path);

}  // namespace eventcure
