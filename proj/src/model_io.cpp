#include "eventcure/model_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "eventcure/error.hpp"

namespace eventcure {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j, Eigen::Index expected, const char* what) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                                  " values, found " + std::to_string(values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), expected);
}

json pca_json(const PcaTransform& pca) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < pca.basis.rows(); ++r) rows.push_back(vector_json(pca.basis.row(r).transpose()));
  return {{"mean", vector_json(pca.mean)},
          {"basis", rows},
          {"explained_variance", vector_json(pca.explained_variance)}};
}

PcaTransform pca_from(const json& j, Eigen::Index reduced_dim) {
  PcaTransform pca;
  const auto& mean = j.at("mean");
  const auto input_dim = static_cast<Eigen::Index>(mean.size());
  pca.mean = vector_from(mean, input_dim, "pca.mean");
  const auto& rows = j.at("basis");
  if (static_cast<Eigen::Index>(rows.size()) != input_dim) {
    throw Error(ErrorKind::DimensionMismatch, "pca.basis row count differs from pca.mean length");
  }
  pca.basis.resize(input_dim, reduced_dim);
  for (Eigen::Index r = 0; r < input_dim; ++r) {
    pca.basis.row(r) = vector_from(rows.at(static_cast<std::size_t>(r)), reduced_dim, "pca.basis row").transpose();
  }
  pca.explained_variance = vector_from(j.at("explained_variance"), reduced_dim, "pca.explained_variance");
  return pca;
}

json header(const char* kind, Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes) {
  return {{"kind", kind}, {"input_dim", input_dim}, {"hidden", hidden}, {"classes", classes}};
}

void expect_kind(const json& doc, const char* kind) {
  const auto found = doc.at("kind").get<std::string>();
  if (found != kind) throw Error(ErrorKind::ParseError, "expected a '" + std::string(kind) + "' model, found '" + found + "'");
}

template <class Model>
json model_json(const char* kind, const Model& model) {
  json doc = header(kind, model.input_dim(), model.hidden(), model.classes());
  doc["pca"] = pca_json(model.pca);
  doc["parameters"] = vector_json(model.parameters());
  return doc;
}

template <class Model>
Model model_from(const json& doc, const char* kind) {
  try {
    expect_kind(doc, kind);
    Model model(doc.at("input_dim").get<Eigen::Index>(), doc.at("hidden").get<Eigen::Index>(),
                doc.at("classes").get<Eigen::Index>());
    model.parameters() = vector_from(doc.at("parameters"), model.parameters().size(), "parameters");
    model.pca = pca_from(doc.at("pca"), model.input_dim());
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string(kind) + " model: " + e.what());
  }
}

}  // namespace

json to_json(const ImageEventModel& model) { return model_json("image_event", model); }
json to_json(const SequenceEventModel& model) { return model_json("sequence_event", model); }
json to_json(const ImportanceModel& model) { return model_json("importance", model); }

ImageEventModel image_event_from_json(const json& doc) { return model_from<ImageEventModel>(doc, "image_event"); }
SequenceEventModel sequence_event_from_json(const json& doc) {
  return model_from<SequenceEventModel>(doc, "sequence_event");
}
ImportanceModel importance_from_json(const json& doc) { return model_from<ImportanceModel>(doc, "importance"); }

void save_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump() << '\n';
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

ImageEventModel load_image_event_model(const std::filesystem::path& path) {
  return image_event_from_json(load_json(path));
}

SequenceEventModel load_sequence_event_model(const std::filesystem::path& path) {
  return sequence_event_from_json(load_json(path));
}

ImportanceModel load_importance_model(const std::filesystem::path& path) {
  return importance_from_json(load_json(path));
}

}  // namespace eventcure
