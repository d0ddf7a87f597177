#include "mvver/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mvver/error.hpp"

namespace mvver {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, where + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!keys.contains(key))
      throw Error(ErrorCode::parse_error, "unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + ex.what());
  }
}

}  // namespace

json to_json(const ClassifierConfig& c) {
  return {{"kind", to_string(c.kind)}, {"hidden_units", c.hidden_units},
          {"epochs", c.epochs},         {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size}, {"l2", c.l2},
          {"standardize", c.standardize},
          {"beta1", c.beta1},           {"beta2", c.beta2},
          {"epsilon", c.epsilon}};
}

ClassifierConfig classifier_from_json(const json& j, const ClassifierConfig& defaults) {
  return guarded([&] {
    reject_unknown(j, {"kind", "hidden_units", "epochs", "learning_rate", "batch_size", "l2",
                       "beta1", "beta2", "epsilon", "standardize", "seed"},
                   "classifier config");
    ClassifierConfig c = defaults;
    if (auto it = j.find("kind"); it != j.end()) c.kind = parse_model_kind(it->get<std::string>());
    read(j, "hidden_units", c.hidden_units);
    read(j, "epochs", c.epochs);
    read(j, "learning_rate", c.learning_rate);
    read(j, "batch_size", c.batch_size);
    read(j, "l2", c.l2);
    read(j, "standardize", c.standardize);
    read(j, "beta1", c.beta1);
    read(j, "beta2", c.beta2);
    read(j, "epsilon", c.epsilon);
    read(j, "seed", c.seed);
    c.validate();
    return c;
  });
}

json to_json(const RefineConfig& c) {
  return {{"iterations", c.iterations},
          {"views", c.views},
          {"alpha", c.alpha},
          {"entropy_unit", c.unit == EntropyUnit::bits ? "bits" : "nats"},
          {"strong_label", c.strong_label == StrongLabel::voted ? "voted" : "original"},
          {"view_classifier", to_json(c.view_classifier)},
          {"strong_classifier", to_json(c.strong_classifier)},
          {"final_classifier", to_json(c.final_classifier)}};
}

RefineConfig refine_from_json(const json& j, const RefineConfig& defaults) {
  return guarded([&] {
    reject_unknown(j, {"iterations", "views", "alpha", "entropy_unit", "strong_label",
                       "classifier", "view_classifier", "strong_classifier", "final_classifier",
                       "seed"},
                   "refine config");
    RefineConfig c = defaults;
    read(j, "iterations", c.iterations);
    read(j, "views", c.views);
    read(j, "alpha", c.alpha);
    read(j, "seed", c.seed);
    if (auto it = j.find("entropy_unit"); it != j.end()) {
      const auto u = it->get<std::string>();
      if (u != "nats" && u != "bits")
        throw Error(ErrorCode::parse_error, "entropy_unit must be 'nats' or 'bits'");
      c.unit = u == "bits" ? EntropyUnit::bits : EntropyUnit::nats;
    }
    if (auto it = j.find("strong_label"); it != j.end()) {
      const auto s = it->get<std::string>();
      if (s != "voted" && s != "original")
        throw Error(ErrorCode::parse_error, "strong_label must be 'voted' or 'original'");
      c.strong_label = s == "original" ? StrongLabel::original : StrongLabel::voted;
    }
    // "classifier" sets all three; the specific keys override it.
    if (auto it = j.find("classifier"); it != j.end()) {
      const auto shared = classifier_from_json(*it, c.view_classifier);
      c.view_classifier = c.strong_classifier = c.final_classifier = shared;
    }
    if (auto it = j.find("view_classifier"); it != j.end())
      c.view_classifier = classifier_from_json(*it, c.view_classifier);
    if (auto it = j.find("strong_classifier"); it != j.end())
      c.strong_classifier = classifier_from_json(*it, c.strong_classifier);
    if (auto it = j.find("final_classifier"); it != j.end())
      c.final_classifier = classifier_from_json(*it, c.final_classifier);
    c.validate();
    return c;
  });
}

json to_json(const IterationReport& r) {
  json j{{"iteration", r.iteration},
         {"input_size", r.input_size},
         {"strong_after_vote", r.strong_after_vote},
         {"demoted", r.demoted},
         {"recovered", r.recovered},
         {"strong_size", r.strong_size},
         {"weak_size", r.weak_size}};
  j["purity"] = r.purity ? json(*r.purity) : json(nullptr);
  j["strong_model_accuracy"] = r.strong_model_accuracy ? json(*r.strong_model_accuracy) : json(nullptr);
  return j;
}

json to_json(const ExperimentConfig& c) {
  json data;
  if (const auto* b = std::get_if<BlobsSpec>(&c.data)) {
    data = {{"source", "blobs"},       {"classes", b->num_classes}, {"per_class", b->per_class},
            {"dim", b->dim},           {"separation", b->separation},
            {"spread", b->spread},     {"seed", b->seed}};
  } else {
    data = {{"source", "csv"}, {"path", std::get<CsvSource>(c.data).path.string()}};
  }
  return {{"version", kConfigVersion},
          {"seed", c.seed},
          {"data", data},
          {"noise_ratios", c.noise_ratios},
          {"repeats", c.repeats},
          {"test_fraction", c.test_fraction},
          {"baselines", {{"naive", c.baselines.naive}, {"voting_only", c.baselines.voting_only}}},
          {"refine", to_json(c.refine)}};
}

ExperimentConfig experiment_from_json(const json& j) {
  return guarded([&] {
    reject_unknown(j, {"version", "seed", "data", "noise_ratios", "repeats", "test_fraction",
                       "baselines", "refine"},
                   "experiment config");
    if (auto it = j.find("version"); it != j.end() && it->get<int>() != kConfigVersion)
      throw Error(ErrorCode::parse_error,
                  "unsupported config version " + std::to_string(it->get<int>()));
    ExperimentConfig c;
    read(j, "seed", c.seed);
    read(j, "noise_ratios", c.noise_ratios);
    read(j, "repeats", c.repeats);
    read(j, "test_fraction", c.test_fraction);
    if (auto it = j.find("data"); it != j.end()) {
      const auto source = it->value("source", std::string("blobs"));
      if (source == "blobs") {
        reject_unknown(*it, {"source", "classes", "per_class", "dim", "separation", "spread", "seed"},
                       "data");
        BlobsSpec b;
        read(*it, "classes", b.num_classes);
        read(*it, "per_class", b.per_class);
        read(*it, "dim", b.dim);
        read(*it, "separation", b.separation);
        read(*it, "spread", b.spread);
        read(*it, "seed", b.seed);
        c.data = b;
      } else if (source == "csv") {
        reject_unknown(*it, {"source", "path"}, "data");
        c.data = CsvSource{it->at("path").get<std::string>()};
      } else {
        throw Error(ErrorCode::parse_error, "data.source must be 'blobs' or 'csv'");
      }
    }
    if (auto it = j.find("baselines"); it != j.end()) {
      reject_unknown(*it, {"naive", "voting_only"}, "baselines");
      read(*it, "naive", c.baselines.naive);
      read(*it, "voting_only", c.baselines.voting_only);
    }
    if (auto it = j.find("refine"); it != j.end()) c.refine = refine_from_json(*it);
    c.validate();
    return c;
  });
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  return guarded([&] { return experiment_from_json(json::parse(text)); });
}

}  // namespace mvver
