#include "disorder/config.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "disorder/errors.hpp"

namespace disorder {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kKeys = {"alphabet_size", "pre_kernels", "post_kernels",
                                                   "b",             "pi",          "p",
                                                   "d",             "x0"};

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(std::string("missing key '") + key + "'");
  return *it;
}

std::size_t as_count(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::vector<double>> as_matrix(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const json& row : v) {
    if (!row.is_array()) throw ConfigError(what + " must be an array of rows");
    std::vector<double> values;
    for (const json& x : row) {
      if (!x.is_number()) throw ConfigError(what + " entries must be numbers");
      values.push_back(x.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::vector<Kernel> as_kernels(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of kernels");
  std::vector<Kernel> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::string what = std::string(key) + "[" + std::to_string(k) + "]";
    try {
      out.push_back(Kernel::from_rows(as_matrix(v[k], what)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  return out;
}

PairMatrix as_pair_matrix(const json& v, const char* key) {
  try {
    return PairMatrix::from_rows(as_matrix(v, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

json matrix_json(const std::vector<std::vector<double>>& rows) {
  json out = json::array();
  for (const auto& row : rows) out.push_back(row);
  return out;
}

}  // namespace

ModelSpec parse_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (auto k : kKeys) known = known || key == k;
    if (!known) throw ConfigError("unknown key '" + key + "'");
  }

  ModelSpec spec;
  spec.alphabet_size = as_count(require(doc, "alphabet_size"), "alphabet_size");
  spec.pre_kernels = as_kernels(require(doc, "pre_kernels"), "pre_kernels");
  spec.post_kernels = as_kernels(require(doc, "post_kernels"), "post_kernels");
  spec.b = as_pair_matrix(require(doc, "b"), "b");
  spec.pi = as_pair_matrix(require(doc, "pi"), "pi");
  spec.p = as_pair_matrix(require(doc, "p"), "p");
  spec.d = as_count(require(doc, "d"), "d");
  spec.x0 = as_count(require(doc, "x0"), "x0");
  return spec;
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string dump_model(const ModelSpec& spec) {
  json doc;
  doc["alphabet_size"] = spec.alphabet_size;
  json pre = json::array(), post = json::array();
  for (const auto& k : spec.pre_kernels) pre.push_back(matrix_json(k.to_rows()));
  for (const auto& k : spec.post_kernels) post.push_back(matrix_json(k.to_rows()));
  doc["pre_kernels"] = pre;
  doc["post_kernels"] = post;
  doc["b"] = matrix_json(spec.b.to_rows());
  doc["pi"] = matrix_json(spec.pi.to_rows());
  doc["p"] = matrix_json(spec.p.to_rows());
  doc["d"] = spec.d;
  doc["x0"] = spec.x0;
  return doc.dump(2);
}

}  // namespace disorder
