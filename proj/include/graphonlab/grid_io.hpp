#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "graphon.hpp"

namespace graphonlab {

inline constexpr const char* kGridFormat = "gridgraphon-v1";

inline nlohmann::json grid_to_json(const GridGraphon& g) {
  return {{"format", kGridFormat}, {"n", g.n()}, {"values", g.values()}};
}

/// Parses and validates a gridgraphon-v1 document. Unknown keys are ignored.
inline GridGraphon grid_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("grid file: top level is not a JSON object");
  if (!doc.contains("format") || doc["format"] != kGridFormat)
    throw ValidationError(std::string("grid file: format must be \"") + kGridFormat + "\"");
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() <= 0)
    throw ValidationError("grid file: \"n\" must be a positive integer");
  const auto n = doc["n"].get<std::size_t>();
  if (!doc.contains("values") || !doc["values"].is_array())
    throw ValidationError("grid file: \"values\" must be an array");
  const auto& arr = doc["values"];
  if (arr.size() != n * n) {
    std::ostringstream os;
    os << "grid file: expected " << n * n << " values for n=" << n << ", found " << arr.size();
    throw ValidationError(os.str());
  }
  std::vector<double> values(n * n);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number()) {
      std::ostringstream os;
      os << "grid file: values[" << k / n << "][" << k % n << "] is not a number";
      throw ValidationError(os.str());
    }
    values[k] = arr[k].get<double>();
  }
  return GridGraphon(n, std::move(values));
}

inline void save_grid(const GridGraphon& g, const std::string& path,
                      const nlohmann::json& extra = nlohmann::json::object()) {
  auto doc = grid_to_json(g);
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write grid file " + path);
  out << doc.dump() << '\n';
}

inline GridGraphon load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open grid file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("grid file " + path + ": malformed JSON (" + e.what() + ")");
  }
  return grid_from_json(doc);
}

}  // namespace graphonlab
