// SPDX-License-Identifier: Apache-2.0
#include "agentft/pricing.hpp"

#include <fstream>

#include "agentft/error.hpp"

namespace agentft {

void PriceTable::set(std::string model, ModelPrice price) {
  if (price.input_per_1k < 0 || price.output_per_1k < 0)
    throw ConfigError("price table: negative price for " + model);
  if (price.fine_tuned_multiplier < 1) throw ConfigError("price table: multiplier below 1 for " + model);
  prices_[std::move(model)] = price;
}

const ModelPrice& PriceTable::at(const std::string& model) const {
  auto it = prices_.find(model);
  if (it == prices_.end()) throw ConfigError("price table: unknown model '" + model + "'");
  return it->second;
}

PriceTable PriceTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("price table must be a JSON object");
  PriceTable table;
  for (const auto& [model, entry] : j.items()) {
    try {
      ModelPrice p;
      p.input_per_1k = entry.at("input_per_1k").get<double>();
      p.output_per_1k = entry.at("output_per_1k").get<double>();
      p.fine_tuned_multiplier = entry.value("fine_tuned_multiplier", 1.0);
      table.set(model, p);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("price table entry '" + model + "': " + e.what());
    }
  }
  return table;
}

PriceTable PriceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("price table not found: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("price table " + path.string() + ": " + e.what());
  }
}

double cost_of(const TokenUsage& usage, const std::string& model, bool fine_tuned, const PriceTable& prices) {
  const ModelPrice& p = prices.at(model);
  double base = p.input_per_1k * static_cast<double>(usage.prompt_tokens) / 1000.0 +
                p.output_per_1k * static_cast<double>(usage.completion_tokens) / 1000.0;
  return fine_tuned ? base * p.fine_tuned_multiplier : base;
}

}  // namespace agentft
