// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "agentft/types.hpp"

namespace agentft {

struct ModelPrice {
  double input_per_1k = 0.0;
  double output_per_1k = 0.0;
  double fine_tuned_multiplier = 1.0;
};

class PriceTable {
 public:
  /// Throws ConfigError on negative prices or multiplier < 1.
  void set(std::string model, ModelPrice price);
  const ModelPrice& at(const std::string& model) const;
  bool contains(const std::string& model) const { return prices_.count(model) != 0; }

  /// {"<model>": {"input_per_1k": .., "output_per_1k": .., "fine_tuned_multiplier": ..}}
  static PriceTable from_json(const nlohmann::json& j);
  static PriceTable load(const std::filesystem::path& path);

 private:
  std::map<std::string, ModelPrice> prices_;
};

/// Dollars for one call or episode. Throws ConfigError for unknown models.
double cost_of(const TokenUsage& usage, const std::string& model, bool fine_tuned, const PriceTable& prices);

}  // namespace agentft
