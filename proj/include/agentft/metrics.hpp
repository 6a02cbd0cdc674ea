// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentft/qa_item.hpp"

namespace agentft {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the as whole
/// words, collapse whitespace.
std::string normalize_answer(std::string_view answer);

/// 1 iff the normalized prediction equals any normalized gold.
int exact_match(std::string_view prediction, std::span<const std::string> golds);

/// Max over golds of token-level F1 on normalized whitespace tokens. Two
/// empty strings score 1.
double f1_score(std::string_view prediction, std::span<const std::string> golds);

struct AnswerScore {
  int em = 0;
  double f1 = 0.0;
};

/// Reduces multi-choice predictions like "A. a galaxy" (or the text of a
/// listed choice) to the choice letter before scoring.
std::string canonical_prediction(std::string_view prediction, const QAItem& item);
AnswerScore score_answer(std::string_view prediction, const QAItem& item);

/// 100 * sqrt(p (1 - p) / n) with p = em / 100. Throws PreconditionError for
/// n = 0 or em outside [0, 100].
double standard_error(double em_percent, std::size_t n);

double round_to(double value, int decimals);

struct TurnStats {
  double mu = 0.0;
  double sigma = 0.0;
  /// round count -> number of trajectories
  std::map<int, std::size_t> histogram;
};

/// Mean and population standard deviation. Throws PreconditionError when empty.
TurnStats turn_stats(std::span<const int> round_counts);

/// Per-question, per-method binary success.
class ResultMatrix {
 public:
  ResultMatrix(std::vector<std::string> question_ids, std::vector<std::string> methods);

  void set(std::size_t question, std::size_t method, bool success);
  bool at(std::size_t question, std::size_t method) const;

  std::size_t questions() const noexcept { return question_ids_.size(); }
  std::size_t methods() const noexcept { return methods_.size(); }
  const std::vector<std::string>& question_ids() const noexcept { return question_ids_; }
  const std::vector<std::string>& method_names() const noexcept { return methods_; }

 private:
  std::vector<std::string> question_ids_;
  std::vector<std::string> methods_;
  std::vector<std::uint8_t> cells_;
};

struct MethodChoiceBounds {
  double random_em = 0.0;
  double oracle_em = 0.0;
  std::vector<double> per_method_em;
  double best_single_em = 0.0;
};

/// random = mean over questions of the row mean; oracle = mean of the row
/// max. Throws PreconditionError for an empty matrix.
MethodChoiceBounds method_choice_bounds(const ResultMatrix& matrix);

}  // namespace agentft
