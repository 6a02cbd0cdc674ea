// SPDX-License-Identifier: Apache-2.0
#include "agentft/metrics.hpp"

#include <cmath>
#include <sstream>

#include "agentft/error.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace {

std::vector<std::string> tokens(std::string_view normalized) {
  std::vector<std::string> out;
  std::istringstream in{std::string(normalized)};
  for (std::string t; in >> t;) out.push_back(std::move(t));
  return out;
}

double f1_single(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : gold) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2 * precision * recall / (precision + recall);
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string normalize_answer(std::string_view answer) {
  std::string text;
  text.reserve(answer.size());
  for (char c : answer) {
    if (std::ispunct(static_cast<unsigned char>(c))) continue;
    text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::string out;
  for (const auto& t : tokens(text)) {
    if (t == "a" || t == "an" || t == "the") continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

int exact_match(std::string_view prediction, std::span<const std::string> golds) {
  auto p = normalize_answer(prediction);
  for (const auto& g : golds)
    if (normalize_answer(g) == p) return 1;
  return 0;
}

double f1_score(std::string_view prediction, std::span<const std::string> golds) {
  auto p = tokens(normalize_answer(prediction));
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, f1_single(p, tokens(normalize_answer(g))));
  return best;
}

std::string canonical_prediction(std::string_view prediction, const QAItem& item) {
  if (item.answer_style != AnswerStyle::MultiChoice || item.choices.empty()) return std::string(prediction);
  auto p = strings::trim(prediction);
  auto normalized = normalize_answer(p);
  for (const auto& c : item.choices)
    if (!normalized.empty() && normalize_answer(c.text) == normalized) return std::string(1, c.letter);
  if (p.empty()) return std::string(p);
  char first = p.front();
  bool upper = first >= 'A' && first <= 'Z';
  bool lower_marked = first >= 'a' && first <= 'z' && (p.size() == 1 || p[1] == '.' || p[1] == ')');
  bool separated = p.size() == 1 || !is_alnum(p[1]);
  if ((upper && separated) || lower_marked) {
    char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(first)));
    for (const auto& c : item.choices)
      if (c.letter == letter) return std::string(1, letter);
  }
  return std::string(p);
}

AnswerScore score_answer(std::string_view prediction, const QAItem& item) {
  auto p = canonical_prediction(prediction, item);
  return {exact_match(p, item.gold_answers), f1_score(p, item.gold_answers)};
}

double standard_error(double em_percent, std::size_t n) {
  if (n == 0) throw PreconditionError("standard error needs n >= 1");
  if (!(em_percent >= 0.0 && em_percent <= 100.0)) throw PreconditionError("EM must lie in [0, 100]");
  double p = em_percent / 100.0;
  return 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double round_to(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

TurnStats turn_stats(std::span<const int> round_counts) {
  if (round_counts.empty()) throw PreconditionError("turn statistics need at least one trajectory");
  TurnStats stats;
  double sum = 0.0;
  for (int c : round_counts) {
    sum += c;
    ++stats.histogram[c];
  }
  const double n = static_cast<double>(round_counts.size());
  stats.mu = sum / n;
  double sq = 0.0;
  for (int c : round_counts) sq += (c - stats.mu) * (c - stats.mu);
  stats.sigma = std::sqrt(sq / n);
  return stats;
}

ResultMatrix::ResultMatrix(std::vector<std::string> question_ids, std::vector<std::string> methods)
    : question_ids_(std::move(question_ids)),
      methods_(std::move(methods)),
      cells_(question_ids_.size() * methods_.size(), 0) {}

void ResultMatrix::set(std::size_t question, std::size_t method, bool success) {
  if (question >= questions() || method >= methods()) throw PreconditionError("result matrix index out of range");
  cells_[question * methods_.size() + method] = success ? 1 : 0;
}

bool ResultMatrix::at(std::size_t question, std::size_t method) const {
  if (question >= questions() || method >= methods()) throw PreconditionError("result matrix index out of range");
  return cells_[question * methods_.size() + method] != 0;
}

MethodChoiceBounds method_choice_bounds(const ResultMatrix& m) {
  if (m.questions() == 0 || m.methods() == 0) throw PreconditionError("method-choice bounds need a non-empty matrix");
  const auto q = m.questions();
  const auto k = m.methods();
  std::vector<std::size_t> column(k, 0);
  std::size_t solved_any = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < q; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (!m.at(i, j)) continue;
      ++column[j];
      ++total;
      any = true;
    }
    if (any) ++solved_any;
  }
  // Integer counts keep e.g. 648 / 2000 exact before the single division.
  MethodChoiceBounds b;
  b.random_em = static_cast<double>(total) * 100.0 / static_cast<double>(q * k);
  b.oracle_em = static_cast<double>(solved_any) * 100.0 / static_cast<double>(q);
  for (auto c : column) {
    b.per_method_em.push_back(static_cast<double>(c) * 100.0 / static_cast<double>(q));
    b.best_single_em = std::max(b.best_single_em, b.per_method_em.back());
  }
  return b;
}

}  // namespace agentft
