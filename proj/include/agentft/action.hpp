// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace agentft {

/// A parsed agent command: `search[query]` or `finish[answer]`.
class Action {
 public:
  enum class Kind { Search, Finish };

  /// Throws PreconditionError when the query is blank.
  static Action search(std::string query);
  static Action finish(std::string answer);

  Kind kind() const noexcept { return kind_; }
  const std::string& payload() const noexcept { return payload_; }
  bool is_finish() const noexcept { return kind_ == Kind::Finish; }

  /// Canonical action line, e.g. `search[High Plains]`.
  std::string render() const;

  bool operator==(const Action&) const = default;

 private:
  Action(Kind kind, std::string payload) : kind_(kind), payload_(std::move(payload)) {}

  Kind kind_;
  std::string payload_;
};

/// The action line could not be understood; `raw` is the offending text.
struct ParseFailure {
  std::string raw;
  bool operator==(const ParseFailure&) const = default;
};

using ParsedAction = std::variant<Action, ParseFailure>;

/// Keywords match case-insensitively; the payload runs to the last `]` on
/// the first line. Anything else is a ParseFailure carrying the trimmed text.
ParsedAction parse_action(std::string_view raw);

std::string_view to_string(Action::Kind kind) noexcept;

}  // namespace agentft
