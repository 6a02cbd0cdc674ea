// SPDX-License-Identifier: Apache-2.0
#include "agentft/action.hpp"

#include "agentft/error.hpp"
#include "agentft/strings.hpp"

namespace agentft {

Action Action::search(std::string query) {
  if (strings::trim(query).empty()) throw PreconditionError("search query must not be blank");
  return Action(Kind::Search, std::move(query));
}

Action Action::finish(std::string answer) { return Action(Kind::Finish, std::move(answer)); }

std::string Action::render() const {
  return std::string(to_string(kind_)) + "[" + payload_ + "]";
}

std::string_view to_string(Action::Kind kind) noexcept {
  return kind == Action::Kind::Search ? "search" : "finish";
}

ParsedAction parse_action(std::string_view raw) {
  std::string_view line = strings::trim(raw);
  if (auto nl = line.find('\n'); nl != std::string_view::npos) line = strings::trim(line.substr(0, nl));

  auto fail = [&] { return ParseFailure{std::string(strings::trim(raw))}; };

  auto open = line.find('[');
  auto close = line.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return fail();

  std::string_view keyword = strings::trim(line.substr(0, open));
  std::string payload(line.substr(open + 1, close - open - 1));

  if (strings::iequals(keyword, "finish")) return Action::finish(std::move(payload));
  if (strings::iequals(keyword, "search")) {
    if (strings::trim(payload).empty()) return fail();
    return Action::search(std::move(payload));
  }
  return fail();
}

}  // namespace agentft
