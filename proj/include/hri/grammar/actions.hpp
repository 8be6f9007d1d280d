#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hri::grammar {

struct ActionCall {
  std::string method;
  std::vector<std::string> args;

  bool operator==(const ActionCall&) const = default;
};

bool is_identifier(std::string_view s);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected);
  /// Byte offset into the input where parsing stopped.
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Parses a bracketed list of calls:
///
///   list = '[' ']' | '[' item (',' item)* ']'
///   item = ident '(' (arg (',' arg)*)? ')'
///        | '{' "method": string ',' "args": [ string* ] '}'
///   arg  = word (' ' word)* | number | quoted string
///
/// Whitespace between tokens is ignored. Bare multi-word arguments are
/// joined with single spaces. Anything after the closing ']' is an error.
std::vector<ActionCall> parse_actions(std::string_view text);

/// "[method(arg, \"two words\"), other()]", accepted by parse_actions.
std::string to_canonical(const std::vector<ActionCall>& calls);

nlohmann::json to_json(const std::vector<ActionCall>& calls);
/// Inverse of to_json; throws ParseError (offset 0) on a malformed document.
std::vector<ActionCall> calls_from_json(const nlohmann::json& j);

struct CommandSpec {
  std::size_t arity = 0;
  std::string executor;         // primitive tag the executor dispatches on
  std::size_t object_args = 0;  // leading args that name scene objects
};

class CommandRegistry {
 public:
  void add(const std::string& method, CommandSpec spec);
  const CommandSpec* find(std::string_view method) const;
  std::vector<std::string> methods() const;

  /// pick_up/1, hand_over/1, move_object_to_{left_of,right_of}/2,
  /// move_object_{above,below}/2, place_at/3.
  static CommandRegistry defaults();

 private:
  std::map<std::string, CommandSpec, std::less<>> specs_;
};

struct Violation {
  enum class Kind { UnknownMethod, ArityMismatch };
  Kind kind;
  std::size_t index;  // position of the call in the list
  std::string method;
  std::size_t expected = 0;
  std::size_t actual = 0;

  std::string message() const;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// FIFO of validated calls; one producer and one consumer may use it
/// concurrently.
class CommandQueue {
 public:
  CommandQueue() = default;
  CommandQueue(CommandQueue&& other) noexcept;
  CommandQueue& operator=(CommandQueue&& other) noexcept;

  /// Validates all-or-nothing against `registry` and appends on success.
  void enqueue(const std::vector<ActionCall>& calls, const CommandRegistry& registry);

  std::optional<ActionCall> try_pop();
  /// Blocks until a call is available or close() was called.
  std::optional<ActionCall> pop();
  void close();

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<ActionCall> snapshot() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<ActionCall> calls_;
  bool closed_ = false;
};

/// Either every call resolves (known method, exact arity) and a queue is
/// returned, or ValidationError lists every violation.
CommandQueue validate(const std::vector<ActionCall>& calls, const CommandRegistry& registry);

}  // namespace hri::grammar
