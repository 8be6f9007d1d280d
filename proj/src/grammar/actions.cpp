#include "hri/grammar/actions.hpp"

#include <algorithm>
#include <cctype>

namespace hri::grammar {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool bare_char(char c) { return ident_char(c) || c == '.' || c == '-' || c == '+'; }
bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_number(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  const std::size_t int_start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == int_start) return false;
  if (i < s.size() && s[i] == '.') {
    const std::size_t frac = ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == frac) return false;
  }
  return i == s.size();
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  std::vector<ActionCall> list() {
    ws();
    expect('[', "'['");
    std::vector<ActionCall> calls;
    ws();
    if (peek() == ']') {
      ++pos_;
    } else {
      for (;;) {
        calls.push_back(item());
        ws();
        if (peek() == ',') {
          ++pos_;
          ws();
          continue;
        }
        expect(']', "',' or ']'");
        break;
      }
    }
    ws();
    if (pos_ != s_.size()) fail("end of input after ']'");
    return calls;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool at_end() const { return pos_ >= s_.size(); }

  [[noreturn]] void fail(const std::string& expected) const { throw ParseError(pos_, expected); }

  void ws() {
    while (!at_end() && space(s_[pos_])) ++pos_;
  }

  void expect(char c, const char* what) {
    if (at_end() || s_[pos_] != c) fail(what);
    ++pos_;
  }

  ActionCall item() {
    if (peek() == '{') return object();
    ActionCall call;
    call.method = identifier();
    ws();
    expect('(', "'('");
    ws();
    if (peek() == ')') {
      ++pos_;
      return call;
    }
    for (;;) {
      call.args.push_back(argument());
      ws();
      if (peek() == ',') {
        ++pos_;
        ws();
        continue;
      }
      expect(')', "',' or ')'");
      return call;
    }
  }

  std::string identifier() {
    if (at_end() || !ident_start(s_[pos_])) fail("method name");
    const std::size_t start = pos_;
    while (!at_end() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string argument() {
    if (peek() == '"' || peek() == '\'') return quoted();
    std::string out;
    for (;;) {
      const std::size_t start = pos_;
      while (!at_end() && bare_char(s_[pos_])) ++pos_;
      const auto word = s_.substr(start, pos_ - start);
      if (word.empty() || !(is_identifier(word) || is_number(word))) {
        pos_ = start;
        fail("argument (identifier, number or quoted string)");
      }
      if (!out.empty()) out += ' ';
      out += word;
      // Another bare word after blanks continues a multi-word label.
      std::size_t look = pos_;
      while (look < s_.size() && (s_[look] == ' ' || s_[look] == '\t')) ++look;
      if (look == pos_ || look >= s_.size() || !ident_start(s_[look])) return out;
      pos_ = look;
    }
  }

  std::string quoted() {
    const char q = s_[pos_++];
    std::string out;
    for (;;) {
      if (at_end()) fail(std::string("closing ") + q);
      const char c = s_[pos_++];
      if (c == q) return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("escape sequence");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '\\': case '"': case '\'': case '/': out += e; break;
        default: --pos_; fail("valid escape sequence");
      }
    }
  }

  std::string json_string() {
    if (peek() != '"') fail("string");
    return quoted();
  }

  std::string json_scalar() {
    if (peek() == '"') return quoted();
    const std::size_t start = pos_;
    while (!at_end() && bare_char(s_[pos_])) ++pos_;
    const auto word = s_.substr(start, pos_ - start);
    if (!is_number(word)) {
      pos_ = start;
      fail("string or number");
    }
    return std::string(word);
  }

  ActionCall object() {
    ++pos_;  // '{'
    std::optional<std::string> method;
    std::optional<std::vector<std::string>> args;
    ws();
    if (peek() == '}') fail("key \"method\"");
    for (;;) {
      const std::size_t key_pos = pos_;
      const auto key = json_string();
      ws();
      expect(':', "':'");
      ws();
      if (key == "method") {
        if (method) {
          pos_ = key_pos;
          fail("no duplicate \"method\" key");
        }
        const std::size_t at = pos_;
        method = json_string();
        if (!is_identifier(*method)) {
          pos_ = at;
          fail("method name matching [A-Za-z_][A-Za-z0-9_]*");
        }
      } else if (key == "args") {
        if (args) {
          pos_ = key_pos;
          fail("no duplicate \"args\" key");
        }
        args.emplace();
        expect('[', "'['");
        ws();
        if (peek() == ']') {
          ++pos_;
        } else {
          for (;;) {
            args->push_back(json_scalar());
            ws();
            if (peek() == ',') {
              ++pos_;
              ws();
              continue;
            }
            expect(']', "',' or ']'");
            break;
          }
        }
      } else {
        pos_ = key_pos;
        fail("key \"method\" or \"args\"");
      }
      ws();
      if (peek() == ',') {
        ++pos_;
        ws();
        continue;
      }
      if (peek() != '}') fail("',' or '}'");
      if (!method) fail("key \"method\"");
      ++pos_;
      return {*method, args ? *args : std::vector<std::string>{}};
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string print_arg(const std::string& a) {
  if (is_identifier(a) || is_number(a)) return a;
  std::string out = "\"";
  for (char c : a) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + '"';
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

ParseError::ParseError(std::size_t offset, std::string expected)
    : std::runtime_error("parse error at byte " + std::to_string(offset) + ": expected " +
                         expected),
      offset_(offset),
      expected_(std::move(expected)) {}

std::vector<ActionCall> parse_actions(std::string_view text) { return Parser(text).list(); }

std::string to_canonical(const std::vector<ActionCall>& calls) {
  std::string out = "[";
  for (std::size_t i = 0; i < calls.size(); ++i) {
    if (i) out += ", ";
    out += calls[i].method;
    out += '(';
    for (std::size_t j = 0; j < calls[i].args.size(); ++j) {
      if (j) out += ", ";
      out += print_arg(calls[i].args[j]);
    }
    out += ')';
  }
  return out + "]";
}

nlohmann::json to_json(const std::vector<ActionCall>& calls) {
  auto out = nlohmann::json::array();
  for (const auto& c : calls) out.push_back({{"method", c.method}, {"args", c.args}});
  return out;
}

std::vector<ActionCall> calls_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError(0, "JSON array of calls");
  std::vector<ActionCall> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("method") || !item.at("method").is_string()) {
      throw ParseError(0, "{\"method\": string, \"args\": [...]}");
    }
    ActionCall c{item.at("method").get<std::string>(), {}};
    if (!is_identifier(c.method)) throw ParseError(0, "method name");
    for (const auto& a : item.value("args", nlohmann::json::array())) {
      if (a.is_string()) c.args.push_back(a.get<std::string>());
      else if (a.is_number()) c.args.push_back(a.dump());
      else throw ParseError(0, "string or number argument");
    }
    out.push_back(std::move(c));
  }
  return out;
}

void CommandRegistry::add(const std::string& method, CommandSpec spec) {
  if (!is_identifier(method)) throw std::invalid_argument("invalid method name '" + method + "'");
  if (spec.object_args > spec.arity) {
    throw std::invalid_argument("object_args exceeds arity for " + method);
  }
  if (!specs_.emplace(method, std::move(spec)).second) {
    throw std::invalid_argument("duplicate method " + method);
  }
}

const CommandSpec* CommandRegistry::find(std::string_view method) const {
  const auto it = specs_.find(method);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> CommandRegistry::methods() const {
  std::vector<std::string> out;
  for (const auto& [name, spec] : specs_) out.push_back(name);
  return out;
}

CommandRegistry CommandRegistry::defaults() {
  CommandRegistry r;
  r.add("pick_up", {1, "pick_up", 1});
  r.add("hand_over", {1, "hand_over", 1});
  r.add("move_object_to_left_of", {2, "left_of", 2});
  r.add("move_object_to_right_of", {2, "right_of", 2});
  r.add("move_object_above", {2, "above", 2});
  r.add("move_object_below", {2, "below", 2});
  r.add("place_at", {3, "place_at", 1});
  return r;
}

std::string Violation::message() const {
  switch (kind) {
    case Kind::UnknownMethod:
      return "call " + std::to_string(index) + ": unknown method '" + method + "'";
    case Kind::ArityMismatch:
      return "call " + std::to_string(index) + ": " + method + " expected " +
             std::to_string(expected) + ", got " + std::to_string(actual);
  }
  return {};
}

namespace {

std::string join_messages(const std::vector<Violation>& v) {
  std::string out = "invalid action list";
  for (const auto& x : v) out += "; " + x.message();
  return out;
}

std::vector<Violation> check(const std::vector<ActionCall>& calls,
                             const CommandRegistry& registry) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto* spec = registry.find(calls[i].method);
    if (!spec) {
      out.push_back({Violation::Kind::UnknownMethod, i, calls[i].method});
    } else if (spec->arity != calls[i].args.size()) {
      out.push_back({Violation::Kind::ArityMismatch, i, calls[i].method, spec->arity,
                     calls[i].args.size()});
    }
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

CommandQueue::CommandQueue(CommandQueue&& other) noexcept {
  std::lock_guard lock(other.mu_);
  calls_ = std::move(other.calls_);
  closed_ = other.closed_;
}

CommandQueue& CommandQueue::operator=(CommandQueue&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    calls_ = std::move(other.calls_);
    closed_ = other.closed_;
  }
  return *this;
}

void CommandQueue::enqueue(const std::vector<ActionCall>& calls,
                           const CommandRegistry& registry) {
  auto violations = check(calls, registry);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  {
    std::lock_guard lock(mu_);
    calls_.insert(calls_.end(), calls.begin(), calls.end());
  }
  cv_.notify_all();
}

std::optional<ActionCall> CommandQueue::try_pop() {
  std::lock_guard lock(mu_);
  if (calls_.empty()) return std::nullopt;
  auto c = std::move(calls_.front());
  calls_.pop_front();
  return c;
}

std::optional<ActionCall> CommandQueue::pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return !calls_.empty() || closed_; });
  if (calls_.empty()) return std::nullopt;
  auto c = std::move(calls_.front());
  calls_.pop_front();
  return c;
}

void CommandQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t CommandQueue::size() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

std::vector<ActionCall> CommandQueue::snapshot() const {
  std::lock_guard lock(mu_);
  return {calls_.begin(), calls_.end()};
}

CommandQueue validate(const std::vector<ActionCall>& calls, const CommandRegistry& registry) {
  CommandQueue q;
  q.enqueue(calls, registry);
  return q;
}

}  // namespace hri::grammar
