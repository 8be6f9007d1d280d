#include "hri/orchestrator/adapters.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <stdexcept>

#include "hri/grammar/actions.hpp"
#include "hri/net/http_json.hpp"

namespace hri::orch {

double LatencyProfile::sample(std::mt19937_64& rng) const {
  if (!(sd > 0.0)) return std::clamp(mean, min, std::max(min, max));
  std::normal_distribution<double> d(mean, sd);
  for (int i = 0; i < 64; ++i) {
    const double v = d(rng);
    if (v >= min && v <= max) return v;
  }
  return std::clamp(mean, min, max);
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool between_digits =
        i > 0 && i + 1 < text.size() && is_digit(text[i - 1]) && is_digit(text[i + 1]);
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (c == ',' || (c == '.' && between_digits) ||
               (c == '-' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      if (c == ',' && !out.empty() && out.back() == ' ') out.pop_back();
      out += c;
      if (c == ',') out += ' ';
    } else {
      out += ' ';
    }
  }
  std::string collapsed;
  for (char c : out) {
    if (c == ' ' && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed += c;
  }
  while (!collapsed.empty() && (collapsed.back() == ' ' || collapsed.back() == ',')) {
    collapsed.pop_back();
  }
  return collapsed;
}

namespace {

std::vector<std::string> split_clauses(const std::string& text) {
  static const std::regex sep(R"(,? (?:and )?then )");
  std::vector<std::string> out;
  std::sregex_token_iterator it(text.begin(), text.end(), sep, -1);
  for (; it != std::sregex_token_iterator(); ++it) {
    if (!it->str().empty()) out.push_back(it->str());
  }
  return out;
}

std::string strip_politeness(std::string s) {
  for (const char* p : {"please, ", "please ", "robot, ", "robot ", "can you ", "could you "}) {
    if (s.rfind(p, 0) == 0) s.erase(0, std::string(p).size());
  }
  for (const std::string suffix : {", please", " please", " for me", " to me"}) {
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.erase(s.size() - suffix.size());
    }
  }
  return s;
}

bool clause_calls(const std::string& clause, std::vector<grammar::ActionCall>& out) {
  static const std::regex pick(R"(^(?:grab|pick up|take|get) (?:the )?(.+)$)");
  static const std::regex give(R"(^(?:give me|hand me|hand over|pass me|give) (?:the )?(.+)$)");
  static const std::regex side(
      R"(^(?:move|put|place) (?:the )?(.+?) (?:to the |on the )?(left|right) of (?:the )?(.+)$)");
  static const std::regex vert(R"(^(?:move|put|place) (?:the )?(.+?) (above|below) (?:the )?(.+)$)");
  static const std::regex at(
      R"(^(?:move|put|place) (?:the )?(.+?) (?:at|to) (-?\d+(?:\.\d+)?),? (-?\d+(?:\.\d+)?)$)");
  const std::string c = strip_politeness(clause);
  std::smatch m;
  if (std::regex_match(c, m, at)) {
    out.push_back({"place_at", {m[1], m[2], m[3]}});
  } else if (std::regex_match(c, m, side)) {
    out.push_back({"move_object_to_" + m[2].str() + "_of", {m[1], m[3]}});
  } else if (std::regex_match(c, m, vert)) {
    out.push_back({"move_object_" + m[2].str(), {m[1], m[3]}});
  } else if (std::regex_match(c, m, give)) {
    out.push_back({"pick_up", {m[1]}});
    out.push_back({"hand_over", {m[1]}});
  } else if (std::regex_match(c, m, pick)) {
    out.push_back({"pick_up", {m[1]}});
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::string mock_extract(std::string_view transcript) {
  std::vector<grammar::ActionCall> calls;
  for (const auto& clause : split_clauses(normalize_text(transcript))) {
    if (!clause_calls(clause, calls)) return "[]";
  }
  return grammar::to_canonical(calls);
}

MockTranscriber::MockTranscriber(Clock& clock, LatencyProfile latency, std::uint64_t seed)
    : clock_(clock), latency_(latency), rng_(seed) {}

std::string MockTranscriber::transcribe(const SpeechInput& input) {
  clock_.advance(latency_.sample(rng_));
  return input.spoken_text;
}

MockActionExtractor::MockActionExtractor(Clock& clock, LatencyProfile latency, std::uint64_t seed)
    : clock_(clock), latency_(latency), rng_(seed) {}

std::string MockActionExtractor::extract(std::string_view transcript) {
  clock_.advance(latency_.sample(rng_));
  return mock_extract(transcript);
}

TimedDetector::TimedDetector(perception::Detector& inner, Clock& clock, LatencyProfile latency,
                             std::uint64_t seed)
    : inner_(inner), clock_(clock), latency_(latency), rng_(seed) {}

std::optional<BBox> TimedDetector::detect(std::string_view label) {
  clock_.advance(latency_.sample(rng_));
  return inner_.detect(label);
}

std::string corrupt_transcript(std::string_view transcript) {
  std::string t(transcript);
  while (!t.empty() && t.back() == ' ') t.pop_back();
  const auto cut = t.find_last_of(' ');
  if (cut == std::string::npos) return "uh";
  return t.substr(0, cut);
}

std::string corrupt_actions(std::string_view raw) {
  std::vector<grammar::ActionCall> calls;
  try {
    calls = grammar::parse_actions(raw);
  } catch (const grammar::ParseError&) {
    return "[]";
  }
  if (calls.empty()) return "[]";
  auto& c = calls.front();
  static const std::pair<const char*, const char*> swaps[] = {
      {"pick_up", "hand_over"},
      {"move_object_to_left_of", "move_object_to_right_of"},
      {"move_object_above", "move_object_below"}};
  bool changed = false;
  for (const auto& [a, b] : swaps) {
    if (c.method == a || c.method == b) {
      c.method = c.method == a ? b : a;
      changed = true;
      break;
    }
  }
  if (!changed && c.method == "place_at" && c.args.size() == 3) {
    if (c.args[1] == c.args[2]) {
      c.args[2] += "1";
    } else {
      std::swap(c.args[1], c.args[2]);
    }
    changed = true;
  }
  if (!changed) calls.erase(calls.begin());
  return grammar::to_canonical(calls);
}

ExternalEndpoints ExternalEndpoints::from_env() {
  ExternalEndpoints e;
  auto get = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  e.stt_url = get("HRI_STT_URL");
  e.ae_url = get("HRI_AE_URL");
  e.od_url = get("HRI_OD_URL");
  if (const auto t = get("HRI_HTTP_TIMEOUT"); !t.empty()) {
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || !(v > 0.0)) {
      throw std::invalid_argument("HRI_HTTP_TIMEOUT must be a positive number of seconds");
    }
    e.timeout = v;
  }
  return e;
}

void ExternalEndpoints::require_all() const {
  std::string missing;
  if (stt_url.empty()) missing += " HRI_STT_URL";
  if (ae_url.empty()) missing += " HRI_AE_URL";
  if (od_url.empty()) missing += " HRI_OD_URL";
  if (!missing.empty()) {
    throw std::invalid_argument("external adapters need endpoint URLs; unset:" + missing);
  }
  for (const auto* u : {&stt_url, &ae_url, &od_url}) net::parse_endpoint(*u);
}

namespace {

std::chrono::milliseconds to_ms(double seconds) {
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

std::string text_field(const nlohmann::json& reply, const std::string& url) {
  if (!reply.is_object() || !reply.contains("text") || !reply.at("text").is_string()) {
    throw net::HttpError(url + ": reply lacks a string \"text\"");
  }
  return reply.at("text").get<std::string>();
}

}  // namespace

HttpTranscriber::HttpTranscriber(std::string url, double timeout)
    : url_(std::move(url)), timeout_(timeout) {
  net::parse_endpoint(url_);
}

std::string HttpTranscriber::transcribe(const SpeechInput& input) {
  return text_field(
      net::post_json(url_, {{"sample_rate", input.sample_rate}, {"samples", input.samples}},
                     to_ms(timeout_)),
      url_);
}

HttpActionExtractor::HttpActionExtractor(std::string url, double timeout)
    : url_(std::move(url)), timeout_(timeout) {
  net::parse_endpoint(url_);
}

std::string HttpActionExtractor::extract(std::string_view transcript) {
  return text_field(net::post_json(url_, {{"transcript", transcript}}, to_ms(timeout_)), url_);
}

}  // namespace hri::orch
