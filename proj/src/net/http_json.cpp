#include "hri/net/http_json.hpp"

#include <httplib.h>

namespace hri::net {

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
    throw HttpError("unsupported endpoint '" + url + "' (expected http://host[:port]/path)");
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout) {
  const auto ep = parse_endpoint(url);
  httplib::Client client(ep.scheme_host_port);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) throw HttpError(url + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw HttpError(url + ": HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw HttpError(url + ": bad JSON reply: " + e.what());
  }
}

}  // namespace hri::net
