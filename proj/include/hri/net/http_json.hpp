#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace hri::net {

struct Endpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/detect"
};

/// Splits "http://host:port/path" (path defaults to "/").
Endpoint parse_endpoint(const std::string& url);

class HttpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// POSTs a JSON body and parses a JSON reply. Throws HttpError on transport
/// failures, non-2xx status, or an unparseable body.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace hri::net
