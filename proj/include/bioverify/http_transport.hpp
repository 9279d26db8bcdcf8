#pragma once

#include <httplib.h>

#include <stdexcept>
#include <string>

#include "bioverify/genharness.hpp"

namespace bioverify {

/// Live chat-completion transport. The endpoint is a full URL, e.g.
/// "https://api.example.com/v1/chat/completions"; the API key goes into the
/// Authorization header when present.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key)
      : api_key_(std::move(api_key)) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw std::invalid_argument("endpoint must be an http(s) URL: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    base_ = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);
  }

  TransportResult send(const std::string& request_body) override {
    httplib::Client client(base_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const auto res = client.Post(path_, headers, request_body, "application/json");
    if (!res) return {false, 0, "", httplib::to_string(res.error())};
    return {true, res->status, res->body, ""};
  }

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
};

}  // namespace bioverify
