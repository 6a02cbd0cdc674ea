// SPDX-License-Identifier: Apache-2.0
#include "agentft/http.hpp"

#include <httplib.h>

#include "agentft/error.hpp"

namespace agentft {
namespace {

class HttplibClient final : public HttpClient {
 public:
  HttplibClient(std::string origin, std::string prefix, int timeout_seconds)
      : origin_(std::move(origin)), prefix_(std::move(prefix)), timeout_(timeout_seconds) {}

  HttpResponse get(const std::string& path, const HttpParams& params, const HttpHeaders& headers) override {
    auto client = connect();
    httplib::Params p(params.begin(), params.end());
    httplib::Headers h(headers.begin(), headers.end());
    return unwrap(client->Get(prefix_ + path, p, h), "GET " + path);
  }

  HttpResponse post_json(const std::string& path, const std::string& body, const HttpHeaders& headers) override {
    auto client = connect();
    httplib::Headers h(headers.begin(), headers.end());
    return unwrap(client->Post(prefix_ + path, h, body, "application/json"), "POST " + path);
  }

  HttpResponse post_multipart(const std::string& path, const std::vector<MultipartField>& fields,
                              const HttpHeaders& headers) override {
    auto client = connect();
    httplib::Headers h(headers.begin(), headers.end());
    httplib::MultipartFormDataItems items;
    for (const auto& f : fields) items.push_back({f.name, f.content, f.filename, f.content_type});
    return unwrap(client->Post(prefix_ + path, h, items), "POST " + path);
  }

 private:
  std::unique_ptr<httplib::Client> connect() const {
    auto client = std::make_unique<httplib::Client>(origin_);
    client->set_connection_timeout(timeout_, 0);
    client->set_read_timeout(timeout_, 0);
    client->set_write_timeout(timeout_, 0);
    return client;
  }

  static HttpResponse unwrap(const httplib::Result& result, const std::string& what) {
    if (!result) throw TransportError(0, "", what + ": " + httplib::to_string(result.error()));
    return {result->status, result->body};
  }

  std::string origin_;
  std::string prefix_;
  int timeout_;
};

}  // namespace

std::shared_ptr<HttpClient> make_http_client(const std::string& base_url, int timeout_seconds) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + base_url);
  std::string scheme = base_url.substr(0, scheme_end);
#ifndef AGENTFT_WITH_TLS
  if (scheme == "https") throw ConfigError("built without TLS support; cannot reach " + base_url);
#endif
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported scheme: " + base_url);
  auto path_start = base_url.find('/', scheme_end + 3);
  std::string origin = base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return std::make_shared<HttplibClient>(std::move(origin), std::move(prefix), timeout_seconds);
}

}  // namespace agentft
