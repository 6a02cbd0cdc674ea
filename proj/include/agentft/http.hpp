// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace agentft {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpParams = std::multimap<std::string, std::string>;
using HttpHeaders = std::multimap<std::string, std::string>;

struct MultipartField {
  std::string name;
  std::string content;
  std::string filename;
  std::string content_type;
};

/// Minimal HTTP surface used by the search, chat and fine-tune clients.
/// Implementations throw TransportError(0, ...) when no response arrives;
/// any HTTP status is returned, not thrown.
class HttpClient {
 public:
  virtual ~HttpClient() = default;

  virtual HttpResponse get(const std::string& path, const HttpParams& params, const HttpHeaders& headers) = 0;
  virtual HttpResponse post_json(const std::string& path, const std::string& body, const HttpHeaders& headers) = 0;
  virtual HttpResponse post_multipart(const std::string& path, const std::vector<MultipartField>& fields,
                                      const HttpHeaders& headers) = 0;
};

/// cpp-httplib backed client for `scheme://host[:port][/prefix]`. Safe to
/// share between threads: each request opens its own connection.
std::shared_ptr<HttpClient> make_http_client(const std::string& base_url, int timeout_seconds = 60);

}  // namespace agentft
