// SPDX-License-Identifier: Apache-2.0
// Loopback HTTP server for exercising the real client stack.
#pragma once

#include <httplib.h>

#include <string>
#include <thread>

namespace agentft::testing {

class StubServer {
 public:
  StubServer() = default;
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;
  ~StubServer() { stop(); }

  httplib::Server& server() { return server_; }

  /// Binds an ephemeral port and serves on a background thread.
  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace agentft::testing
