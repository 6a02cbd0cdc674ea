// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace agentft {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration: unknown prompt set, model, pool state, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition (empty query, n = 0, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Dataset or artifact file did not match its documented format.
class LoadError : public Error {
 public:
  using Error::Error;
};

class ConversionError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

/// HTTP-level failure. `status` is 0 when no response was received.
class TransportError : public Error {
 public:
  TransportError(int status, std::string body, const std::string& what)
      : Error(what), status_(status), body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace agentft
