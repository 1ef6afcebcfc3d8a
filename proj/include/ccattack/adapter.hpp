#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccattack/lang.hpp"

namespace ccattack::adapter {

enum class AdapterErrorKind { spawn, io, timeout, protocol, id_mismatch };

struct AdapterError : std::runtime_error {
  AdapterError(AdapterErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind(kind) {}
  AdapterErrorKind kind;
};

struct AdapterConfig {
  int max_in_flight = 8;   // outstanding requests on the wire
  int timeout_ms = 30000;  // per-response wait; one retransmit, then error
  int gen_length = 8;      // comment length for the builtin toy model
};

// A comment-generation model reached over line-delimited JSON. Requests are
// {"id": n, "code": s}, responses {"id": n, "comment": s}; responses may
// arrive out of order. Implementations are safe to call from several threads.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  // One comment per input, order-preserving.
  virtual std::string query(const std::string& code) = 0;
  // Total requests issued over the adapter's lifetime (retransmits included).
  virtual std::size_t queries() const = 0;
};

// exec:<command line>       subprocess speaking the protocol on stdio
// tcp:<host>:<port>         same protocol over a socket
// builtin:surrogate:<path>  retrieval model built from a training JSONL
// builtin:toy:<path>        trained toy model file
// Throws AdapterError(spawn) on unparseable specs or connection failures.
std::unique_ptr<ModelAdapter> make_adapter(const std::string& spec, lang::Lang lang,
                                           const AdapterConfig& config = {});

// In-process adapter for builtin models and tests.
std::unique_ptr<ModelAdapter> make_callback_adapter(
    std::function<std::string(const std::string&)> fn);

}  // namespace ccattack::adapter
