#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "owc/classifier.hpp"
#include "owc/descriptor.hpp"
#include "owc/geometry.hpp"

namespace owc {

struct BackendHandshake {
  std::string name;
  std::size_t dim = 0;
  std::size_t batch_limit = 0;
};

struct BackendOptions {
  std::chrono::milliseconds timeout{30000};  // per response line
};

/// A child process speaking the featurization protocol: one JSON message per
/// line on its stdin/stdout.
///
///   -> {"op":"hello"}
///   <- {"name":..., "dim":D, "batch_limit":B}
///   -> {"op":"featurize","clouds":[{"id":..., "points":[[x,y,z],...]}]}
///   <- {"features":[{"id":..., "vector":[...]}]}      or {"error": "..."}
///   -> {"op":"shutdown"}                                (child exits 0)
///
/// Responses are validated before anything is returned: ids must match the
/// request one-to-one and in order, every vector must have the handshake dim
/// and finite entries. Any violation raises ErrorKind::Backend.
class BackendProcess {
 public:
  /// Spawns `/bin/sh -c command` and performs the handshake.
  BackendProcess(const std::string& command, BackendOptions options = {});
  ~BackendProcess();

  BackendProcess(const BackendProcess&) = delete;
  BackendProcess& operator=(const BackendProcess&) = delete;

  const BackendHandshake& handshake() const noexcept { return handshake_; }

  /// Splits into batch_limit-sized requests; clouds are sent as given, so
  /// callers pass augmented clouds.
  std::vector<FeatureVector> featurize(std::span<const PointCloud> clouds);

  /// Sends one raw message and returns the parsed reply line.
  nlohmann::json request(const nlohmann::json& message);

  /// Sends shutdown and waits for the child; returns its exit status
  /// (-1 if killed by a signal or timed out).
  int shutdown();

  bool running() const noexcept { return pid_ > 0; }

 private:
  void send_line(const std::string& line);
  std::string read_line();
  int reap(std::chrono::milliseconds wait);

  BackendOptions options_;
  BackendHandshake handshake_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

Featurizer backend_featurizer(std::shared_ptr<BackendProcess> backend);

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  bool passed() const noexcept;
};

/// Exercises a backend command against the protocol: handshake, id matching,
/// order preservation, dim stability across batches, error replies that keep
/// the loop alive, and a clean shutdown with exit code 0.
ConformanceReport run_conformance(const std::string& command, BackendOptions options = {});

}  // namespace owc
