#include "owc/backend.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <random>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "owc/error.hpp"

namespace owc {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

[[noreturn]] void backend_error(const std::string& msg) {
  throw Error(ErrorKind::Backend, "backend: " + msg);
}

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

json cloud_message(const PointCloud& cloud) {
  json pts = json::array();
  for (const auto& p : cloud.points()) pts.push_back({p[0], p[1], p[2]});
  return {{"id", cloud.id()}, {"points", std::move(pts)}};
}

}  // namespace

BackendProcess::BackendProcess(const std::string& command, BackendOptions options)
    : options_(options) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) backend_error("pipe failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    backend_error("pipe failed");
  }
  pid_ = fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    backend_error("fork failed");
  }
  if (pid_ == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid_, pid_);
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    const json reply = request({{"op", "hello"}});
    if (!reply.is_object() || !reply.contains("name") || !reply["name"].is_string() ||
        !reply.contains("dim") || !reply["dim"].is_number_unsigned() ||
        !reply.contains("batch_limit") || !reply["batch_limit"].is_number_unsigned()) {
      backend_error("malformed handshake reply: " + reply.dump());
    }
    handshake_.name = reply["name"].get<std::string>();
    handshake_.dim = reply["dim"].get<std::size_t>();
    handshake_.batch_limit = reply["batch_limit"].get<std::size_t>();
    if (handshake_.dim == 0 || handshake_.batch_limit == 0) {
      backend_error("handshake declares zero dim or batch_limit");
    }
  } catch (...) {
    reap(std::chrono::milliseconds(0));
    throw;
  }
}

BackendProcess::~BackendProcess() {
  if (pid_ > 0) {
    try {
      send_line(json{{"op", "shutdown"}}.dump());
    } catch (...) {
    }
    reap(std::chrono::milliseconds(2000));
  }
}

void BackendProcess::send_line(const std::string& line) {
  if (to_child_ < 0) backend_error("process is not running");
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      backend_error(std::string("write to backend failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string BackendProcess::read_line() {
  const auto deadline = Clock::now() + options_.timeout;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) backend_error("timed out waiting for a response");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      backend_error("poll failed");
    }
    if (ready == 0) backend_error("timed out waiting for a response");
    char chunk[65536];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      backend_error("read from backend failed");
    }
    if (n == 0) backend_error("backend closed its output (process exited?)");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

json BackendProcess::request(const json& message) {
  send_line(message.dump());
  const std::string line = read_line();
  try {
    return json::parse(line);
  } catch (const json::exception&) {
    backend_error("reply is not valid JSON: " + line.substr(0, 200));
  }
}

std::vector<FeatureVector> BackendProcess::featurize(std::span<const PointCloud> clouds) {
  std::vector<FeatureVector> out;
  out.reserve(clouds.size());
  for (std::size_t begin = 0; begin < clouds.size(); begin += handshake_.batch_limit) {
    const std::size_t end = std::min(clouds.size(), begin + handshake_.batch_limit);
    json msg = {{"op", "featurize"}, {"clouds", json::array()}};
    for (std::size_t i = begin; i < end; ++i) msg["clouds"].push_back(cloud_message(clouds[i]));

    const json reply = request(msg);
    if (reply.contains("error")) backend_error("featurize failed: " + reply["error"].dump());
    if (!reply.contains("features") || !reply["features"].is_array()) {
      backend_error("reply lacks a 'features' array");
    }
    const auto& rows = reply["features"];
    if (rows.size() != end - begin) {
      backend_error("expected " + std::to_string(end - begin) + " features, got " +
                    std::to_string(rows.size()));
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& row = rows[k];
      const std::string& want = clouds[begin + k].id();
      if (!row.is_object() || !row.contains("id") || !row["id"].is_string()) {
        backend_error("feature row " + std::to_string(k) + " has no id");
      }
      if (row["id"].get<std::string>() != want) {
        backend_error("id mismatch at position " + std::to_string(k) + ": expected '" +
                      want + "', got '" + row["id"].get<std::string>() + "'");
      }
      if (!row.contains("vector") || !row["vector"].is_array()) {
        backend_error("feature '" + want + "' has no vector");
      }
      FeatureVector f;
      f.source = handshake_.name;
      for (const auto& v : row["vector"]) {
        if (!v.is_number()) backend_error("feature '" + want + "' has a non-numeric value");
        const double x = v.get<double>();
        if (!std::isfinite(x)) backend_error("feature '" + want + "' has a non-finite value");
        f.values.push_back(x);
      }
      if (f.dim() != handshake_.dim) {
        backend_error("feature '" + want + "' has dim " + std::to_string(f.dim()) +
                      ", handshake declared " + std::to_string(handshake_.dim));
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

int BackendProcess::reap(std::chrono::milliseconds wait) {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  int status = 0;
  int code = -1;
  if (pid_ > 0) {
    const auto deadline = Clock::now() + wait;
    pid_t r = 0;
    while ((r = waitpid(pid_, &status, WNOHANG)) == 0 && Clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (r == 0) {
      kill(-pid_, SIGKILL);  // whole group, so shell grandchildren go too
      waitpid(pid_, &status, 0);
    } else if (r > 0 && WIFEXITED(status)) {
      code = WEXITSTATUS(status);
    }
    pid_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  return code;
}

int BackendProcess::shutdown() {
  if (pid_ <= 0) return -1;
  try {
    send_line(json{{"op", "shutdown"}}.dump());
  } catch (const Error&) {
  }
  return reap(options_.timeout);
}

Featurizer backend_featurizer(std::shared_ptr<BackendProcess> backend) {
  return [backend](std::span<const PointCloud> clouds) { return backend->featurize(clouds); };
}

bool ConformanceReport::passed() const noexcept {
  if (checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

ConformanceReport run_conformance(const std::string& command, BackendOptions options) {
  ConformanceReport report;
  const auto record = [&](std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };

  std::unique_ptr<BackendProcess> backend;
  try {
    backend = std::make_unique<BackendProcess>(command, options);
  } catch (const Error& e) {
    record("handshake", false, e.what());
    return report;
  }
  const auto hs = backend->handshake();
  record("handshake", true,
         hs.name + " dim=" + std::to_string(hs.dim) + " batch_limit=" +
             std::to_string(hs.batch_limit));

  // Small augmented probe clouds with distinct ids.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  std::vector<PointCloud> probes;
  for (int i = 0; i < 3; ++i) {
    std::vector<Point3> pts(64);
    for (auto& p : pts) p = {gauss(rng), gauss(rng) * 0.5, gauss(rng) * 0.25};
    probes.push_back(augment(PointCloud("probe-" + std::to_string(i), pts),
                             AugmentConfig{32, false, 0, false}));
  }

  try {
    const auto first = backend->featurize(std::span(probes).first(1));
    record("featurize", first.size() == 1, "single cloud");
    const auto batch = backend->featurize(probes);
    record("id-matching", batch.size() == probes.size(),
           std::to_string(batch.size()) + " ids matched in order");
    bool stable = true;
    for (const auto& f : batch) stable = stable && f.dim() == hs.dim;
    record("dim-stability", stable, "dim " + std::to_string(hs.dim) + " across batches");
  } catch (const Error& e) {
    record("featurize", false, e.what());
  }

  try {
    const json reply = backend->request({{"op", "no-such-op"}});
    const bool has_error = reply.is_object() && reply.contains("error");
    const json again = backend->request({{"op", "hello"}});
    record("error-reply", has_error && again.value("dim", std::size_t{0}) == hs.dim,
           has_error ? "error reported, loop alive" : "unknown op not reported as error");
  } catch (const Error& e) {
    record("error-reply", false, e.what());
  }

  const int code = backend->shutdown();
  record("shutdown", code == 0, "exit code " + std::to_string(code));
  return report;
}

}  // namespace owc
