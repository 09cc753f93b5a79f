#pragma once

// Network front end: one port serving WebSocket command/telemetry channels and
// static cockpit assets over HTTP.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cpgait/runtime.hpp"

namespace cpgait {

namespace detail {
struct ServiceImpl;
}

struct ServiceOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;             // 0 picks a free port
  std::size_t decimate = 1;           // broadcast every Nth frame
  std::filesystem::path www;          // static asset root; empty serves a stub page
  std::optional<std::filesystem::path> record;
  bool tick_thread = true;            // false: frames advance only through step()
  std::size_t max_backlog = 1024;     // outbound messages before a slow client is dropped
};

class TeleopService {
 public:
  /// Binds the listener. Throws Error when the port cannot be bound or the
  /// record file cannot be opened.
  TeleopService(RuntimeConfig config, ServiceOptions options);
  ~TeleopService();

  TeleopService(const TeleopService&) = delete;
  TeleopService& operator=(const TeleopService&) = delete;

  std::uint16_t port() const;

  /// Starts the network thread and, if enabled, the fixed-rate tick thread.
  void start();

  /// Stops ticking, applies any queued commands in one final frame, closes the
  /// record and the listener. Idempotent.
  void stop();

  /// Drains the queue and advances one frame. For use without the tick thread.
  TelemetryFrame step();

  std::uint64_t ticks() const;
  std::size_t client_count() const;
  std::size_t pending_commands() const;

 private:
  std::unique_ptr<detail::ServiceImpl> impl_;
};

}  // namespace cpgait
