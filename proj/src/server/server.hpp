// Copyright (c) 2026 The hrpnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HRPNAV_SERVER__SERVER_HPP_
#define HRPNAV_SERVER__SERVER_HPP_

#include <cstdint>
#include <memory>
#include <string>

#include "hrpnav/session.hpp"

namespace hrpnav
{

struct ServerOptions
{
  std::string address{"127.0.0.1"};
  uint16_t port{8765};  // 0 picks an ephemeral port
  SessionConfig session;
  /// Simulated seconds per wall-clock second for the live run.
  double time_scale{1.0};
  /// Stop on SIGINT / SIGTERM.
  bool handle_signals{false};
};

/**
 * Serves one Session over TCP. A connection whose first byte starts an HTTP
 * request is upgraded to a WebSocket (one JSON message per text frame); any
 * other connection, including one that sends nothing for 100 ms, speaks
 * newline-delimited JSON. Both share the same schema.
 *
 * All session work runs on the single thread that calls run().
 */
class Server
{
public:
  /// Binds immediately. Throws Error(PortInUse) if the port is taken.
  explicit Server(ServerOptions options);
  ~Server();

  Server(const Server &) = delete;
  Server & operator=(const Server &) = delete;

  uint16_t port() const;

  /// Blocks until stop() is called.
  void run();

  /// Safe to call from any thread.
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hrpnav

#endif  // HRPNAV_SERVER__SERVER_HPP_
