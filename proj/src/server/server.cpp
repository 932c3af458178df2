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

#include "server/server.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <string_view>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "hrpnav/error.hpp"

namespace hrpnav
{

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace
{

constexpr size_t kMaxLineBytes = 1 << 20;
constexpr auto kDetectWindow = std::chrono::milliseconds(100);

class Connection : public std::enable_shared_from_this<Connection>
{
public:
  virtual ~Connection() = default;
  virtual void send(std::string line) = 0;
  virtual void close() = 0;
};

}  // namespace

struct ServerCore
{
  explicit ServerCore(ServerOptions opts)
  : options(std::move(opts)),
    acceptor(ioc),
    tick_timer(ioc),
    signals(ioc),
    session(options.session)
  {
    if (!(options.time_scale > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "time scale must be positive");
    }
    boost::system::error_code ec;
    const auto address = asio::ip::make_address(options.address, ec);
    if (ec) {
      throw Error(ErrorCode::InvalidArgument, "bad bind address '" + options.address + "'");
    }
    const tcp::endpoint endpoint(address, options.port);
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) {
      acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    }
    if (!ec) {
      acceptor.bind(endpoint, ec);
    }
    if (ec == asio::error::address_in_use) {
      throw Error(
        ErrorCode::PortInUse, "port " + std::to_string(options.port) + " is already in use");
    }
    if (!ec) {
      acceptor.listen(asio::socket_base::max_listen_connections, ec);
    }
    if (ec) {
      throw Error(ErrorCode::Io, "cannot listen on " + options.address + ": " + ec.message());
    }
    if (options.handle_signals) {
      signals.add(SIGINT);
      signals.add(SIGTERM);
      signals.async_wait([this](const boost::system::error_code & e, int) {
          if (!e) {
            shutdown();
          }
        });
    }
    accept();
  }

  void accept();
  void start_connection(tcp::socket socket);
  void deliver(const Outbox & out);
  void on_open(ClientId id, std::shared_ptr<Connection> conn);
  void on_line(ClientId id, std::string_view line);
  void on_close(ClientId id);
  void schedule_tick();
  void shutdown();

  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::steady_timer tick_timer;
  asio::signal_set signals;
  Session session;
  std::map<ClientId, std::shared_ptr<Connection>> connections;
  ClientId next_id{1};
  bool ticking{false};
  bool stopped{false};
};

namespace
{

class PlainConnection : public Connection
{
public:
  PlainConnection(ServerCore & server, tcp::socket socket, ClientId id, std::string initial)
  : server_(server), socket_(std::move(socket)), id_(id), buffer_(std::move(initial)) {}

  void start()
  {
    drain_lines();
    read();
  }

  void send(std::string line) override
  {
    line.push_back('\n');
    queue_.push_back(std::move(line));
    if (queue_.size() == 1) {
      write();
    }
  }

  void close() override
  {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

private:
  void drain_lines()
  {
    size_t pos;
    while (!closed_ && (pos = buffer_.find('\n')) != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.find_first_not_of(" \t") != std::string::npos) {
        server_.on_line(id_, line);
      }
    }
  }

  void read()
  {
    if (buffer_.size() > kMaxLineBytes) {
      fail();
      return;
    }
    auto self = std::static_pointer_cast<PlainConnection>(shared_from_this());
    asio::async_read_until(
      socket_, asio::dynamic_buffer(buffer_, kMaxLineBytes + 1), '\n',
      [self](const boost::system::error_code & ec, size_t) {
        if (ec) {
          self->fail();
          return;
        }
        self->drain_lines();
        self->read();
      });
  }

  void write()
  {
    auto self = std::static_pointer_cast<PlainConnection>(shared_from_this());
    asio::async_write(
      socket_, asio::buffer(queue_.front()),
      [self](const boost::system::error_code & ec, size_t) {
        if (ec) {
          self->fail();
          return;
        }
        self->queue_.pop_front();
        if (!self->queue_.empty()) {
          self->write();
        }
      });
  }

  void fail()
  {
    if (closed_) {
      return;
    }
    closed_ = true;
    close();
    server_.on_close(id_);
  }

  ServerCore & server_;
  tcp::socket socket_;
  ClientId id_;
  std::string buffer_;
  std::deque<std::string> queue_;
  bool closed_{false};
};

class WebSocketConnection : public Connection
{
public:
  WebSocketConnection(ServerCore & server, tcp::socket socket, ClientId id)
  : server_(server), ws_(std::move(socket)), id_(id) {}

  void start(http::request<http::string_body> request)
  {
    ws_.text(true);
    ws_.read_message_max(kMaxLineBytes);
    auto self = std::static_pointer_cast<WebSocketConnection>(shared_from_this());
    ws_.async_accept(
      request, [self](const boost::system::error_code & ec) {
        if (ec) {
          self->closed_ = true;
          return;
        }
        self->server_.on_open(self->id_, self);
        self->read();
      });
  }

  void send(std::string line) override
  {
    queue_.push_back(std::move(line));
    if (queue_.size() == 1) {
      write();
    }
  }

  void close() override
  {
    boost::system::error_code ec;
    beast::get_lowest_layer(ws_).close(ec);
  }

private:
  void read()
  {
    auto self = std::static_pointer_cast<WebSocketConnection>(shared_from_this());
    ws_.async_read(
      buffer_, [self](const boost::system::error_code & ec, size_t) {
        if (ec) {
          self->fail();
          return;
        }
        const std::string text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        size_t start = 0;
        while (start <= text.size() && !self->closed_) {
          size_t end = text.find('\n', start);
          if (end == std::string::npos) {
            end = text.size();
          }
          const std::string_view line(text.data() + start, end - start);
          if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
            self->server_.on_line(self->id_, line);
          }
          start = end + 1;
        }
        if (!self->closed_) {
          self->read();
        }
      });
  }

  void write()
  {
    auto self = std::static_pointer_cast<WebSocketConnection>(shared_from_this());
    ws_.async_write(
      asio::buffer(queue_.front()), [self](const boost::system::error_code & ec, size_t) {
        if (ec) {
          self->fail();
          return;
        }
        self->queue_.pop_front();
        if (!self->queue_.empty()) {
          self->write();
        }
      });
  }

  void fail()
  {
    if (closed_) {
      return;
    }
    closed_ = true;
    close();
    server_.on_close(id_);
  }

  ServerCore & server_;
  websocket::stream<tcp::socket> ws_;
  ClientId id_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool closed_{false};
};

// Reads the first bytes of a connection to pick the transport.
class Handshake : public std::enable_shared_from_this<Handshake>
{
public:
  Handshake(ServerCore & server, tcp::socket socket)
  : server_(server), socket_(std::move(socket)), timer_(server.ioc) {}

  // A client that stays silent past the detection window speaks plain lines.
  void start()
  {
    auto self = shared_from_this();
    socket_.async_read_some(
      buffer_.prepare(4096), [self](const boost::system::error_code & ec, size_t n) {
        self->read_done_ = true;
        self->timer_.cancel();
        if (n > 0) {
          self->buffer_.commit(n);
        } else if (!(ec == asio::error::operation_aborted && self->timed_out_)) {
          return;
        }
        self->dispatch();
      });
    timer_.expires_after(kDetectWindow);
    timer_.async_wait(
      [self](const boost::system::error_code & ec) {
        if (ec || self->read_done_) {
          return;
        }
        self->timed_out_ = true;
        boost::system::error_code ignored;
        self->socket_.cancel(ignored);
      });
  }

private:
  void dispatch()
  {
    const std::string initial = beast::buffers_to_string(buffer_.data());
    if (!initial.empty() && initial.front() == 'G') {
      read_http();
      return;
    }
    const ClientId id = server_.next_id++;
    auto conn = std::make_shared<PlainConnection>(server_, std::move(socket_), id, initial);
    server_.on_open(id, conn);
    conn->start();
  }

  void read_http()
  {
    auto self = shared_from_this();
    http::async_read(
      socket_, buffer_, request_, [self](const boost::system::error_code & ec, size_t) {
        if (ec) {
          return;
        }
        if (!websocket::is_upgrade(self->request_)) {
          self->reject();
          return;
        }
        const ClientId id = self->server_.next_id++;
        auto conn = std::make_shared<WebSocketConnection>(
          self->server_, std::move(self->socket_), id);
        conn->start(std::move(self->request_));
      });
  }

  void reject()
  {
    auto response = std::make_shared<http::response<http::string_body>>(
      http::status::upgrade_required, request_.version());
    response->set(http::field::upgrade, "websocket");
    response->set(http::field::content_type, "text/plain");
    response->body() = "hrpnav session endpoint: connect with a WebSocket or raw TCP\n";
    response->prepare_payload();
    auto self = shared_from_this();
    http::async_write(
      socket_, *response, [self, response](const boost::system::error_code &, size_t) {
        boost::system::error_code ignored;
        self->socket_.shutdown(tcp::socket::shutdown_both, ignored);
      });
  }

  ServerCore & server_;
  tcp::socket socket_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  bool read_done_{false};
  bool timed_out_{false};
};

}  // namespace

void ServerCore::accept()
{
  acceptor.async_accept(
    [this](const boost::system::error_code & ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted && !stopped) {
          accept();
        }
        return;
      }
      boost::system::error_code ignored;
      socket.set_option(tcp::no_delay(true), ignored);
      std::make_shared<Handshake>(*this, std::move(socket))->start();
      accept();
    });
}

void ServerCore::deliver(const Outbox & out)
{
  for (const auto & msg : out) {
    if (msg.to) {
      auto it = connections.find(*msg.to);
      if (it != connections.end()) {
        it->second->send(msg.line);
      }
    } else {
      for (auto & [id, conn] : connections) {
        conn->send(msg.line);
      }
    }
  }
}

void ServerCore::on_open(ClientId id, std::shared_ptr<Connection> conn)
{
  connections[id] = std::move(conn);
  deliver(session.connect(id));
}

void ServerCore::on_line(ClientId id, std::string_view line)
{
  deliver(session.handle_line(id, line));
  schedule_tick();
}

void ServerCore::on_close(ClientId id)
{
  connections.erase(id);
  deliver(session.disconnect(id));
}

void ServerCore::schedule_tick()
{
  if (ticking || stopped || !session.live_run_active()) {
    return;
  }
  ticking = true;
  const auto period = std::chrono::duration_cast<asio::steady_timer::duration>(
    std::chrono::duration<double>(options.session.sim.dt / options.time_scale));
  tick_timer.expires_after(period);
  tick_timer.async_wait(
    [this](const boost::system::error_code & ec) {
      ticking = false;
      if (ec || stopped) {
        return;
      }
      deliver(session.tick());
      schedule_tick();
    });
}

void ServerCore::shutdown()
{
  if (stopped) {
    return;
  }
  stopped = true;
  boost::system::error_code ignored;
  acceptor.close(ignored);
  tick_timer.cancel();
  signals.cancel(ignored);
  auto open = std::move(connections);
  for (auto & [id, conn] : open) {
    conn->close();
  }
  ioc.stop();
}

struct Server::Impl
{
  explicit Impl(ServerOptions options)
  : core(std::move(options)) {}

  ServerCore core;
};

Server::Server(ServerOptions options)
: impl_(std::make_unique<Impl>(std::move(options)))
{
}

Server::~Server() = default;

uint16_t Server::port() const
{
  return impl_->core.acceptor.local_endpoint().port();
}

void Server::run()
{
  impl_->core.ioc.run();
}

void Server::stop()
{
  asio::post(impl_->core.ioc, [core = &impl_->core] {core->shutdown();});
}

}  // namespace hrpnav
