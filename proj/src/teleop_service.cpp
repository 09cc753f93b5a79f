#include "cpgait/teleop_service.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "cpgait/session.hpp"
#include "cpgait/wire.hpp"

namespace cpgait {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using Message = std::shared_ptr<const std::string>;

const char* mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

constexpr const char* kStubPage =
    "<!doctype html><title>cpgait</title>"
    "<p>Cockpit assets are not installed. Telemetry and commands: WebSocket on this port.</p>\n";

}  // namespace

namespace detail {

struct ServiceImpl {
  class WsSession;

  ServiceImpl(RuntimeConfig cfg, ServiceOptions opts)
      : config(std::move(cfg)), options(std::move(opts)), runtime(config), acceptor(ioc) {
    if (options.decimate == 0) throw ConfigError("decimate must be >= 1");
    beast::error_code ec;
    const auto addr = net::ip::make_address(options.address, ec);
    if (ec) throw ConfigError("bad listen address " + options.address);
    const tcp::endpoint ep(addr, options.port);
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error("cannot listen on " + options.address + ":" + std::to_string(options.port) +
                  ": " + ec.message());
    }
    if (options.record) {
      record_file.open(*options.record, std::ios::binary | std::ios::trunc);
      if (!record_file) throw ConfigError("cannot write record " + options.record->string());
      writer.emplace(record_file, config);
    }
  }

  void do_accept();
  void serve_http(std::shared_ptr<beast::tcp_stream> stream);

  void attach(std::uint64_t id, const std::shared_ptr<WsSession>& s) {
    std::lock_guard<std::mutex> lock(clients_mutex);
    clients[id] = s;
  }
  void detach(std::uint64_t id) {
    std::lock_guard<std::mutex> lock(clients_mutex);
    clients.erase(id);
  }
  void send_to(std::uint64_t id, Message msg);
  void broadcast(Message msg);

  TelemetryFrame advance() {
    std::lock_guard<std::mutex> lock(tick_mutex);
    const std::uint64_t next_tick = runtime.tick_count() + 1;
    std::vector<std::pair<std::uint64_t, Message>> replies;
    for (QueuedCommand& q : queue.drain()) {
      try {
        runtime.apply(q.command);
      } catch (const CommandError& e) {
        replies.emplace_back(q.client, std::make_shared<const std::string>(error_message(e.what(), q.seq)));
        continue;
      }
      if (writer) writer->command({next_tick, q.client, q.seq, q.command});
      replies.emplace_back(q.client,
                           std::make_shared<const std::string>(ack_message(q.seq, next_tick)));
    }
    TelemetryFrame frame = runtime.tick();
    if (writer) writer->frame(frame);
    ticks.store(frame.tick);
    for (auto& [client, msg] : replies) send_to(client, std::move(msg));
    if (frame.tick % options.decimate == 0) {
      broadcast(std::make_shared<const std::string>(frame_to_json(frame).dump()));
    }
    return frame;
  }

  void tick_loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(config.command_period()));
    auto next = clock::now() + period;
    while (running.load()) {
      std::this_thread::sleep_until(next);
      if (!running.load()) break;
      advance();
      next += period;
      const auto now = clock::now();
      // A long stall (debugger, suspended VM) restarts the schedule instead of bursting.
      if (now - next > 50 * period) next = now + period;
    }
  }

  RuntimeConfig config;
  ServiceOptions options;
  GaitRuntime runtime;
  CommandQueue queue;
  std::mutex tick_mutex;
  std::atomic<std::uint64_t> ticks{0};

  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread io_thread;
  std::thread ticker;
  std::atomic<bool> running{false};
  bool stopped = false;
  std::mutex lifecycle_mutex;

  std::ofstream record_file;
  std::optional<SessionWriter> writer;

  std::mutex clients_mutex;
  std::map<std::uint64_t, std::weak_ptr<WsSession>> clients;
  std::atomic<std::uint64_t> next_client{1};
};

}  // namespace detail

class detail::ServiceImpl::WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, ServiceImpl& svc)
      : ws_(std::move(socket)), svc_(svc), id_(svc.next_client.fetch_add(1)) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->svc_.attach(self->id_, self);
      self->read();
    });
  }

  void send(Message msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), msg = std::move(msg)]() mutable {
      if (self->closing_) return;
      self->outbox_.push_back(std::move(msg));
      if (self->outbox_.size() > self->svc_.options.max_backlog) {
        self->closing_ = true;
        self->svc_.detach(self->id_);
        beast::get_lowest_layer(self->ws_).close();
        return;
      }
      if (self->outbox_.size() == 1) self->write();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->svc_.detach(self->id_);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    std::optional<std::int64_t> seq;
    try {
      CommandMessage msg = parse_command_message(text);
      seq = msg.seq;
      if (last_seq_ && msg.seq <= *last_seq_) {
        throw CommandError("seq " + std::to_string(msg.seq) + " does not increase past " +
                           std::to_string(*last_seq_));
      }
      last_seq_ = msg.seq;
      validate_command(msg.command, svc_.config);
      svc_.queue.push({id_, msg.seq, std::move(msg.command)});
    } catch (const Error& e) {
      if (!seq) seq = peek_seq(text);
      send(std::make_shared<const std::string>(error_message(e.what(), seq)));
    }
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closing_ = true;
                        self->svc_.detach(self->id_);
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  ServiceImpl& svc_;
  std::uint64_t id_;
  beast::flat_buffer buffer_;
  std::deque<Message> outbox_;
  std::optional<std::int64_t> last_seq_;
  bool closing_ = false;
};

void detail::ServiceImpl::send_to(std::uint64_t id, Message msg) {
  std::shared_ptr<WsSession> s;
  {
    std::lock_guard<std::mutex> lock(clients_mutex);
    const auto it = clients.find(id);
    if (it != clients.end()) s = it->second.lock();
  }
  if (s) s->send(std::move(msg));
}

void detail::ServiceImpl::broadcast(Message msg) {
  std::vector<std::shared_ptr<WsSession>> targets;
  {
    std::lock_guard<std::mutex> lock(clients_mutex);
    for (auto& [id, weak] : clients) {
      if (auto s = weak.lock()) targets.push_back(std::move(s));
    }
  }
  for (auto& s : targets) s->send(msg);
}

namespace {

http::response<http::string_body> static_response(const std::filesystem::path& root,
                                                  const http::request<http::string_body>& req) {
  auto reply = [&](http::status status, std::string body, const char* type) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::server, "cpgait");
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    if (req.method() == http::verb::head) res.body().clear();
    return res;
  };

  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return reply(http::status::method_not_allowed, "method not allowed\n", "text/plain");
  }
  std::string target(req.target());
  if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
  if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
    return reply(http::status::bad_request, "bad path\n", "text/plain");
  }
  if (target.back() == '/') target += "index.html";

  if (root.empty()) {
    if (target == "/index.html") return reply(http::status::ok, kStubPage, "text/html");
    return reply(http::status::not_found, "not found\n", "text/plain");
  }
  const std::filesystem::path file = root / target.substr(1);
  std::error_code fs_ec;
  if (!std::filesystem::is_regular_file(file, fs_ec)) {
    return reply(http::status::not_found, "not found\n", "text/plain");
  }
  std::ifstream in(file, std::ios::binary);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return reply(http::status::ok, std::move(body), mime_type(file));
}

struct HttpConnection : std::enable_shared_from_this<HttpConnection> {
  HttpConnection(tcp::socket&& socket, detail::ServiceImpl& svc)
      : stream(std::move(socket)), svc(svc) {}

  void read() {
    req = {};
    stream.expires_after(std::chrono::seconds(30));
    http::async_read(stream, buffer, req,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) {
                         beast::error_code ignore;
                         self->stream.socket().shutdown(tcp::socket::shutdown_send, ignore);
                         return;
                       }
                       self->dispatch();
                     });
  }

  void dispatch();

  void respond() {
    auto res = std::make_shared<http::response<http::string_body>>(
        static_response(svc.options.www, req));
    http::async_write(stream, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec || res->need_eof()) {
                          beast::error_code ignore;
                          self->stream.socket().shutdown(tcp::socket::shutdown_send, ignore);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream;
  detail::ServiceImpl& svc;
  beast::flat_buffer buffer;
  http::request<http::string_body> req;
};

}  // namespace

void HttpConnection::dispatch() {
  if (websocket::is_upgrade(req)) {
    stream.expires_never();
    std::make_shared<detail::ServiceImpl::WsSession>(stream.release_socket(), svc)
        ->run(std::move(req));
    return;
  }
  respond();
}

void detail::ServiceImpl::do_accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // listener closed
    std::make_shared<HttpConnection>(std::move(socket), *this)->read();
    do_accept();
  });
}

TeleopService::TeleopService(RuntimeConfig config, ServiceOptions options)
    : impl_(std::make_unique<detail::ServiceImpl>(std::move(config), std::move(options))) {}

TeleopService::~TeleopService() { stop(); }

std::uint16_t TeleopService::port() const { return impl_->acceptor.local_endpoint().port(); }

void TeleopService::start() {
  std::lock_guard<std::mutex> lock(impl_->lifecycle_mutex);
  if (impl_->running.load() || impl_->stopped) return;
  impl_->running.store(true);
  impl_->do_accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  if (impl_->options.tick_thread) impl_->ticker = std::thread([this] { impl_->tick_loop(); });
}

void TeleopService::stop() {
  std::lock_guard<std::mutex> lock(impl_->lifecycle_mutex);
  if (impl_->stopped) return;
  impl_->stopped = true;
  impl_->running.store(false);
  if (impl_->ticker.joinable()) impl_->ticker.join();
  if (impl_->queue.size() > 0) impl_->advance();
  if (impl_->writer) {
    impl_->writer->close();
    impl_->record_file.close();
  }
  net::post(impl_->ioc, [impl = impl_.get()] {
    beast::error_code ignore;
    impl->acceptor.close(ignore);
  });
  if (impl_->io_thread.joinable()) {
    // Give queued replies a moment to flush before the loop is torn down.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    impl_->ioc.stop();
    impl_->io_thread.join();
  }
}

TelemetryFrame TeleopService::step() { return impl_->advance(); }

std::uint64_t TeleopService::ticks() const { return impl_->ticks.load(); }

std::size_t TeleopService::client_count() const {
  std::lock_guard<std::mutex> lock(impl_->clients_mutex);
  std::size_t n = 0;
  for (const auto& [id, weak] : impl_->clients) n += weak.expired() ? 0 : 1;
  return n;
}

std::size_t TeleopService::pending_commands() const { return impl_->queue.size(); }

}  // namespace cpgait
