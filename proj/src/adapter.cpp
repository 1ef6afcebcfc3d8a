#include "ccattack/adapter.hpp"

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <cstring>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "ccattack/corpus.hpp"
#include "ccattack/model.hpp"

namespace ccattack::adapter {

namespace {

using nlohmann::ordered_json;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(AdapterErrorKind::io,
                         std::string("write to model failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

class CallbackAdapter final : public ModelAdapter {
 public:
  explicit CallbackAdapter(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}

  std::string query(const std::string& code) override {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return fn_(code);
  }

  std::size_t queries() const override {
    return queries_.load(std::memory_order_relaxed);
  }

 private:
  std::function<std::string(const std::string&)> fn_;
  std::atomic<std::size_t> queries_{0};
};

// Line-delimited JSON client over a pair of file descriptors. Requests carry
// a fresh integer id; a background reader demultiplexes responses, which may
// arrive in any order. At most max_in_flight requests are outstanding; a
// timed-out request is retransmitted once with the same id, then abandoned.
class LineProtocolAdapter : public ModelAdapter {
 public:
  LineProtocolAdapter(int write_fd, int read_fd, const AdapterConfig& config)
      : write_fd_(write_fd), read_fd_(read_fd), config_(config) {
    reader_ = std::thread([this] { read_loop(); });
  }

  ~LineProtocolAdapter() override {
    shutdown_write();
    if (reader_.joinable()) reader_.join();
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }

  std::string query(const std::string& code) override {
    std::unique_lock<std::mutex> lock(mutex_);
    slot_cv_.wait(lock, [this] {
      return dead_ || in_flight_ < static_cast<std::size_t>(config_.max_in_flight);
    });
    if (dead_) throw_dead();
    const std::int64_t id = next_id_++;
    ++in_flight_;
    waiting_.insert(id);
    bool finished = false;
    auto finish = [&] {
      if (finished) return;
      finished = true;
      waiting_.erase(id);
      --in_flight_;
      slot_cv_.notify_one();
    };
    bool resent = false;
    try {
      send_request(lock, id, code);
      for (int attempt = 0; attempt < 2; ++attempt) {
        bool got = ready_cv_.wait_for(
            lock, std::chrono::milliseconds(config_.timeout_ms),
            [&] { return dead_ || ready_.count(id) > 0; });
        if (ready_.count(id)) {
          std::string comment = std::move(ready_[id]);
          ready_.erase(id);
          finish();
          // The first transmission may still be answered; tolerate one
          // duplicate response for a retransmitted id.
          if (resent) ++abandoned_[id];
          return comment;
        }
        if (dead_) {
          finish();
          throw_dead();
        }
        (void)got;
        if (attempt == 0) {
          resent = true;
          send_request(lock, id, code);  // one retransmit
        }
      }
      abandoned_[id] += 2;  // both transmissions may still be answered
      finish();
      throw AdapterError(AdapterErrorKind::timeout,
                         "model did not answer request " + std::to_string(id) +
                             " within " + std::to_string(config_.timeout_ms) + "ms");
    } catch (...) {
      finish();
      throw;
    }
  }

  std::size_t queries() const override {
    std::lock_guard<std::mutex> lock(mutex_);
    return queries_;
  }

 protected:
  void shutdown_write() {
    if (write_fd_ < 0) return;
    if (write_fd_ == read_fd_) {
      // Shared socket: half-close so the reader can drain the other half.
      ::shutdown(write_fd_, SHUT_WR);
    } else {
      ::close(write_fd_);
      write_fd_ = -1;
    }
  }

  int write_fd_ = -1;
  int read_fd_ = -1;

 private:
  void send_request(std::unique_lock<std::mutex>& lock, std::int64_t id,
                    const std::string& code) {
    ordered_json req;
    req["id"] = id;
    req["code"] = code;
    std::string line = req.dump();
    line += '\n';
    ++queries_;
    // Serialize writers but let responses flow while writing.
    lock.unlock();
    try {
      std::lock_guard<std::mutex> wlock(write_mutex_);
      write_all(write_fd_, line);
    } catch (...) {
      lock.lock();
      mark_dead("model closed its input");
      throw;
    }
    lock.lock();
  }

  void mark_dead(std::string reason) {
    if (!dead_) {
      dead_ = true;
      dead_reason_ = std::move(reason);
    }
    ready_cv_.notify_all();
    slot_cv_.notify_all();
  }

  [[noreturn]] void throw_dead() { throw AdapterError(dead_kind_, dead_reason_); }

  void read_loop() {
    std::string buffer;
    char chunk[4096];
    for (;;) {
      ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        std::lock_guard<std::mutex> lock(mutex_);
        mark_dead(std::string("read from model failed: ") + std::strerror(errno));
        return;
      }
      if (n == 0) {
        std::lock_guard<std::mutex> lock(mutex_);
        mark_dead("model closed the stream");
        return;
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (;;) {
        std::size_t nl = buffer.find('\n', start);
        if (nl == std::string::npos) break;
        std::string line = buffer.substr(start, nl - start);
        start = nl + 1;
        if (!handle_line(line)) return;
      }
      buffer.erase(0, start);
    }
  }

  bool handle_line(const std::string& line) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) return true;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    std::lock_guard<std::mutex> lock(mutex_);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") ||
        !j["id"].is_number_integer() || !j.contains("comment") ||
        !j["comment"].is_string()) {
      dead_kind_ = AdapterErrorKind::protocol;
      mark_dead("malformed response line: " + line.substr(0, 200));
      return false;
    }
    const std::int64_t id = j["id"].get<std::int64_t>();
    auto late = abandoned_.find(id);
    if (late != abandoned_.end()) {  // late answer to a timed-out or resent id
      if (--late->second <= 0) abandoned_.erase(late);
      return true;
    }
    if (!waiting_.count(id)) {
      dead_kind_ = AdapterErrorKind::id_mismatch;
      mark_dead("response for unknown request id " + std::to_string(id));
      return false;
    }
    ready_[id] = j["comment"].get<std::string>();
    ready_cv_.notify_all();
    return true;
  }

  const AdapterConfig config_;
  mutable std::mutex mutex_;
  std::mutex write_mutex_;
  std::condition_variable slot_cv_, ready_cv_;
  std::thread reader_;
  std::int64_t next_id_ = 1;
  std::size_t in_flight_ = 0;
  std::size_t queries_ = 0;
  std::set<std::int64_t> waiting_;
  std::map<std::int64_t, int> abandoned_;  // id -> tolerated late responses
  std::map<std::int64_t, std::string> ready_;
  bool dead_ = false;
  AdapterErrorKind dead_kind_ = AdapterErrorKind::io;
  std::string dead_reason_;
};

class ProcessAdapter final : public LineProtocolAdapter {
 public:
  ProcessAdapter(int write_fd, int read_fd, pid_t pid, const AdapterConfig& config)
      : LineProtocolAdapter(write_fd, read_fd, config), pid_(pid) {}

  ~ProcessAdapter() override {
    shutdown_write();  // stdin EOF asks the model to exit
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);  // guard against models that ignore EOF
      ::waitpid(pid_, nullptr, 0);
    }
  }

 private:
  pid_t pid_ = -1;
};

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> args;
  std::istringstream in(command);
  std::string arg;
  while (in >> arg) args.push_back(arg);
  return args;
}

std::unique_ptr<ModelAdapter> spawn_process(const std::string& command,
                                            const AdapterConfig& config) {
  std::vector<std::string> args = split_command(command);
  if (args.empty())
    throw AdapterError(AdapterErrorKind::spawn, "empty exec command");

  int to_child[2], from_child[2], status[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0 || ::pipe(status) != 0)
    throw AdapterError(AdapterErrorKind::spawn,
                       std::string("pipe failed: ") + std::strerror(errno));
  ::fcntl(status[1], F_SETFD, FD_CLOEXEC);

  pid_t pid = ::fork();
  if (pid < 0)
    throw AdapterError(AdapterErrorKind::spawn,
                       std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::close(status[0]);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    int err = errno;
    (void)!::write(status[1], &err, sizeof(err));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::close(status[1]);
  int err = 0;
  ssize_t n = ::read(status[0], &err, sizeof(err));
  ::close(status[0]);
  if (n > 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::waitpid(pid, nullptr, 0);
    throw AdapterError(AdapterErrorKind::spawn,
                       "cannot exec '" + args[0] + "': " + std::strerror(err));
  }
  return std::make_unique<ProcessAdapter>(to_child[1], from_child[0], pid, config);
}

std::unique_ptr<ModelAdapter> connect_tcp(const std::string& hostport,
                                          const AdapterConfig& config) {
  std::size_t colon = hostport.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == hostport.size())
    throw AdapterError(AdapterErrorKind::spawn,
                       "tcp adapter spec needs host:port, got: " + hostport);
  const std::string host = hostport.substr(0, colon);
  const std::string port = hostport.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0)
    throw AdapterError(AdapterErrorKind::spawn,
                       "cannot resolve " + hostport + ": " + gai_strerror(rc));
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0)
    throw AdapterError(AdapterErrorKind::spawn, "cannot connect to " + hostport);
  // One socket for both directions; destructor must not close it twice.
  return std::make_unique<LineProtocolAdapter>(fd, fd, config);
}

}  // namespace

std::unique_ptr<ModelAdapter> make_callback_adapter(
    std::function<std::string(const std::string&)> fn) {
  return std::make_unique<CallbackAdapter>(std::move(fn));
}

std::unique_ptr<ModelAdapter> make_adapter(const std::string& spec, lang::Lang lang,
                                           const AdapterConfig& config) {
  ignore_sigpipe();
  constexpr std::string_view kExec = "exec:";
  constexpr std::string_view kTcp = "tcp:";
  constexpr std::string_view kSurrogate = "builtin:surrogate:";
  constexpr std::string_view kToy = "builtin:toy:";
  if (spec.rfind(kExec, 0) == 0) return spawn_process(spec.substr(kExec.size()), config);
  if (spec.rfind(kTcp, 0) == 0) return connect_tcp(spec.substr(kTcp.size()), config);
  if (spec.rfind(kSurrogate, 0) == 0) {
    auto model = std::make_shared<model::SurrogateModel>(
        corpus::load_dataset(spec.substr(kSurrogate.size()), lang));
    return make_callback_adapter(
        [model](const std::string& code) { return model->predict(code); });
  }
  if (spec.rfind(kToy, 0) == 0) {
    auto model =
        std::make_shared<model::ToyModel>(model::load_toy(spec.substr(kToy.size())));
    const int length = config.gen_length;
    return make_callback_adapter([model, length](const std::string& code) {
      return model::toy_generate(*model, code, length);
    });
  }
  throw AdapterError(AdapterErrorKind::spawn,
                     "unknown adapter spec (expected exec:, tcp:, builtin:surrogate:, "
                     "builtin:toy:): " +
                         spec);
}

}  // namespace ccattack::adapter
