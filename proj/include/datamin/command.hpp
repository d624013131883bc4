// Copyright 2026 The datamin authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// External executables driven over a line protocol (POSIX only).
//
//   request: coordinates joined by TAB (0x09), terminated by LF (0x0A),
//            written to the child's standard input
//   reply:   one output token terminated by LF on standard output
//
// In session mode one child answers every request; in per-call mode a fresh
// child is spawned per input and its standard input is closed after the
// request.

#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "datamin/error.hpp"
#include "datamin/program.hpp"

namespace datamin {

struct CommandOptions {
  bool persistent = true;
  std::chrono::milliseconds timeout{10'000};
};

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0)
    throw ProgramFailure(ProgramFailure::Reason::kSpawn,
                         std::string("pipe: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

using Clock = std::chrono::steady_clock;

/// A running child with piped stdin/stdout/stderr.
class Child {
 public:
  explicit Child(const std::vector<std::string>& argv) {
    static const bool sigpipe_ignored = [] {
      ::signal(SIGPIPE, SIG_IGN);
      return true;
    }();
    (void)sigpipe_ignored;

    auto [in_r, in_w] = make_pipe();
    auto [out_r, out_w] = make_pipe();
    auto [err_r, err_w] = make_pipe();
    auto [status_r, status_w] = make_pipe();

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0)
      throw ProgramFailure(ProgramFailure::Reason::kSpawn,
                           std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in_r.get(), STDIN_FILENO);
      ::dup2(out_w.get(), STDOUT_FILENO);
      ::dup2(err_w.get(), STDERR_FILENO);
      ::execvp(args[0], args.data());
      const int err = errno;
      [[maybe_unused]] auto n = ::write(status_w.get(), &err, sizeof err);
      ::_exit(127);
    }
    status_w.reset();
    int err = 0;
    ssize_t n;
    do {
      n = ::read(status_r.get(), &err, sizeof err);
    } while (n < 0 && errno == EINTR);
    if (n == sizeof err) {
      reap();
      throw ProgramFailure(ProgramFailure::Reason::kSpawn,
                           "cannot execute '" + argv.front() + "': " + std::strerror(err));
    }
    in_ = std::move(in_w);
    out_ = std::move(out_r);
    err_ = std::move(err_r);
    ::fcntl(in_.get(), F_SETFL, O_NONBLOCK);
    ::fcntl(out_.get(), F_SETFL, O_NONBLOCK);
    ::fcntl(err_.get(), F_SETFL, O_NONBLOCK);
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  ~Child() {
    in_.reset();
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      reap();
    }
  }

  void close_stdin() { in_.reset(); }

  /// Writes `data` fully, then reads one LF-terminated line.
  std::string exchange(const std::string& data, Clock::time_point deadline,
                       bool close_after_write = false) {
    std::size_t written = 0;
    while (written < data.size() || !has_line()) {
      if (close_after_write && written == data.size()) in_.reset();
      const bool want_write = written < data.size();
      pollfd fds[3] = {{want_write ? in_.get() : -1, POLLOUT, 0},
                       {out_ ? out_.get() : -1, POLLIN, 0},
                       {err_ ? err_.get() : -1, POLLIN, 0}};
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (left.count() <= 0) fail_timeout();
      const int rc = ::poll(fds, 3, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ProgramFailure(ProgramFailure::Reason::kExit,
                             std::string("poll: ") + std::strerror(errno), excerpt());
      }
      if (rc == 0) fail_timeout();
      if (want_write && (fds[0].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t n = ::write(in_.get(), data.data() + written, data.size() - written);
        if (n > 0)
          written += static_cast<std::size_t>(n);
        else if (n < 0 && errno != EAGAIN && errno != EINTR)
          fail_exit("child closed its standard input");
      }
      if (fds[2].revents) drain(err_, stderr_, true);
      if (fds[1].revents) {
        if (!drain(out_, stdout_, false) && !has_line())
          fail_exit("child closed its standard output without replying");
      }
    }
    auto lf = stdout_.find('\n');
    std::string line = stdout_.substr(0, lf);
    stdout_.erase(0, lf + 1);
    return line;
  }

  std::string excerpt() const {
    constexpr std::size_t kMax = 512;
    return stderr_.size() <= kMax ? stderr_ : stderr_.substr(stderr_.size() - kMax);
  }

 private:
  bool has_line() const { return stdout_.find('\n') != std::string::npos; }

  /// Reads what is available; false on EOF.
  bool drain(Fd& fd, std::string& buf, bool bounded) {
    char chunk[4096];
    while (true) {
      const ssize_t n = ::read(fd.get(), chunk, sizeof chunk);
      if (n > 0) {
        buf.append(chunk, static_cast<std::size_t>(n));
        if (bounded && buf.size() > 8192) buf.erase(0, buf.size() - 4096);
        continue;
      }
      if (n < 0 && (errno == EAGAIN || errno == EINTR)) return true;
      fd.reset();
      return false;
    }
  }

  [[noreturn]] void fail_timeout() {
    ::kill(pid_, SIGKILL);
    reap();
    throw ProgramFailure(ProgramFailure::Reason::kTimeout, "program timed out", excerpt());
  }

  [[noreturn]] void fail_exit(const std::string& what) {
    if (err_) {
      // Collect whatever the child still has to say on stderr.
      pollfd p{err_.get(), POLLIN, 0};
      while (err_ && ::poll(&p, 1, 100) > 0 && drain(err_, stderr_, true)) {
      }
    }
    std::string status;
    if (pid_ > 0) {
      int ws = 0;
      pid_t r;
      for (int i = 0; i < 50 && (r = ::waitpid(pid_, &ws, WNOHANG)) == 0; ++i) ::usleep(2000);
      if (r == pid_) {
        pid_ = -1;
        if (WIFEXITED(ws)) status = " (exit status " + std::to_string(WEXITSTATUS(ws)) + ")";
        if (WIFSIGNALED(ws)) status = " (killed by signal " + std::to_string(WTERMSIG(ws)) + ")";
      }
    }
    throw ProgramFailure(ProgramFailure::Reason::kExit, what + status, excerpt());
  }

  void reap() {
    if (pid_ <= 0) return;
    int ws;
    while (::waitpid(pid_, &ws, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
  }

  pid_t pid_ = -1;
  Fd in_, out_, err_;
  std::string stdout_, stderr_;
};

}  // namespace detail

class CommandProgram final : public Program {
 public:
  CommandProgram(std::vector<std::string> argv, std::size_t arity, CommandOptions opts = {})
      : Program(arity), argv_(std::move(argv)), opts_(opts) {
    if (argv_.empty()) throw InvalidArgument("command must not be empty");
  }

  std::string name() const override {
    std::string s = "exec:";
    for (std::size_t k = 0; k < argv_.size(); ++k) s += (k ? " " : "") + argv_[k];
    return s;
  }

 protected:
  Value invoke(const InputEvent& in) override {
    std::string request;
    for (std::size_t j = 0; j < in.arity(); ++j) {
      if (j) request += '\t';
      request += in[j].text();
    }
    request += '\n';
    const auto deadline = detail::Clock::now() + opts_.timeout;

    std::string reply;
    std::string excerpt;
    if (opts_.persistent) {
      if (!session_) session_.emplace(argv_);
      try {
        reply = session_->exchange(request, deadline);
      } catch (...) {
        session_.reset();
        throw;
      }
      excerpt = session_->excerpt();
    } else {
      detail::Child child(argv_);
      reply = child.exchange(request, deadline, /*close_after_write=*/true);
      excerpt = child.excerpt();
    }
    try {
      return Value(reply);
    } catch (const InvalidArgument&) {
      throw ProgramFailure(ProgramFailure::Reason::kMalformed,
                           "malformed reply '" + reply + "' to input " + to_string(in), excerpt);
    }
  }

 private:
  std::vector<std::string> argv_;
  CommandOptions opts_;
  std::optional<detail::Child> session_;
};

}  // namespace datamin
