#include "implausify/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "implausify/errors.hpp"

namespace implausify {

namespace {

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::chrono::steady_clock::time_point deadline_from(std::chrono::milliseconds timeout) {
  return std::chrono::steady_clock::now() + timeout;
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return static_cast<int>(std::max<long long>(0, left.count()));
}

}  // namespace

SubprocessResult run_subprocess(const std::string& command, std::string_view stdin_data,
                                std::chrono::milliseconds timeout) {
  // a child may exit before its stdin is fully written; the EPIPE from
  // write() is handled, the signal must not be
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { signal(SIGPIPE, SIG_IGN); });

  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw Error(std::string("pipe failed: ") + std::strerror(errno));

  const pid_t pid = fork();
  if (pid < 0) throw Error(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);  // own process group so a timeout can kill descendants
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  int write_fd = in_pipe[1];
  int read_fd = out_pipe[0];
  set_nonblocking(write_fd);
  set_nonblocking(read_fd);

  SubprocessResult result;
  const auto deadline = deadline_from(timeout);
  std::size_t written = 0;
  char buffer[4096];

  while (read_fd >= 0 || write_fd >= 0) {
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t nfds = 0;
    int read_slot = -1, write_slot = -1;
    if (read_fd >= 0) {
      read_slot = static_cast<int>(nfds);
      fds[nfds++] = {read_fd, POLLIN, 0};
    }
    if (write_fd >= 0) {
      write_slot = static_cast<int>(nfds);
      fds[nfds++] = {write_fd, POLLOUT, 0};
    }
    const int rc = poll(fds, nfds, std::min(remaining_ms(deadline), 200));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (write_slot >= 0 && (fds[write_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[write_slot].revents & (POLLERR | POLLHUP)) {
        close(write_fd);
        write_fd = -1;
      } else {
        const ssize_t n = write(write_fd, stdin_data.data() + written,
                                std::min<std::size_t>(stdin_data.size() - written, 4096));
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN && errno != EINTR) {
          close(write_fd);
          write_fd = -1;
        }
        if (write_fd >= 0 && written == stdin_data.size()) {
          close(write_fd);
          write_fd = -1;
        }
      }
    }
    if (read_slot >= 0 && (fds[read_slot].revents & (POLLIN | POLLERR | POLLHUP))) {
      const ssize_t n = read(read_fd, buffer, sizeof(buffer));
      if (n > 0) {
        result.stdout_data.append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        close(read_fd);
        read_fd = -1;
      }
    }
  }

  if (write_fd >= 0) close(write_fd);
  if (read_fd >= 0) close(read_fd);

  if (result.timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    return result;
  }

  int status = 0;
  // stdout is closed; give the child until the deadline to exit.
  while (true) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      result.timed_out = true;
      return result;
    }
    usleep(2000);
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

}  // namespace implausify
