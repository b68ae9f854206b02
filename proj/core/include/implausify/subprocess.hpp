#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace implausify {

struct SubprocessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string stdout_data;
};

/// Runs `command` via /bin/sh -c, feeding `stdin_data` and capturing stdout.
/// Reads and writes are interleaved so large payloads cannot deadlock. On
/// timeout the child is killed and timed_out is set.
SubprocessResult run_subprocess(const std::string& command, std::string_view stdin_data,
                                std::chrono::milliseconds timeout);

}  // namespace implausify
