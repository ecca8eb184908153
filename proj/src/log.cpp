#include "gsasvr/log.hpp"

#include <iostream>
#include <mutex>

namespace gsasvr {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink;
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void log_message(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) {
    current_sink()(level, message);
  } else if (level == LogLevel::Warning) {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace gsasvr
