#pragma once

#include <functional>
#include <string_view>

namespace gsasvr {

enum class LogLevel { Info, Warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink. The default writes warnings to stderr and
// drops info messages. Passing an empty function restores the default.
void set_log_sink(LogSink sink);

void log_message(LogLevel level, std::string_view message);

}  // namespace gsasvr
