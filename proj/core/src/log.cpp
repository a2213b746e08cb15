#include "scgan/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <vector>

#include <spdlog/spdlog.h>

namespace scgan::log {

void set_level(Level level) {
  switch (level) {
    case Level::Debug: spdlog::set_level(spdlog::level::debug); break;
    case Level::Info: spdlog::set_level(spdlog::level::info); break;
    case Level::Warn: spdlog::set_level(spdlog::level::warn); break;
    case Level::Error: spdlog::set_level(spdlog::level::err); break;
    case Level::Off: spdlog::set_level(spdlog::level::off); break;
  }
}

void info(const std::string& message) { spdlog::info("{}", message); }
void warn(const std::string& message) { spdlog::warn("{}", message); }

std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  const int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::vector<char> buf(static_cast<std::size_t>(n < 0 ? 0 : n) + 1);
  std::vsnprintf(buf.data(), buf.size(), fmt, args);
  va_end(args);
  return std::string(buf.data(), static_cast<std::size_t>(n < 0 ? 0 : n));
}

}  // namespace scgan::log
