#pragma once

#include <string>

// Thin logging facade. spdlog is compiled in its own translation unit
// because the torch include tree ships an incompatible fmt.
namespace scgan::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level level);

void info(const std::string& message);
void warn(const std::string& message);

/// printf-style formatting into a std::string.
[[gnu::format(printf, 1, 2)]] std::string format(const char* fmt, ...);

}  // namespace scgan::log
