#pragma once

#include <string_view>

#include <fmt/format.h>

namespace gmaxent::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

// Initialized from GMAXENT_LOG (quiet|info|debug); defaults to info.
Level level();
void set_level(Level level);

void write(Level at, std::string_view tag, std::string_view message);

template <typename... Args>
void info(fmt::format_string<Args...> format, Args&&... args) {
  if (level() >= Level::Info) write(Level::Info, "info", fmt::format(format, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> format, Args&&... args) {
  if (level() >= Level::Info) write(Level::Info, "warn", fmt::format(format, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> format, Args&&... args) {
  if (level() >= Level::Debug) write(Level::Debug, "debug", fmt::format(format, std::forward<Args>(args)...));
}

}  // namespace gmaxent::log
