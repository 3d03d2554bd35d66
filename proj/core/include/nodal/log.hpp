#pragma once

#include <string>

namespace nodal::log {

enum class Level { error = 0, info = 1, debug = 2 };

/// Verbosity from the NODAL_LOG environment variable ("error", "info",
/// "debug"); read once per process, defaults to error.
Level level();

void write(Level lvl, const std::string& msg);

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

}  // namespace nodal::log
