#include "nodal/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace nodal::log {

Level level() {
  static const Level lvl = [] {
    const char* env = std::getenv("NODAL_LOG");
    if (!env) return Level::error;
    const std::string s(env);
    if (s == "debug") return Level::debug;
    if (s == "info") return Level::info;
    return Level::error;
  }();
  return lvl;
}

void write(Level lvl, const std::string& msg) {
  if (lvl > level()) return;
  const char* tag = lvl == Level::error ? "error" : lvl == Level::info ? "info" : "debug";
  std::fprintf(stderr, "[nodal:%s] %s\n", tag, msg.c_str());
}

}  // namespace nodal::log
