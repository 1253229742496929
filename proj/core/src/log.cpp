#include "lwi/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lwi::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("LWI_LOG");
    if (v == nullptr) return Level::Warn;
    if (std::strcmp(v, "error") == 0) return Level::Error;
    if (std::strcmp(v, "warn") == 0) return Level::Warn;
    if (std::strcmp(v, "info") == 0) return Level::Info;
    if (std::strcmp(v, "debug") == 0) return Level::Debug;
    return Level::Warn;
}

Level g_level = parse_env();

void emit(Level lv, const char* tag, const std::string& msg) {
    if (static_cast<int>(lv) > static_cast<int>(g_level)) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

} // namespace

Level level() { return g_level; }
void set_level(Level lv) { g_level = lv; }

void error(const std::string& msg) { emit(Level::Error, "error", msg); }
void warn(const std::string& msg) { emit(Level::Warn, "warn", msg); }
void info(const std::string& msg) { emit(Level::Info, "info", msg); }
void debug(const std::string& msg) { emit(Level::Debug, "debug", msg); }

} // namespace lwi::log
