#pragma once

#include <string>

namespace lwi::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from LWI_LOG={error|warn|info|debug} on first use; default warn.
Level level();
void set_level(Level lv);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

} // namespace lwi::log
