#pragma once

#include <string>

namespace idbandit {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2 };

// Process-wide threshold; IDBANDIT_LOG=quiet|warning|info sets the initial value.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_warning(const std::string& message);
void log_info(const std::string& message);

}  // namespace idbandit
