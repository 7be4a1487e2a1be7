#include "idbandit/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace idbandit {

namespace {

LogLevel from_env() {
  const char* v = std::getenv("IDBANDIT_LOG");
  if (v == nullptr) return LogLevel::Warning;
  if (std::strcmp(v, "quiet") == 0) return LogLevel::Quiet;
  if (std::strcmp(v, "info") == 0) return LogLevel::Info;
  return LogLevel::Warning;
}

std::atomic<int>& level() {
  static std::atomic<int> value{static_cast<int>(from_env())};
  return value;
}

void emit(const char* tag, const std::string& message) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "idbandit " << tag << ": " << message << '\n';
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level().load()); }
void set_log_level(LogLevel l) { level().store(static_cast<int>(l)); }

void log_warning(const std::string& message) {
  if (level().load() >= static_cast<int>(LogLevel::Warning)) emit("warning", message);
}

void log_info(const std::string& message) {
  if (level().load() >= static_cast<int>(LogLevel::Info)) emit("info", message);
}

}  // namespace idbandit
