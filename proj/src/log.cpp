#include "fedsight/log.hpp"

#include <atomic>
#include <cstdio>

namespace fedsight {

const char* log_level_name(LogLevel level) {
  switch (level) {
    case LogLevel::debug:
      return "debug";
    case LogLevel::info:
      return "info";
    case LogLevel::warn:
      return "warn";
    case LogLevel::error:
      return "error";
  }
  return "?";
}

void StderrLogger::log(LogLevel level, std::string_view message) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::fprintf(stderr, "[%s] %.*s\n", log_level_name(level),
               static_cast<int>(message.size()), message.data());
}

void CaptureLogger::log(LogLevel level, std::string_view message) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.emplace_back(level, std::string(message));
}

bool CaptureLogger::contains(std::string_view needle) const {
  return count_containing(needle) > 0;
}

std::size_t CaptureLogger::count_containing(std::string_view needle) const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::size_t n = 0;
  for (const auto& [level, text] : entries_) {
    if (text.find(needle) != std::string::npos) {
      ++n;
    }
  }
  return n;
}

std::vector<std::pair<LogLevel, std::string>> CaptureLogger::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

void CaptureLogger::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
}

namespace {

StderrLogger& default_logger() {
  static StderrLogger logger;
  return logger;
}

std::atomic<Logger*> g_logger{nullptr};

}  // namespace

Logger& global_logger() {
  Logger* logger = g_logger.load(std::memory_order_acquire);
  return logger ? *logger : default_logger();
}

void set_global_logger(Logger* logger) {
  g_logger.store(logger, std::memory_order_release);
}

void log_debug(std::string_view message) {
  global_logger().log(LogLevel::debug, message);
}
void log_info(std::string_view message) {
  global_logger().log(LogLevel::info, message);
}
void log_warn(std::string_view message) {
  global_logger().log(LogLevel::warn, message);
}
void log_error(std::string_view message) {
  global_logger().log(LogLevel::error, message);
}

}  // namespace fedsight
