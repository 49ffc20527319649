#pragma once

#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fedsight {

enum class LogLevel { debug, info, warn, error };

const char* log_level_name(LogLevel level);

// Minimal logging seam. Loaders and the deliberation engine emit their
// "logged warning" events through the global logger so tests can capture
// and assert on them. Implementations must be safe for concurrent callers.
class Logger {
 public:
  virtual ~Logger() = default;
  virtual void log(LogLevel level, std::string_view message) = 0;
};

// Writes "[warn] ..." lines to stderr under a mutex.
class StderrLogger : public Logger {
 public:
  void log(LogLevel level, std::string_view message) override;

 private:
  std::mutex mutex_;
};

// Test logger: records every message for substring assertions.
class CaptureLogger : public Logger {
 public:
  void log(LogLevel level, std::string_view message) override;
  bool contains(std::string_view needle) const;
  std::size_t count_containing(std::string_view needle) const;
  std::vector<std::pair<LogLevel, std::string>> entries() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<std::pair<LogLevel, std::string>> entries_;
};

// Global sink; defaults to StderrLogger. Never returns null.
Logger& global_logger();
// Pass nullptr to restore the default stderr logger.
void set_global_logger(Logger* logger);

// Swaps the global logger in for the lifetime of the guard.
class ScopedLogger {
 public:
  explicit ScopedLogger(Logger& logger) { set_global_logger(&logger); }
  ~ScopedLogger() { set_global_logger(nullptr); }
  ScopedLogger(const ScopedLogger&) = delete;
  ScopedLogger& operator=(const ScopedLogger&) = delete;
};

void log_debug(std::string_view message);
void log_info(std::string_view message);
void log_warn(std::string_view message);
void log_error(std::string_view message);

}  // namespace fedsight
