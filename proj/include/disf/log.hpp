#pragma once

#include <cctype>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace disf {

enum class LogLevel { kQuiet = 0, kError = 1, kWarn = 2, kInfo = 3, kDebug = 4 };

// DISF_LOG accepts a level name (quiet, error, warn, info, debug) or its
// number 0-4. Unset or unrecognized values mean warn.
inline LogLevel parse_log_level(const char* text) {
  if (text == nullptr || *text == '\0') return LogLevel::kWarn;
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "quiet" || s == "off" || s == "0") return LogLevel::kQuiet;
  if (s == "error" || s == "1") return LogLevel::kError;
  if (s == "warn" || s == "warning" || s == "2") return LogLevel::kWarn;
  if (s == "info" || s == "3") return LogLevel::kInfo;
  if (s == "debug" || s == "trace" || s == "4") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

class Logger {
 public:
  static Logger& instance() {
    static Logger logger(parse_log_level(std::getenv("DISF_LOG")));
    return logger;
  }

  LogLevel level() const { return level_; }
  void set_level(LogLevel level) { level_ = level; }
  bool enabled(LogLevel level) const { return level <= level_; }

  void write(LogLevel level, const std::string& message) {
    if (!enabled(level)) return;
    static constexpr const char* kTags[] = {"", "error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mutex_);
    std::cerr << "[disf " << kTags[static_cast<int>(level)] << "] " << message
              << '\n';
  }

 private:
  explicit Logger(LogLevel level) : level_(level) {}
  LogLevel level_;
  std::mutex mutex_;
};

inline void log_error(const std::string& m) { Logger::instance().write(LogLevel::kError, m); }
inline void log_warn(const std::string& m) { Logger::instance().write(LogLevel::kWarn, m); }
inline void log_info(const std::string& m) { Logger::instance().write(LogLevel::kInfo, m); }
inline void log_debug(const std::string& m) { Logger::instance().write(LogLevel::kDebug, m); }

}  // namespace disf
