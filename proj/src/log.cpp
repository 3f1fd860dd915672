#include "lamper/log.hpp"

#include <chrono>
#include <ctime>

#include <json.hpp>

namespace lamper {

namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buf[40];
  const std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &utc);
  std::snprintf(buf + n, sizeof buf - n, ".%03dZ", static_cast<int>(millis));
  return buf;
}

const char* levelName(Logger::Level level) {
  switch (level) {
    case Logger::Level::Debug: return "debug";
    case Logger::Level::Info: return "info";
    case Logger::Level::Warn: return "warn";
    case Logger::Level::Error: return "error";
  }
  return "info";
}

}  // namespace

void Logger::log(Level level, std::string_view dataset, std::string_view method, std::string_view message) {
  if (!out_ || level < threshold_) return;
  nlohmann::ordered_json record = {{"ts", timestamp()},
                                   {"level", levelName(level)},
                                   {"dataset", dataset},
                                   {"method", method},
                                   {"message", message}};
  const std::string line = record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  std::lock_guard lock(mutex_);
  *out_ << line << std::flush;
}

Logger& Logger::null() {
  static Logger logger(nullptr);
  return logger;
}

}  // namespace lamper
