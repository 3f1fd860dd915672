#pragma once

#include <mutex>
#include <ostream>
#include <string>
#include <string_view>

namespace lamper {

/// Line-delimited JSON records: ts, level, dataset, method, message.
class Logger {
 public:
  enum class Level { Debug, Info, Warn, Error };

  explicit Logger(std::ostream* out, Level threshold = Level::Info) : out_(out), threshold_(threshold) {}

  void log(Level level, std::string_view dataset, std::string_view method, std::string_view message);

  void info(std::string_view dataset, std::string_view method, std::string_view message) {
    log(Level::Info, dataset, method, message);
  }
  void warn(std::string_view dataset, std::string_view method, std::string_view message) {
    log(Level::Warn, dataset, method, message);
  }
  void error(std::string_view dataset, std::string_view method, std::string_view message) {
    log(Level::Error, dataset, method, message);
  }

  // Discards everything.
  static Logger& null();

 private:
  std::ostream* out_;
  Level threshold_;
  std::mutex mutex_;
};

}  // namespace lamper
