#include "choquard/log.hpp"

#include <iostream>
#include <mutex>

namespace choquard {

namespace {

std::mutex sink_mutex;

WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::clog << "warning: " << m << '\n'; };
  return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  WarningSink old = std::move(sink());
  sink() = std::move(s);
  return old;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink()) sink()(message);
}

}  // namespace choquard
