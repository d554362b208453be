#include "maat/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace maat {

namespace {

std::mutex g_handler_mutex;

WarningHandler& handler_slot() {
  static WarningHandler handler = [](const std::string& message) {
    std::cerr << "maat: warning: " << message << '\n';
  };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_handler_mutex);
  auto previous = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return previous;
}

void emit_warning(const std::string& message) {
  WarningHandler handler;
  {
    std::lock_guard lock(g_handler_mutex);
    handler = handler_slot();
  }
  if (handler) handler(message);
}

}  // namespace maat
