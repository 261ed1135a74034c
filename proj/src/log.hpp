#pragma once

#include <functional>
#include <string>

namespace mgcn {

using LogHandler = std::function<void(const std::string&)>;

/// Install a warning sink (tests capture warnings this way). Passing an empty
/// handler restores the default stderr sink.
void set_warn_handler(LogHandler handler);

void log_warn(const std::string& msg);

}  // namespace mgcn
