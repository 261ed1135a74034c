#include "log.hpp"

#include <iostream>
#include <mutex>

namespace mgcn {

namespace {
std::mutex g_mutex;
LogHandler g_handler;
}  // namespace

void set_warn_handler(LogHandler handler) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_handler = std::move(handler);
}

void log_warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_handler) {
        g_handler(msg);
    } else {
        std::cerr << "[meshgcn] warning: " << msg << "\n";
    }
}

}  // namespace mgcn
