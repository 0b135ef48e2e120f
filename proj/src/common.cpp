#include "hilbvp/common.hpp"

#include <iostream>
#include <mutex>

namespace hilbvp {
namespace {

std::mutex sink_mutex;
std::function<void(std::string_view)> sink;

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    if (sink) {
        sink(message);
    } else {
        std::cerr << "hilbvp: warning: " << message << '\n';
    }
}

void set_warning_sink(std::function<void(std::string_view)> new_sink) {
    std::lock_guard lock(sink_mutex);
    sink = std::move(new_sink);
}

}  // namespace hilbvp
