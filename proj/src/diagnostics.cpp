#include "scacsp/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace scacsp::diag {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& current_sink() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

WarningSink set_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex());
    auto previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

struct WarningCapture::State {
    std::vector<std::string> messages;
};

WarningCapture::WarningCapture() : state_(std::make_unique<State>()) {
    // The sink only runs under the sink mutex.
    previous_ = set_sink([s = state_.get()](const std::string& msg) { s->messages.push_back(msg); });
}

WarningCapture::~WarningCapture() {
    set_sink(std::move(previous_));
}

std::vector<std::string> WarningCapture::messages() const {
    std::lock_guard lock(sink_mutex());
    return state_->messages;
}

bool WarningCapture::contains(const std::string& needle) const {
    for (const auto& m : messages())
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace scacsp::diag
