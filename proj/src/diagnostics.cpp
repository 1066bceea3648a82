#include "pvbess/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace pvbess {
namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& current_sink() {
    static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex());
    WarningSink previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

struct ScopedWarningCapture::Impl {
    mutable std::mutex mutex;
    std::vector<std::string> messages;
};

ScopedWarningCapture::ScopedWarningCapture() : impl_(std::make_unique<Impl>()) {
    Impl* impl = impl_.get();
    previous_ = set_warning_sink([impl](std::string_view msg) {
        std::lock_guard lock(impl->mutex);
        impl->messages.emplace_back(msg);
    });
}

ScopedWarningCapture::~ScopedWarningCapture() {
    set_warning_sink(std::move(previous_));
}

std::vector<std::string> ScopedWarningCapture::messages() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->messages;
}

}  // namespace pvbess
