#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pvbess {

using WarningSink = std::function<void(std::string_view)>;

/// Emits a warning through the installed sink (stderr by default). Thread-safe.
void warn(std::string_view message);

/// Replaces the warning sink and returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

/// Collects warnings for the lifetime of the object, restoring the previous sink afterwards.
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    std::vector<std::string> messages() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    WarningSink previous_;
};

}  // namespace pvbess
