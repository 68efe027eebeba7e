#pragma once

#include <stdexcept>
#include <string>

namespace nf {

/// Failure raised by any pipeline stage. The stage name is kept separately so
/// callers (the CLI, the experiment runner) can prefix diagnostics uniformly.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)), detail_(message) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string stage_;
    std::string detail_;
};

}  // namespace nf
