#pragma once

#include <string>
#include <vector>

namespace otkg {

/// Non-fatal findings collected while loading or annotating.
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace otkg
