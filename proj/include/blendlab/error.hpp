#pragma once

#include <stdexcept>
#include <string>

namespace blendlab {

// Every failure surfaced by the library is an Error carrying a short,
// stable message (tests match on it).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blendlab
