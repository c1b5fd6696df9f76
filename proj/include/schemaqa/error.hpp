#pragma once

#include <stdexcept>
#include <string>

namespace schemaqa {

// Single exception type for contract and data errors. The CLI maps it to
// exit code 2; library callers catch it like any runtime_error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace schemaqa
