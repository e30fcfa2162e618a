#pragma once

#include <stdexcept>
#include <string>

namespace seqlsh {

// Exit code 1 at the CLI.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Exit code 2 at the CLI.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Exit code 3 at the CLI.
struct invariant_error : std::logic_error {
    explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace seqlsh
