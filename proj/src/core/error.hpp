#pragma once

#include <stdexcept>
#include <string>

namespace ddm {

enum class Errc {
    invalid_argument = 1,
    domain = 2,
    integration_failure = 3,
    no_interior_minimum = 4,
    insensitive_operating_point = 5,
    generator_insensitive = 6,
    capacity = 7,
    io = 8,
    fit_failure = 9,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ddm
