#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pide {

enum class Errc {
    dimension_out_of_range,
    n_not_power_of_two,
    non_finite,
    block_empty,
    invalid_argument,
    grid_mismatch,
    cfl_violation,
    degenerate,
    max_iter_exceeded,
    blow_up,
    fewer_than_three,
    config,
    unknown_example,
};

std::string_view to_string(Errc code);

/// Library error. Carries a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace pide
