#pragma once

#include <string>

namespace caloric {

// Shortest decimal string that round-trips to the same double. Used for every
// text output so files are byte-identical across runs.
std::string format_double(double value);

// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace caloric
