#pragma once

#include "mbh/biorthogonal.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace mbh {

// Lossless JSON form: every Real is a decimal string with enough digits to
// round-trip at the system's precision.
nlohmann::json to_json(const BiorthogonalSystem& sys);
// Inverse of to_json; values are restored at the stored mantissa_bits.
BiorthogonalSystem system_from_json(const nlohmann::json& doc);

// 64-bit FNV-1a of text as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// 16 hex digits identifying (V, theta, alpha, n, degree, bits).
std::string cache_key(const WeightParams& params, int degree, int mantissa_bits);

}  // namespace mbh
