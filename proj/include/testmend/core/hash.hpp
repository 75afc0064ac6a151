#pragma once

#include <string>
#include <string_view>

namespace testmend {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// 16-hex-digit content fingerprint (prefix of the SHA-256).
std::string fingerprint(std::string_view data);

} // namespace testmend
