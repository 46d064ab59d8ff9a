#ifndef HOLOPNT_SHA256_HPP
#define HOLOPNT_SHA256_HPP

#include <string>
#include <string_view>

namespace holopnt {

// FIPS 180-4 SHA-256 of the given bytes, as lowercase hex.
// Self-contained so report digests are identical on every platform.
std::string sha256_hex(std::string_view data);

}  // namespace holopnt

#endif
