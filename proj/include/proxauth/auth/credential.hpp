#pragma once

#include <string>
#include <string_view>

namespace proxauth::auth {

inline constexpr std::size_t kMinSecretLength = 8;
inline constexpr unsigned kDefaultHashIterations = 100'000;

/// PBKDF2-HMAC-SHA256 with a fresh 16-byte salt, encoded as
/// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
std::string hash_secret(std::string_view secret, unsigned iterations = kDefaultHashIterations);

/// Constant-time comparison against an encoded hash.  Malformed encodings
/// never verify.
bool verify_secret(std::string_view secret, std::string_view encoded);

/// 32 lowercase hex characters from the OpenSSL CSPRNG.
std::string random_token();

}  // namespace proxauth::auth
