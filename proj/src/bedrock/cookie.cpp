#include "stratlab/bedrock/cookie.hpp"

#include "stratlab/crypto/sha256.hpp"

namespace stratlab::bedrock {

Hash32 derive_cookie(const Hash32& seed, std::string_view username) {
    Bytes preimage;
    preimage.reserve(seed.size() + username.size());
    preimage.insert(preimage.end(), seed.begin(), seed.end());
    preimage.insert(preimage.end(), username.begin(), username.end());
    return crypto::double_sha256(preimage);
}

puzzle::CoinbaseParts embed_cookie(puzzle::CoinbaseParts parts, const Hash32& cookie) {
    puzzle::write_cookie_region(parts, cookie);
    return parts;
}

}  // namespace stratlab::bedrock
