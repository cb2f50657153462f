#include "stratlab/crypto/aead.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace stratlab::crypto {

namespace {
void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    });
}
}  // namespace

static_assert(kKeyBytes == crypto_secretbox_KEYBYTES);
static_assert(kNonceBytes == crypto_secretbox_NONCEBYTES);

Bytes seal(const Key& key, const Nonce& nonce, ByteSpan plaintext) {
    ensure_sodium();
    Bytes out(plaintext.size() + crypto_secretbox_MACBYTES);
    crypto_secretbox_easy(out.data(), plaintext.data(), plaintext.size(), nonce.data(), key.data());
    return out;
}

std::optional<Bytes> open(const Key& key, const Nonce& nonce, ByteSpan ciphertext) {
    ensure_sodium();
    if (ciphertext.size() < crypto_secretbox_MACBYTES) return std::nullopt;
    Bytes out(ciphertext.size() - crypto_secretbox_MACBYTES);
    if (crypto_secretbox_open_easy(out.data(), ciphertext.data(), ciphertext.size(), nonce.data(),
                                   key.data()) != 0)
        return std::nullopt;
    return out;
}

std::string base64_encode(ByteSpan data) {
    ensure_sodium();
    std::string out(sodium_base64_encoded_len(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
    sodium_bin2base64(out.data(), out.size(), data.data(), data.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(out.find('\0') == std::string::npos ? out.size() : out.find('\0'));
    return out;
}

Bytes base64_decode(std::string_view text) {
    ensure_sodium();
    Bytes out(text.size());
    size_t real_len = 0;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &real_len,
                          nullptr, sodium_base64_VARIANT_ORIGINAL) != 0)
        throw std::invalid_argument("invalid base64");
    out.resize(real_len);
    return out;
}

}  // namespace stratlab::crypto
