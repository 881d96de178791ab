#include "dpac/rng.hpp"

namespace dpac {

namespace {

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive(std::uint64_t base, std::string_view name, std::uint64_t a,
                     std::uint64_t b) noexcept {
    std::uint64_t k = Rng::mix64(base ^ 0x6A09E667F3BCC908ULL);
    k = Rng::mix64(k ^ fnv1a(name));
    k = Rng::mix64(k + a * 0xD1B54A32D192ED03ULL);
    k = Rng::mix64(k + b * 0x8CB92BA72F3D8DD7ULL);
    return k;
}

} // namespace

Rng Rng::stream(std::uint64_t seed, std::string_view name, std::uint64_t a,
                std::uint64_t b) noexcept {
    return Rng(derive(seed, name, a, b));
}

Rng Rng::split(std::string_view name, std::uint64_t a, std::uint64_t b) const noexcept {
    return Rng(derive(key_, name, a, b));
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = (*this)();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace dpac
