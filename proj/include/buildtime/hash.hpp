#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace buildtime {

class Fnv1a {
public:
    void update(const void* data, std::size_t size)
    {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001B3ULL;
        }
    }

    void update(std::string_view text)
    {
        update(text.data(), text.size());
        const char separator = '\x1f';
        update(&separator, 1);
    }

    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

inline std::string to_hex(std::uint64_t value)
{
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

} // namespace buildtime
