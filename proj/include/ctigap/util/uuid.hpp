#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ctigap::util {

struct Uuid {
    std::array<std::uint8_t, 16> bytes{};

    std::string to_string() const;

    bool operator==(const Uuid& other) const = default;
};

// Name-based UUID (version 5, SHA-1) per RFC 4122. Identical
// (namespace, name) pairs always yield the same id.
Uuid uuid5(const Uuid& ns, std::string_view name);

// Project namespace under which all artifact ids are derived.
const Uuid& artifact_namespace();

}  // namespace ctigap::util
