#include "ctigap/util/uuid.hpp"

#include "ctigap/util/sha1.hpp"

#include <cstdio>

namespace ctigap::util {

std::string Uuid::to_string() const {
    char buf[37];
    std::snprintf(buf, sizeof(buf),
                  "%02x%02x%02x%02x-%02x%02x-%02x%02x-%02x%02x-%02x%02x%02x%02x%02x%02x",
                  bytes[0], bytes[1], bytes[2], bytes[3], bytes[4], bytes[5], bytes[6], bytes[7],
                  bytes[8], bytes[9], bytes[10], bytes[11], bytes[12], bytes[13], bytes[14],
                  bytes[15]);
    return std::string(buf);
}

Uuid uuid5(const Uuid& ns, std::string_view name) {
    std::string material(ns.bytes.begin(), ns.bytes.end());
    material.append(name);
    const auto digest = sha1(material);

    Uuid out;
    for (int i = 0; i < 16; ++i) {
        out.bytes[i] = digest[i];
    }
    out.bytes[6] = static_cast<std::uint8_t>((out.bytes[6] & 0x0F) | 0x50);  // version 5
    out.bytes[8] = static_cast<std::uint8_t>((out.bytes[8] & 0x3F) | 0x80);  // RFC 4122 variant
    return out;
}

const Uuid& artifact_namespace() {
    // RFC 4122 DNS namespace, then one level down for this tool.
    static const Uuid dns{{0x6b, 0xa7, 0xb8, 0x10, 0x9d, 0xad, 0x11, 0xd1, 0x80, 0xb4, 0x00, 0xc0,
                           0x4f, 0xd4, 0x30, 0xc8}};
    static const Uuid ns = uuid5(dns, "ctigap");
    return ns;
}

}  // namespace ctigap::util
