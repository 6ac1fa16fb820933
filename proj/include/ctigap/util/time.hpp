#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ctigap::util {

// Parses an RFC 3339 timestamp ("2017-05-31T21:32:29.203Z", offsets and
// fractional seconds allowed) into microseconds since the Unix epoch, UTC.
// Returns nullopt for anything that does not parse.
std::optional<std::int64_t> parse_rfc3339(std::string_view text);

}  // namespace ctigap::util
