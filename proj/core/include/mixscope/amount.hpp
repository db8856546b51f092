#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mixscope {

/// Integer satoshis. Decimal BTC only exists at I/O boundaries.
using Amount = std::int64_t;

inline constexpr Amount kSatoshisPerBtc = 100'000'000;

/// Parses a decimal BTC string ("0.9", "12", "0.00150000") into satoshis.
/// Throws std::invalid_argument on malformed text, a negative sign, or more
/// than 8 fractional digits.
Amount parse_btc(std::string_view text);

/// Formats satoshis as a fixed 8-decimal BTC string.
std::string format_btc(Amount sat);

/// "YYYY-MM" for a unix timestamp, UTC.
std::string month_key(std::int64_t unix_seconds);

}  // namespace mixscope
