#include "mixscope/amount.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mixscope {

Amount parse_btc(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty BTC amount");

  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);

  if ((whole.empty() && frac.empty()) || (dot != std::string_view::npos && frac.empty()))
    throw std::invalid_argument("malformed BTC amount '" + std::string(text) + "'");
  if (frac.size() > 8)
    throw std::invalid_argument("BTC amount '" + std::string(text) +
                                "' has more than 8 decimals");

  auto digits_only = [](std::string_view s) {
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  if (!digits_only(whole) || !digits_only(frac))
    throw std::invalid_argument("malformed BTC amount '" + std::string(text) + "'");

  constexpr Amount kMaxWhole = std::numeric_limits<Amount>::max() / kSatoshisPerBtc - 1;
  Amount btc = 0;
  for (char c : whole) {
    btc = btc * 10 + (c - '0');
    if (btc > kMaxWhole)
      throw std::invalid_argument("BTC amount '" + std::string(text) + "' out of range");
  }

  Amount sat = 0;
  Amount scale = kSatoshisPerBtc;
  for (char c : frac) {
    scale /= 10;
    sat += (c - '0') * scale;
  }
  return btc * kSatoshisPerBtc + sat;
}

std::string format_btc(Amount sat) {
  const bool negative = sat < 0;
  const auto mag = negative ? -static_cast<unsigned long long>(sat)
                            : static_cast<unsigned long long>(sat);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%llu.%08llu", negative ? "-" : "",
                mag / kSatoshisPerBtc, mag % kSatoshisPerBtc);
  return buf;
}

std::string month_key(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(sys_seconds{seconds{unix_seconds}})};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()));
  return buf;
}

}  // namespace mixscope
