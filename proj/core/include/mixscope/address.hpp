#pragma once

#include <string>
#include <string_view>

namespace mixscope {

enum class AddressKind { P2PKH, P2SH, SegWit, Unknown };

/// Prefix rule: "1" P2PKH, "3" P2SH, "bc1q" SegWit, anything else Unknown.
AddressKind classify_address_type(std::string_view text) noexcept;

std::string_view to_string(AddressKind kind) noexcept;

struct Address {
  std::string text;
  AddressKind kind = AddressKind::Unknown;

  Address() = default;
  explicit Address(std::string t) : text(std::move(t)), kind(classify_address_type(text)) {}

  friend bool operator==(const Address& a, const Address& b) { return a.text == b.text; }
};

}  // namespace mixscope
