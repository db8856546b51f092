#include "mixscope/address.hpp"

namespace mixscope {

AddressKind classify_address_type(std::string_view text) noexcept {
  if (text.starts_with("bc1q")) return AddressKind::SegWit;
  if (text.starts_with('1')) return AddressKind::P2PKH;
  if (text.starts_with('3')) return AddressKind::P2SH;
  return AddressKind::Unknown;
}

std::string_view to_string(AddressKind kind) noexcept {
  switch (kind) {
    case AddressKind::P2PKH: return "P2PKH";
    case AddressKind::P2SH: return "P2SH";
    case AddressKind::SegWit: return "SegWit";
    case AddressKind::Unknown: break;
  }
  return "Unknown";
}

}  // namespace mixscope
