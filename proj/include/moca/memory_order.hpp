#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace moca {

enum class MemoryOrder { na, rlx, acq, rel, acq_rel, sc };

inline constexpr std::array<MemoryOrder, 6> kAllOrders = {
    MemoryOrder::na,  MemoryOrder::rlx,     MemoryOrder::acq,
    MemoryOrder::rel, MemoryOrder::acq_rel, MemoryOrder::sc};

/// Strictness lattice: na < rlx < {acq, rel} < acq_rel < sc, with acq and rel
/// incomparable. Returns true when `weaker` is at most as strict as `stronger`.
constexpr bool order_leq(MemoryOrder weaker, MemoryOrder stronger) {
  if (weaker == stronger) return true;
  switch (weaker) {
    case MemoryOrder::na:
      return true;
    case MemoryOrder::rlx:
      return stronger != MemoryOrder::na;
    case MemoryOrder::acq:
    case MemoryOrder::rel:
      return stronger == MemoryOrder::acq_rel || stronger == MemoryOrder::sc;
    case MemoryOrder::acq_rel:
      return stronger == MemoryOrder::sc;
    case MemoryOrder::sc:
      return false;
  }
  return false;
}

constexpr bool order_lt(MemoryOrder a, MemoryOrder b) {
  return a != b && order_leq(a, b);
}

constexpr bool at_least(MemoryOrder m, MemoryOrder floor) {
  return order_leq(floor, m);
}

constexpr bool is_acquire_class(MemoryOrder m) {
  return at_least(m, MemoryOrder::acq);
}

constexpr bool is_release_class(MemoryOrder m) {
  return at_least(m, MemoryOrder::rel);
}

constexpr std::string_view to_string(MemoryOrder m) {
  switch (m) {
    case MemoryOrder::na: return "na";
    case MemoryOrder::rlx: return "rlx";
    case MemoryOrder::acq: return "acq";
    case MemoryOrder::rel: return "rel";
    case MemoryOrder::acq_rel: return "acq_rel";
    case MemoryOrder::sc: return "sc";
  }
  return "?";
}

inline std::optional<MemoryOrder> parse_order(std::string_view text) {
  for (auto m : kAllOrders)
    if (to_string(m) == text) return m;
  return std::nullopt;
}

}  // namespace moca
