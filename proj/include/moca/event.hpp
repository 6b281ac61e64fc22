#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moca/memory_order.hpp"
#include "moca/program.hpp"

namespace moca {

enum class Act { write, read, rmw, fence, shadow_write };

constexpr std::string_view to_string(Act a) {
  switch (a) {
    case Act::write: return "write";
    case Act::read: return "read";
    case Act::rmw: return "rmw";
    case Act::fence: return "fence";
    case Act::shadow_write: return "shadow_write";
  }
  return "?";
}

inline constexpr int kInitThread = -1;

/// ⟨thr, act, obj, ord, idx⟩. `thr` is a schedulable-unit id: program
/// threads are 0..N-1, shadow threads N + t*|O| + o, init is -1. rmw events
/// in this DSL read and write the same object, so `obj` serves both roles.
struct Event {
  int thr = 0;
  Act act = Act::fence;
  int obj = -1;
  MemoryOrder ord = MemoryOrder::na;
  int idx = 0;
  int stmt = -1;  // statement id within the owning thread, -1 for shadow/init
  bool drains = false;  // from an rmw statement: waits for the thread's own queue on obj

  bool is_read() const { return act == Act::read || act == Act::rmw; }
  bool is_write() const { return act == Act::write || act == Act::rmw; }
  bool is_shadow() const { return act == Act::shadow_write; }
  bool is_fence() const { return act == Act::fence; }
  bool is_init() const { return thr == kInitThread; }
  /// Events that update the shared store: shadow-writes, rmws and init writes.
  bool is_store_update() const { return is_shadow() || act == Act::rmw || is_init(); }

  bool operator==(const Event&) const = default;
};

/// Layout of schedulable units for a program with N threads and |O| objects.
struct UnitMap {
  int threads = 0;
  int objects = 0;

  int count() const { return threads + threads * objects; }
  bool is_shadow(int unit) const { return unit >= threads; }
  int shadow_of(int thread, int obj) const { return threads + thread * objects + obj; }
  /// Program thread owning a unit (itself for program threads).
  int owner(int unit) const {
    if (unit < 0) return kInitThread;
    return unit < threads ? unit : (unit - threads) / objects;
  }
  int shadow_object(int unit) const { return (unit - threads) % objects; }

  /// Threads that read an object they also write; only for these does the
  /// issue position of a write matter to later reads of the same thread.
  std::vector<bool> self_read;
  bool reads_own(int thread, int obj) const {
    auto k = static_cast<std::size_t>(thread * objects + obj);
    return k < self_read.size() && self_read[k];
  }
};

/// One executed event plus the data the engine resolved for it.
struct SeqEvent {
  Event ev;
  Value read_value = 0;
  Value write_value = 0;
  int rf = -1;   // sequence position of the source write (reads, rmws)
  int shw = -1;  // position of the shadow-write (writes); -1 while pending
  int prw = -1;  // originating write (shadow-writes); self for rmw/init
  int owner = kInitThread;  // program thread, kInitThread for init writes
};

using Sequence = std::vector<SeqEvent>;

/// Stable, order-independent name of an event: init writes are "init(x)",
/// program events "T1#k" (k-th event of T1), shadow-writes "shw(T1#k)".
inline std::string event_name(const Program& p, const Sequence& seq, int pos) {
  const SeqEvent& se = seq[static_cast<std::size_t>(pos)];
  if (se.ev.is_init()) return "init(" + p.objects[static_cast<std::size_t>(se.ev.obj)].name + ")";
  if (se.ev.is_shadow()) return "shw(" + event_name(p, seq, se.prw) + ")";
  return p.threads[static_cast<std::size_t>(se.ev.thr)].name + "#" + std::to_string(se.ev.idx);
}

}  // namespace moca
