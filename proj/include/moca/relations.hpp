#pragma once

#include <map>
#include <vector>

#include "moca/bitset.hpp"
#include "moca/engine.hpp"
#include "moca/event.hpp"

namespace moca {

/// Whether write `w` had been made visible strictly before position `pos`.
inline bool flushed_before(const Sequence& seq, int w, int pos) {
  int s = seq[static_cast<std::size_t>(w)].shw;
  return s >= 0 && s < pos;
}

/// Whether `c` ends a release sequence headed by `head`: a write of another
/// thread that is neither an rmw nor at least release.
inline bool cuts_release_sequence(const SeqEvent& head, const SeqEvent& c) {
  return c.owner != head.owner && c.ev.act != Act::rmw && order_lt(c.ev.ord, MemoryOrder::rel);
}

/// Release sequence of `head` in modification order. A head whose
/// shadow-write has not happened yet heads the singleton sequence.
inline std::vector<int> release_sequence(const Sequence& seq, int head) {
  const SeqEvent& h = seq[static_cast<std::size_t>(head)];
  if (!h.ev.is_write() || h.ev.is_init() || !is_release_class(h.ev.ord))
    throw ContractViolation("release_sequence needs a release-class write");
  std::vector<int> out{head};
  if (h.shw < 0) return out;
  for (std::size_t k = static_cast<std::size_t>(h.shw) + 1; k < seq.size(); ++k) {
    const SeqEvent& u = seq[k];
    if (u.ev.obj != h.ev.obj || !(u.ev.is_shadow() || u.ev.act == Act::rmw)) continue;
    const SeqEvent& w = seq[static_cast<std::size_t>(u.prw)];
    if (cuts_release_sequence(h, w)) break;
    out.push_back(u.prw);
  }
  return out;
}

/// Relations over a sequence, extended one event at a time. Each row is
/// fixed when its event is appended, so the relations of a prefix are the
/// restriction of the relations of any extension.
class RelationSet {
 public:
  RelationSet() = default;
  explicit RelationSet(int objects) : mo_(static_cast<std::size_t>(objects)) {}

  void append(const Sequence& seq, int i) {
    if (i != size()) throw ContractViolation("relations must be appended in sequence order");
    const SeqEvent& se = seq[static_cast<std::size_t>(i)];
    const Event& ev = se.ev;
    Row row;
    row.unit = ev.thr;
    mo_rank_.push_back(-1);
    if (ev.is_init()) {
      add_mo(ev.obj, i);
      inits_.set(static_cast<std::size_t>(i));
      rows_.push_back(std::move(row));
      return;
    }
    row.hb = inits_;
    if (auto it = last_of_unit_.find(ev.thr); it != last_of_unit_.end()) {
      row.po_prev = it->second;
      row.hb.set(static_cast<std::size_t>(it->second));
      row.hb |= rows_[static_cast<std::size_t>(it->second)].hb;
    }
    last_of_unit_[ev.thr] = i;

    if (ev.is_shadow()) {
      add_mo(ev.obj, se.prw);
      if (ev.ord == MemoryOrder::sc) to_.push_back(se.prw);
      rows_.push_back(std::move(row));
      return;
    }
    if (ev.act == Act::rmw) add_mo(ev.obj, i);
    if (ev.ord == MemoryOrder::sc && ev.act != Act::write) to_.push_back(i);
    if (se.rf >= 0) rf_.push_back({se.rf, i});

    if (ev.is_read() && is_acquire_class(ev.ord)) sync_read(seq, i, row);
    if (ev.is_fence() && is_acquire_class(ev.ord)) sync_fence(seq, i, row);

    Bits direct = row.sw;
    direct |= row.dob;
    direct.for_each([&](std::size_t k) {
      row.hb.set(k);
      row.hb |= rows_[k].hb;
    });
    rows_.push_back(std::move(row));
  }

  int size() const { return static_cast<int>(rows_.size()); }

  bool po(int a, int b) const {
    if (a == b || b >= size() || a >= size()) return false;
    if (is_init(a)) return !is_init(b);
    return unit(a) == unit(b) && a < b;
  }
  bool sw(int a, int b) const { return rows_[static_cast<std::size_t>(b)].sw.test(static_cast<std::size_t>(a)); }
  bool dob(int a, int b) const { return rows_[static_cast<std::size_t>(b)].dob.test(static_cast<std::size_t>(a)); }
  bool hb(int a, int b) const { return rows_[static_cast<std::size_t>(b)].hb.test(static_cast<std::size_t>(a)); }
  bool ithb(int a, int b) const { return hb(a, b) && !po(a, b); }
  bool mhb(int a, int b) const { return hb(a, b) && !sw(a, b) && !dob(a, b); }

  const Bits& hb_pred(int b) const { return rows_[static_cast<std::size_t>(b)].hb; }
  const Bits& sw_pred(int b) const { return rows_[static_cast<std::size_t>(b)].sw; }
  const Bits& dob_pred(int b) const { return rows_[static_cast<std::size_t>(b)].dob; }
  Bits mhb_pred(int b) const {
    Bits m = hb_pred(b);
    m.subtract(sw_pred(b));
    m.subtract(dob_pred(b));
    return m;
  }
  int po_prev(int b) const { return rows_[static_cast<std::size_t>(b)].po_prev; }

  /// Writes of `obj` in modification order, init first.
  const std::vector<int>& mo(int obj) const { return mo_[static_cast<std::size_t>(obj)]; }
  /// Rank of write `w` in its object's mo, -1 while not yet visible.
  int mo_rank(int w) const { return mo_rank_[static_cast<std::size_t>(w)]; }
  bool mo_before(int a, int b) const {
    int ra = mo_rank(a), rb = mo_rank(b);
    if (ra < 0) return false;
    return rb < 0 || ra < rb;
  }
  /// sc events (sc writes at their shadow-write) in total order.
  const std::vector<int>& to() const { return to_; }
  const std::vector<std::pair<int, int>>& rf() const { return rf_; }
  int num_objects() const { return static_cast<int>(mo_.size()); }

 private:
  struct Row {
    int unit = kInitThread;
    int po_prev = -1;
    Bits sw, dob, hb;
  };

  bool is_init(int a) const { return inits_.test(static_cast<std::size_t>(a)); }
  int unit(int a) const { return rows_[static_cast<std::size_t>(a)].unit; }

  void add_mo(int obj, int w) {
    auto& list = mo_[static_cast<std::size_t>(obj)];
    mo_rank_[static_cast<std::size_t>(w)] = static_cast<int>(list.size());
    list.push_back(w);
  }

  // walks `from` and its po-predecessors in the same unit, latest first
  template <typename Fn>
  void for_po_chain(const Sequence& seq, int from, Fn&& fn) const {
    for (int k = from; k >= 0;
         k = rows_[static_cast<std::size_t>(k)].po_prev)
      fn(k, seq[static_cast<std::size_t>(k)]);
  }

  void sync_read(const Sequence& seq, int i, Row& row) {
    const SeqEvent& r = seq[static_cast<std::size_t>(i)];
    int w = r.rf;
    const SeqEvent& src = seq[static_cast<std::size_t>(w)];
    if (src.ev.is_init()) return;
    if (src.owner != r.owner) {
      if (is_release_class(src.ev.ord)) row.sw.set(static_cast<std::size_t>(w));
      for_po_chain(seq, po_prev(w), [&](int k, const SeqEvent& f) {
        if (f.ev.is_fence() && is_release_class(f.ev.ord)) row.sw.set(static_cast<std::size_t>(k));
      });
    }
    // dob: heads whose release sequence (as visible before i) contains w
    if (!flushed_before(seq, w, i)) return;
    const auto& order = mo_[static_cast<std::size_t>(src.ev.obj)];
    int rank = mo_rank(w);
    for (int k = rank; k >= 0; --k) {
      int h = order[static_cast<std::size_t>(k)];
      const SeqEvent& head = seq[static_cast<std::size_t>(h)];
      if (head.ev.is_init()) break;
      if (head.owner != r.owner && is_release_class(head.ev.ord)) {
        bool reaches = true;
        for (int j = k + 1; j <= rank; ++j) {
          if (cuts_release_sequence(head, seq[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])])) {
            reaches = false;
            break;
          }
        }
        if (reaches) row.dob.set(static_cast<std::size_t>(h));
      }
    }
  }

  void sync_fence(const Sequence& seq, int i, Row& row) {
    const SeqEvent& f = seq[static_cast<std::size_t>(i)];
    for_po_chain(seq, row.po_prev, [&](int, const SeqEvent& r) {
      if (!r.ev.is_read()) return;
      const SeqEvent& src = seq[static_cast<std::size_t>(r.rf)];
      if (src.ev.is_init() || src.owner == f.owner) return;
      if (is_release_class(src.ev.ord)) row.sw.set(static_cast<std::size_t>(r.rf));
      for_po_chain(seq, po_prev(r.rf), [&](int j, const SeqEvent& g) {
        if (g.ev.is_fence() && is_release_class(g.ev.ord)) row.sw.set(static_cast<std::size_t>(j));
      });
    });
  }

  std::vector<Row> rows_;
  Bits inits_;
  std::map<int, int> last_of_unit_;
  std::vector<std::vector<int>> mo_;
  std::vector<int> mo_rank_;
  std::vector<int> to_;
  std::vector<std::pair<int, int>> rf_;
};

/// Relations of a complete sequence.
inline RelationSet compute_relations(const Sequence& seq, int objects) {
  RelationSet r(objects);
  for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
    const SeqEvent& se = seq[static_cast<std::size_t>(i)];
    if (se.ev.is_read() && se.rf < 0) throw ContractViolation("unresolved read");
    r.append(seq, i);
  }
  return r;
}

}  // namespace moca
