#pragma once

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "moca/engine.hpp"
#include "moca/explorer.hpp"
#include "moca/relations.hpp"

namespace moca {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

inline Json locals_json(const Program& p, const std::vector<std::vector<std::optional<Value>>>& lcl) {
  Json out = Json::object();
  for (std::size_t t = 0; t < p.threads.size(); ++t) {
    Json th = Json::object();
    for (std::size_t s = 0; s < p.threads[t].locals.size(); ++s) {
      const auto& v = lcl[t][s];
      th[p.threads[t].locals[s]] = v ? Json(*v) : Json(nullptr);
    }
    out[p.threads[t].name] = std::move(th);
  }
  return out;
}

inline std::string hex_id(std::uint64_t id) {
  std::ostringstream os;
  os << std::hex << id;
  return os.str();
}

}  // namespace detail

inline Json report_json(const Machine& m, const ExplorationReport& r) {
  const Program& p = m.program();
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["program"] = r.program;
  j["complete"] = r.complete;
  if (!r.complete) j["stop_reason"] = r.stop_reason;
  j["sequences_explored"] = r.sequences_explored;
  j["blocked_sequences"] = r.blocked_sequences;
  j["distinct_traces"] = r.distinct_traces;
  j["racy_sequences"] = r.racy_sequence_count;
  j["incoherent_sequences"] = r.incoherent_sequences;
  if (p.expected_traces) j["expected_traces"] = *p.expected_traces;
  Json v = Json::array();
  for (const auto& a : r.violations)
    v.push_back({{"assert", a.text}, {"trace", detail::hex_id(a.trace)}, {"schedule", schedule_tokens(m, a.schedule)}});
  j["violations"] = std::move(v);
  Json races = Json::array();
  for (const auto& x : r.na_races)
    races.push_back({{"object", x.object}, {"events", {x.first, x.second}}, {"schedule", schedule_tokens(m, x.schedule)}});
  j["na_races"] = std::move(races);
  Json traces = Json::array();
  for (const auto& t : r.traces) {
    Json shared = Json::object();
    for (std::size_t o = 0; o < p.objects.size(); ++o) shared[p.objects[o].name] = t.shared[o];
    Json rf = Json::array();
    for (const auto& [rd, w] : t.rf) rf.push_back({rd, w});
    traces.push_back({{"id", detail::hex_id(t.id)},
                      {"schedule", schedule_tokens(m, t.schedule)},
                      {"shared", std::move(shared)},
                      {"locals", detail::locals_json(p, t.locals)},
                      {"rf", std::move(rf)},
                      {"racy", t.racy}});
  }
  j["traces"] = std::move(traces);
  j["prunes"] = r.prunes;
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline std::string report_text(const Machine& m, const ExplorationReport& r) {
  std::ostringstream os;
  os << "program " << r.program << '\n';
  os << "sequences_explored " << r.sequences_explored << '\n';
  os << "distinct_traces " << r.distinct_traces << '\n';
  os << "blocked_sequences " << r.blocked_sequences << '\n';
  os << "racy_sequences " << r.racy_sequence_count << '\n';
  if (!r.complete) os << "incomplete: " << r.stop_reason << '\n';
  os << "violations " << r.violations.size() << '\n';
  for (const auto& a : r.violations) {
    os << "  assert never " << a.text << "\n    schedule:";
    for (const auto& t : schedule_tokens(m, a.schedule)) os << ' ' << t;
    os << '\n';
  }
  os << "na_races " << r.na_races.size() << '\n';
  for (const auto& x : r.na_races) {
    os << "  " << x.first << " ~ " << x.second << " on " << x.object << "\n    schedule:";
    for (const auto& t : schedule_tokens(m, x.schedule)) os << ' ' << t;
    os << '\n';
  }
  for (const auto& d : r.diagnostics) os << "diagnostic: " << d << '\n';
  return os.str();
}

inline Json relations_json(const Program& p, const Sequence& seq, const RelationSet& rel) {
  const int n = static_cast<int>(seq.size());
  auto name = [&](int k) { return event_name(p, seq, k); };
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  Json events = Json::array();
  for (int k = 0; k < n; ++k) events.push_back(describe_event(p, seq, k));
  j["events"] = std::move(events);
  auto pairs = [&](auto pred) {
    Json out = Json::array();
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a)
        if (a != b && pred(a, b)) out.push_back({name(a), name(b)});
    return out;
  };
  j["po"] = pairs([&](int a, int b) { return rel.po(a, b) && rel.po_prev(b) == a; });
  j["rf"] = Json::array();
  for (auto [w, r] : rel.rf()) j["rf"].push_back({name(w), name(r)});
  j["sw"] = pairs([&](int a, int b) { return rel.sw(a, b); });
  j["dob"] = pairs([&](int a, int b) { return rel.dob(a, b); });
  j["hb"] = pairs([&](int a, int b) { return rel.hb(a, b); });
  j["mhb"] = pairs([&](int a, int b) { return rel.mhb(a, b); });
  Json mo = Json::object();
  for (int o = 0; o < rel.num_objects(); ++o) {
    Json l = Json::array();
    for (int w : rel.mo(o)) l.push_back(name(w));
    mo[p.objects[static_cast<std::size_t>(o)].name] = std::move(l);
  }
  j["mo"] = std::move(mo);
  j["to"] = Json::array();
  for (int e : rel.to()) j["to"].push_back(name(e));
  return j;
}

/// Graphviz rendering: one cluster per unit, edges for po, rf, sw, dob and
/// the covering part of mo.
inline std::string relations_dot(const Program& p, const Sequence& seq, const RelationSet& rel) {
  const int n = static_cast<int>(seq.size());
  std::ostringstream os;
  os << "digraph relations {\n  node [shape=box, fontname=monospace];\n";
  std::map<int, std::vector<int>> by_unit;
  for (int k = 0; k < n; ++k) by_unit[seq[static_cast<std::size_t>(k)].ev.thr].push_back(k);
  for (const auto& [u, evs] : by_unit) {
    os << "  subgraph cluster_" << (u < 0 ? std::string("init") : std::to_string(u)) << " {\n";
    for (int k : evs) os << "    e" << k << " [label=\"" << describe_event(p, seq, k) << "\"];\n";
    os << "  }\n";
  }
  for (int b = 0; b < n; ++b) {
    if (int a = rel.po_prev(b); a >= 0) os << "  e" << a << " -> e" << b << " [label=po];\n";
    rel.sw_pred(b).for_each([&](std::size_t a) { os << "  e" << a << " -> e" << b << " [label=sw, color=blue];\n"; });
    rel.dob_pred(b).for_each([&](std::size_t a) { os << "  e" << a << " -> e" << b << " [label=dob, color=purple];\n"; });
  }
  for (auto [w, r] : rel.rf()) os << "  e" << w << " -> e" << r << " [label=rf, color=red];\n";
  for (int o = 0; o < rel.num_objects(); ++o) {
    const auto& l = rel.mo(o);
    for (std::size_t k = 1; k < l.size(); ++k)
      os << "  e" << l[k - 1] << " -> e" << l[k] << " [label=mo, style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace moca
