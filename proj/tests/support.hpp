#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "moca/engine.hpp"
#include "moca/parser.hpp"

namespace moca::fixtures {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(MOCA_CORPUS_DIR))
    if (e.path().extension() == ".lit") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline Program corpus(const std::string& name) {
  return parse_program(read_file(std::filesystem::path(MOCA_CORPUS_DIR) / (name + ".lit")));
}

/// Runs a schedule written as unit tokens, e.g. "T1 T1/x T2".
inline ExecState run(const Machine& m, const std::string& schedule) {
  return run_sequence(m, parse_schedule(m, schedule));
}

/// Position of the k-th event of a unit in a sequence, -1 if absent.
inline int pos_of(const Sequence& seq, int unit, int k) {
  for (int i = 0; i < static_cast<int>(seq.size()); ++i)
    if (seq[static_cast<std::size_t>(i)].ev.thr == unit && seq[static_cast<std::size_t>(i)].ev.idx == k) return i;
  return -1;
}

}  // namespace moca::fixtures
