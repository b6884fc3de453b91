#ifndef HETNET_PATTERNS_HPP
#define HETNET_PATTERNS_HPP

#include <string>
#include <vector>

#include "hetnet/scenario.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// An on/off transmission pattern over the cells. `id` is the position of
// the pattern in its candidate list, not a bitmask value.
struct Pattern {
  Index id = -1;
  BoolVec active;  // active[b] == true when cell b transmits

  Index count_active() const { return static_cast<Index>(active.count()); }
  bool all_on() const { return count_active() == active.size(); }
};

struct PatternSet {
  Index num_cells = 0;
  std::vector<Pattern> patterns;

  Index size() const { return static_cast<Index>(patterns.size()); }

  // 0/1 activity table, cells x patterns.
  MatrixX<double> activity() const;

  // Index of the pattern with every cell on, or -1 if absent.
  Index all_on_pattern() const;

  void validate() const;  // ids dense, sizes consistent, no all-off pattern
};

// Every nonempty on/off combination over `num_cells` cells, in ascending
// order of the bitmask value (cell b <-> bit b of the mask). Guarded to
// 1 <= num_cells <= 24 to keep 2^B - 1 enumerable.
PatternSet enumerate_all_patterns(Index num_cells);

// Which cells are macros, which picos belong to which macro, and the
// frequency-reuse class used by the three-class pico strategies. Derived
// from a Scenario by default (class = pico ordinal mod 3); callers may
// override `reuse3_class` before building pattern sets.
struct Topology {
  Index num_cells = 0;
  std::vector<Index> macros;
  std::vector<std::vector<Index>> picos_by_macro;
  std::vector<int> reuse3_class;  // per cell; -1 for macros

  std::vector<Index> all_picos() const;
  void validate() const;
};

Topology topology_of(const Scenario& s);

enum class PatternStrategy { AllPattern, FeaPattern, OD1, OD3, MacroABS, Reuse1 };

// Parse from the CLI spellings: all, feature, od1, od3, abs, reuse1.
PatternStrategy parse_strategy(const std::string& name);
std::string to_string(PatternStrategy strategy);

// The candidate pattern lists, in a fixed documented order:
//   Reuse1    [everything on]
//   MacroABS  [everything on, macros muted]
//   OD1       [macros only, picos only]
//   OD3       [macros only, pico class 0, pico class 1, pico class 2]
//   FeaPattern[all picos on; then per macro m: m on + picos outside m]
//   AllPattern enumerate_all_patterns(B)
PatternSet build_strategy_patterns(PatternStrategy strategy, const Topology& topo);

}  // namespace hetnet

#endif  // HETNET_PATTERNS_HPP
