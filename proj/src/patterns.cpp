#include "hetnet/patterns.hpp"

#include <algorithm>

#include "hetnet/errors.hpp"

namespace hetnet {

MatrixX<double> PatternSet::activity() const {
  MatrixX<double> t = MatrixX<double>::Zero(num_cells, size());
  for (Index i = 0; i < size(); ++i)
    for (Index b = 0; b < num_cells; ++b)
      if (patterns[i].active[b]) t(b, i) = 1.0;
  return t;
}

Index PatternSet::all_on_pattern() const {
  for (Index i = 0; i < size(); ++i)
    if (patterns[i].all_on()) return i;
  return -1;
}

void PatternSet::validate() const {
  if (num_cells < 1) throw InputError("pattern set: need at least one cell");
  if (patterns.empty()) throw InputError("pattern set: empty candidate list");
  for (Index i = 0; i < size(); ++i) {
    const Pattern& p = patterns[i];
    if (p.id != i) throw InputError("pattern set: ids must be dense positions");
    if (p.active.size() != num_cells) throw InputError("pattern set: activity size mismatch");
    if (p.count_active() == 0) throw InputError("pattern set: all-off pattern is not allowed");
  }
}

PatternSet enumerate_all_patterns(Index num_cells) {
  if (num_cells < 1 || num_cells > 24)
    throw InputError("enumerate_all_patterns: num_cells must lie in [1, 24]");
  PatternSet set;
  set.num_cells = num_cells;
  const std::uint64_t total = (1ULL << num_cells) - 1;
  set.patterns.reserve(static_cast<std::size_t>(total));
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    Pattern p;
    p.id = static_cast<Index>(mask - 1);
    p.active = BoolVec::Constant(num_cells, false);
    for (Index b = 0; b < num_cells; ++b)
      if (mask & (1ULL << b)) p.active[b] = true;
    set.patterns.push_back(std::move(p));
  }
  return set;
}

std::vector<Index> Topology::all_picos() const {
  std::vector<Index> out;
  for (const auto& group : picos_by_macro) out.insert(out.end(), group.begin(), group.end());
  return out;
}

void Topology::validate() const {
  if (num_cells < 1) throw InputError("topology: need at least one cell");
  if (macros.empty()) throw InputError("topology: need at least one macro");
  if (static_cast<Index>(reuse3_class.size()) != num_cells)
    throw InputError("topology: reuse3_class must cover every cell");
  std::vector<bool> seen(static_cast<std::size_t>(num_cells), false);
  auto mark = [&](Index b) {
    if (b < 0 || b >= num_cells) throw InputError("topology: cell index out of range");
    if (seen[static_cast<std::size_t>(b)]) throw InputError("topology: cell listed twice");
    seen[static_cast<std::size_t>(b)] = true;
  };
  for (Index m : macros) mark(m);
  for (const auto& group : picos_by_macro)
    for (Index p : group) mark(p);
  if (!std::all_of(seen.begin(), seen.end(), [](bool v) { return v; }))
    throw InputError("topology: every cell must be a macro or a pico");
  for (Index b = 0; b < num_cells; ++b) {
    const bool is_macro = std::find(macros.begin(), macros.end(), b) != macros.end();
    if (is_macro && reuse3_class[static_cast<std::size_t>(b)] != -1)
      throw InputError("topology: macros must have reuse3_class == -1");
    if (!is_macro && reuse3_class[static_cast<std::size_t>(b)] < 0)
      throw InputError("topology: picos need a reuse class >= 0");
  }
}

Topology topology_of(const Scenario& s) {
  Topology topo;
  topo.num_cells = s.num_cells();
  topo.reuse3_class.assign(static_cast<std::size_t>(topo.num_cells), -1);
  for (Index b = 0; b < topo.num_cells; ++b)
    if (s.cells[b].kind == CellKind::Macro) topo.macros.push_back(b);
  topo.picos_by_macro.resize(topo.macros.size());
  Index pico_ordinal = 0;
  for (Index b = 0; b < topo.num_cells; ++b) {
    if (s.cells[b].kind != CellKind::Pico) continue;
    const Index parent = s.cells[b].parent;
    auto it = std::find(topo.macros.begin(), topo.macros.end(), parent);
    if (it == topo.macros.end()) throw InputError("topology: pico with unknown parent macro");
    topo.picos_by_macro[static_cast<std::size_t>(it - topo.macros.begin())].push_back(b);
    topo.reuse3_class[static_cast<std::size_t>(b)] = static_cast<int>(pico_ordinal % 3);
    ++pico_ordinal;
  }
  topo.validate();
  return topo;
}

PatternStrategy parse_strategy(const std::string& name) {
  if (name == "all") return PatternStrategy::AllPattern;
  if (name == "feature") return PatternStrategy::FeaPattern;
  if (name == "od1") return PatternStrategy::OD1;
  if (name == "od3") return PatternStrategy::OD3;
  if (name == "abs") return PatternStrategy::MacroABS;
  if (name == "reuse1") return PatternStrategy::Reuse1;
  throw InputError("unknown pattern strategy: " + name);
}

std::string to_string(PatternStrategy strategy) {
  switch (strategy) {
    case PatternStrategy::AllPattern: return "all";
    case PatternStrategy::FeaPattern: return "feature";
    case PatternStrategy::OD1: return "od1";
    case PatternStrategy::OD3: return "od3";
    case PatternStrategy::MacroABS: return "abs";
    case PatternStrategy::Reuse1: return "reuse1";
  }
  throw InputError("unknown pattern strategy enum value");
}

namespace {

Pattern make_pattern(Index num_cells, const std::vector<Index>& on_cells) {
  Pattern p;
  p.active = BoolVec::Constant(num_cells, false);
  for (Index b : on_cells) p.active[b] = true;
  return p;
}

}  // namespace

PatternSet build_strategy_patterns(PatternStrategy strategy, const Topology& topo) {
  topo.validate();
  const Index b_total = topo.num_cells;

  if (strategy == PatternStrategy::AllPattern) return enumerate_all_patterns(b_total);

  std::vector<Index> everything(static_cast<std::size_t>(b_total));
  for (Index b = 0; b < b_total; ++b) everything[static_cast<std::size_t>(b)] = b;
  const std::vector<Index> picos = topo.all_picos();

  PatternSet set;
  set.num_cells = b_total;
  auto add = [&](const std::vector<Index>& on_cells) {
    if (on_cells.empty()) return;  // all-off is never a candidate
    Pattern p = make_pattern(b_total, on_cells);
    p.id = set.size();
    set.patterns.push_back(std::move(p));
  };

  switch (strategy) {
    case PatternStrategy::Reuse1:
      add(everything);
      break;
    case PatternStrategy::MacroABS:
      add(everything);
      add(picos);  // macros silenced
      break;
    case PatternStrategy::OD1:
      add(topo.macros);
      add(picos);
      break;
    case PatternStrategy::OD3: {
      add(topo.macros);
      for (int cls = 0; cls < 3; ++cls) {
        std::vector<Index> on;
        for (Index p : picos)
          if (topo.reuse3_class[static_cast<std::size_t>(p)] == cls) on.push_back(p);
        add(on);
      }
      break;
    }
    case PatternStrategy::FeaPattern: {
      add(picos);  // every macro silent, every pico on
      for (std::size_t m = 0; m < topo.macros.size(); ++m) {
        std::vector<Index> on = {topo.macros[m]};
        for (std::size_t other = 0; other < topo.macros.size(); ++other)
          if (other != m)
            on.insert(on.end(), topo.picos_by_macro[other].begin(),
                      topo.picos_by_macro[other].end());
        std::sort(on.begin(), on.end());
        add(on);
      }
      break;
    }
    case PatternStrategy::AllPattern:
      break;  // handled above
  }

  set.validate();
  return set;
}

}  // namespace hetnet
