#include <doctest.h>

#include <set>
#include <vector>

#include "hetnet/errors.hpp"
#include "hetnet/patterns.hpp"
#include "hetnet/scenario.hpp"
#include "test_util.hpp"

using namespace hetnet;

namespace {

std::set<Index> on_set(const Pattern& p) {
  std::set<Index> out;
  for (Index b = 0; b < p.active.size(); ++b)
    if (p.active[b]) out.insert(b);
  return out;
}

Topology replicated_topology() {
  return topology_of(generate_scenario(ScenarioConfig{}, 1));
}

}  // namespace

TEST_CASE("full enumeration covers every nonempty subset in mask order") {
  const PatternSet set = enumerate_all_patterns(4);
  REQUIRE(set.size() == 15);
  REQUIRE(set.num_cells == 4);
  set.validate();
  // pattern j corresponds to mask j+1, cell b <-> bit b
  CHECK(on_set(set.patterns[0]) == std::set<Index>{0});
  CHECK(on_set(set.patterns[1]) == std::set<Index>{1});
  CHECK(on_set(set.patterns[2]) == std::set<Index>{0, 1});
  CHECK(on_set(set.patterns[7]) == std::set<Index>{3});
  CHECK(on_set(set.patterns[14]) == std::set<Index>{0, 1, 2, 3});
  CHECK(set.all_on_pattern() == 14);
  for (Index j = 0; j < set.size(); ++j) CHECK(set.patterns[j].id == j);

  CHECK(enumerate_all_patterns(15).size() == 32767);
  CHECK_THROWS_AS(enumerate_all_patterns(0), InputError);
  CHECK_THROWS_AS(enumerate_all_patterns(25), InputError);
}

TEST_CASE("activity table mirrors the on/off flags") {
  const PatternSet set = enumerate_all_patterns(3);
  const MatrixX<double> act = set.activity();
  REQUIRE(act.rows() == 3);
  REQUIRE(act.cols() == 7);
  for (Index i = 0; i < set.size(); ++i)
    for (Index b = 0; b < 3; ++b)
      CHECK(act(b, i) == (set.patterns[i].active[b] ? 1.0 : 0.0));
}

TEST_CASE("topology of the replicated drop") {
  const Topology topo = replicated_topology();
  REQUIRE(topo.num_cells == 15);
  CHECK(topo.macros == std::vector<Index>{0, 1, 2});
  REQUIRE(topo.picos_by_macro.size() == 3);
  CHECK(topo.picos_by_macro[0] == std::vector<Index>{3, 4, 5, 6});
  CHECK(topo.picos_by_macro[1] == std::vector<Index>{7, 8, 9, 10});
  CHECK(topo.picos_by_macro[2] == std::vector<Index>{11, 12, 13, 14});
  CHECK(topo.all_picos().size() == 12);
  // three-class reuse colouring: pico ordinal mod 3
  CHECK(topo.reuse3_class[0] == -1);
  CHECK(topo.reuse3_class[3] == 0);
  CHECK(topo.reuse3_class[4] == 1);
  CHECK(topo.reuse3_class[5] == 2);
  CHECK(topo.reuse3_class[6] == 0);
  CHECK(topo.reuse3_class[14] == 2);
}

TEST_CASE("strategy candidate lists have the documented shapes") {
  const Topology topo = replicated_topology();
  const std::set<Index> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  const std::set<Index> macros{0, 1, 2};
  const std::set<Index> picos{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};

  SUBCASE("reuse-1 is the single everything-on pattern") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::Reuse1, topo);
    REQUIRE(set.size() == 1);
    CHECK(on_set(set.patterns[0]) == all);
  }
  SUBCASE("macro blanking keeps reuse-1 plus the macro-muted pattern") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::MacroABS, topo);
    REQUIRE(set.size() == 2);
    CHECK(on_set(set.patterns[0]) == all);
    CHECK(on_set(set.patterns[1]) == picos);
  }
  SUBCASE("two-phase orthogonal deployment splits the tiers") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::OD1, topo);
    REQUIRE(set.size() == 2);
    CHECK(on_set(set.patterns[0]) == macros);
    CHECK(on_set(set.patterns[1]) == picos);
    // orthogonality: no cell transmits in two patterns
    for (Index b = 0; b < topo.num_cells; ++b)
      CHECK(set.patterns[0].active[b] + set.patterns[1].active[b] <= 1);
  }
  SUBCASE("four-phase orthogonal deployment colours the picos") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::OD3, topo);
    REQUIRE(set.size() == 4);
    CHECK(on_set(set.patterns[0]) == macros);
    CHECK(on_set(set.patterns[1]) == std::set<Index>{3, 6, 9, 12});
    CHECK(on_set(set.patterns[2]) == std::set<Index>{4, 7, 10, 13});
    CHECK(on_set(set.patterns[3]) == std::set<Index>{5, 8, 11, 14});
    for (Index b = 0; b < topo.num_cells; ++b) {
      int on = 0;
      for (const Pattern& p : set.patterns) on += p.active[b] ? 1 : 0;
      CHECK(on == 1);  // partition
    }
  }
  SUBCASE("feature patterns: all picos, then one macro with non-local picos") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::FeaPattern, topo);
    REQUIRE(set.size() == 4);
    CHECK(on_set(set.patterns[0]) == picos);
    CHECK(on_set(set.patterns[1]) == std::set<Index>{0, 7, 8, 9, 10, 11, 12, 13, 14});
    CHECK(on_set(set.patterns[2]) == std::set<Index>{1, 3, 4, 5, 6, 11, 12, 13, 14});
    CHECK(on_set(set.patterns[3]) == std::set<Index>{2, 3, 4, 5, 6, 7, 8, 9, 10});
    // every pattern keeps exactly one macro at most, and every pico it
    // carries lies outside that macro's coverage
    for (Index j = 1; j < 4; ++j) {
      const Index m = j - 1;
      for (const Index p : topo.picos_by_macro[static_cast<std::size_t>(m)])
        CHECK_FALSE(set.patterns[j].active[p]);
    }
  }
  SUBCASE("all patterns on 15 cells") {
    const PatternSet set = build_strategy_patterns(PatternStrategy::AllPattern, topo);
    CHECK(set.size() == 32767);
    CHECK(set.all_on_pattern() == 32766);
  }
}

TEST_CASE("strategy names round-trip") {
  for (const PatternStrategy p :
       {PatternStrategy::AllPattern, PatternStrategy::FeaPattern, PatternStrategy::OD1,
        PatternStrategy::OD3, PatternStrategy::MacroABS, PatternStrategy::Reuse1})
    CHECK(parse_strategy(to_string(p)) == p);
  CHECK_THROWS_AS(parse_strategy("bogus"), InputError);
}

TEST_CASE("pattern set validation") {
  PatternSet set = enumerate_all_patterns(3);
  set.patterns[2].active.setConstant(false);  // all-off is not a pattern
  CHECK_THROWS_AS(set.validate(), InputError);

  PatternSet mismatched = enumerate_all_patterns(3);
  mismatched.patterns[1].id = 7;  // ids must stay dense
  CHECK_THROWS_AS(mismatched.validate(), InputError);
}
