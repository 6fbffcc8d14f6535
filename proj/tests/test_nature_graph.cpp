#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "mea/error.hpp"
#include "mea/nature_graph.hpp"
#include "oracles/reachability_oracle.hpp"

using namespace mea;

TEST(NatureGraph, DefaultShape) {
  const auto& g = default_graph();
  EXPECT_EQ(g.nodes(), NodeSet::all());
  EXPECT_EQ(g.edges().size(), 16u);
  std::size_t silent = 0;
  for (const auto& e : g.edges())
    if (!e.transmits) {
      ++silent;
      EXPECT_EQ(e.head, NodeId::past_experience);
    }
  EXPECT_EQ(silent, 4u);
  EXPECT_TRUE(validate_graph(g).ok());
}

TEST(NatureGraph, TransmittingTails) {
  const auto& g = default_graph();
  EXPECT_EQ(transmitting_tails(g, NodeId::need_food_pos), NodeSet{NodeId::action_pos});
  EXPECT_EQ(transmitting_tails(g, NodeId::action_neg),
            (NodeSet{NodeId::mental_action, NodeId::physical_action, NodeId::social_action}));
  EXPECT_TRUE(transmitting_tails(g, NodeId::past_experience).empty());
  EXPECT_TRUE(transmitting_tails(g, NodeId::food).empty());

  NatureGraph partial = g;
  partial.remove_node(NodeId::food);
  EXPECT_THROW(transmitting_tails(partial, NodeId::food), UnknownNodeError);
}

TEST(NatureGraph, OppositeIsAnInvolution) {
  int polar = 0;
  for (auto n : kAllNodes) {
    if (auto o = try_opposite(n)) {
      ++polar;
      EXPECT_NE(*o, n);
      EXPECT_EQ(opposite_node(*o), n);
    } else {
      EXPECT_THROW(opposite_node(n), NoOppositeError);
    }
  }
  EXPECT_EQ(polar, 8);
  EXPECT_EQ(opposite_node(NodeId::emo_pos), NodeId::emo_neg);
  EXPECT_THROW(opposite_node(NodeId::food), NoOppositeError);
}

TEST(NatureGraph, NodeNames) {
  for (auto n : kAllNodes) EXPECT_EQ(node_from_string(to_string(n)), n);
  EXPECT_EQ(node_from_string("#emo_neg"), NodeId::emo_neg);
  EXPECT_FALSE(node_from_string("need_water").has_value());
}

TEST(NatureGraph, EdgeInsertionOrderIsIrrelevant) {
  const auto& g = default_graph();
  auto edges = g.edges();
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::shuffle(edges.begin(), edges.end(), rng);
    NatureGraph h;
    for (const auto& e : edges) h.add_edge(e);
    ASSERT_EQ(h, g);
    ASSERT_TRUE(validate_graph(h).ok());
  }
}

TEST(NatureGraph, RejectsBadEdges) {
  NatureGraph g;
  EXPECT_THROW(g.add_edge({NodeId::emo_pos, NodeId::emo_pos, true}), InputError);
  g.add_edge({NodeId::emo_pos, NodeId::need_food_pos, true});
  EXPECT_THROW(g.add_edge({NodeId::emo_pos, NodeId::need_food_pos, false}), InputError);
}

TEST(NatureGraph, ValidateFindsCycle) {
  NatureGraph g = default_graph();
  g.add_edge({NodeId::action_pos, NodeId::emo_pos, true});
  auto v = validate_graph(g);
  ASSERT_EQ(v.status, GraphValidation::Status::cycle);
  ASSERT_GE(v.cycle.size(), 2u);
  EXPECT_EQ(v.cycle.front(), v.cycle.back());
  for (std::size_t i = 0; i + 1 < v.cycle.size(); ++i) EXPECT_TRUE(g.has_edge(v.cycle[i], v.cycle[i + 1]));
}

TEST(NatureGraph, ValidateFindsMissingNodes) {
  NatureGraph g = default_graph();
  g.remove_node(NodeId::social_action);
  auto v = validate_graph(g);
  EXPECT_EQ(v.status, GraphValidation::Status::node_set);
  EXPECT_EQ(v.missing, std::vector<NodeId>{NodeId::social_action});
}

TEST(NatureGraph, OverrideFileRoundTrip) {
  std::ostringstream out;
  write_graph(out, default_graph());
  std::istringstream in(out.str());
  EXPECT_EQ(parse_graph(in, "g"), default_graph());
}

TEST(NatureGraph, OverrideFileErrors) {
  std::istringstream cyclic("emo_pos\tneed_food_pos\t1\nneed_food_pos\temo_pos\t1\n");
  EXPECT_THROW(parse_graph(cyclic, "c"), CycleError);
  std::istringstream unknown("emo_pos\tneed_water\t1\n");
  try {
    parse_graph(unknown, "u");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream flag("# x\nemo_pos\tneed_food_pos\tyes\n");
  try {
    parse_graph(flag, "f");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(NatureGraph, RandomGraphsAgreeWithOracleOnAcyclicity) {
  std::mt19937 rng(11);
  int cyclic = 0;
  for (int round = 0; round < 300; ++round) {
    NatureGraph g;
    std::vector<std::pair<int, int>> arcs;
    for (int k = 0; k < 14; ++k) {
      int a = static_cast<int>(rng() % kNodeCount), b = static_cast<int>(rng() % kNodeCount);
      if (a == b || g.has_edge(kAllNodes[a], kAllNodes[b])) continue;
      g.add_edge({kAllNodes[a], kAllNodes[b], true});
      arcs.emplace_back(a, b);
    }
    bool oracle_acyclic = !oracle::topological_order(kNodeCount, arcs).empty();
    auto v = validate_graph(g);
    ASSERT_EQ(v.status == GraphValidation::Status::cycle, !oracle_acyclic);
    cyclic += !oracle_acyclic;
  }
  EXPECT_GT(cyclic, 0);
}
