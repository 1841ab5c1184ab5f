#include <gtest/gtest.h>

#include <algorithm>

#include "flexdo/dag.hpp"
#include "test_support.hpp"

using namespace flexdo;
using flexdo::testing::build_dag;

namespace {

DagApp chain3() { return build_dag({0, 5, 0}, {{0, 1, 10}, {1, 2, 10}}); }

DagApp diamond() {
    return build_dag({0, 1, 1, 0}, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}});
}

}  // namespace

TEST(Validate, ChainIsValid) {
    EXPECT_TRUE(validate(chain3()).ok());
}

TEST(Validate, BackEdgeIsACycle) {
    auto dag = build_dag({0, 5, 0}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
    auto report = validate(dag);
    EXPECT_TRUE(report.contains(ViolationKind::kCycle));
    EXPECT_NE(report.describe().find("cycle"), std::string::npos);
}

TEST(Validate, TwoIsolatedChains) {
    auto dag = build_dag({0, 1, 1, 0}, {{0, 1, 1}, {2, 3, 1}});
    auto report = validate(dag);
    EXPECT_TRUE(report.contains(ViolationKind::kDisconnected));
    EXPECT_TRUE(report.contains(ViolationKind::kMultipleSources));
    EXPECT_NE(report.describe().find("disconnected"), std::string::npos);
    EXPECT_NE(report.describe().find("multiple sources"), std::string::npos);
}

TEST(Validate, DuplicateAndNegativeEdges) {
    auto dag = build_dag({0, 1, 0}, {{0, 1, 1}, {0, 1, 2}, {1, 2, -3}});
    auto report = validate(dag);
    EXPECT_TRUE(report.contains(ViolationKind::kDuplicateEdge));
    EXPECT_TRUE(report.contains(ViolationKind::kNegativePayload));
}

TEST(Validate, SelfLoopAndDanglingEdge) {
    auto dag = build_dag({0, 1, 0}, {{0, 1, 1}, {1, 1, 1}, {1, 2, 1}, {1, 9, 1}});
    auto report = validate(dag);
    EXPECT_TRUE(report.contains(ViolationKind::kSelfLoop));
    EXPECT_TRUE(report.contains(ViolationKind::kDanglingEdge));
}

TEST(Validate, ZeroWorkOnlyForTerminals) {
    auto dag = build_dag({0, 0, 0}, {{0, 1, 1}, {1, 2, 1}});
    EXPECT_TRUE(validate(dag).contains(ViolationKind::kZeroWork));
    auto neg = build_dag({0, -1, 0}, {{0, 1, 1}, {1, 2, 1}});
    EXPECT_TRUE(validate(neg).contains(ViolationKind::kNegativeWork));
}

TEST(Validate, MultipleSinks) {
    auto dag = build_dag({0, 1, 1, 0}, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}});
    EXPECT_TRUE(validate(dag).contains(ViolationKind::kMultipleSinks));
}

TEST(Validate, TerminalsMustBeFirstAndLast) {
    std::vector<Task> tasks{{0, 0, 0}, {1, 1, 0}, {2, 0, 0}};
    DagApp dag(tasks, {{2, 1, 1}, {1, 0, 1}}, 2, 0);
    EXPECT_TRUE(validate(dag).contains(ViolationKind::kTerminalMismatch));
}

TEST(Validate, RequireValidThrows) {
    auto dag = build_dag({0, 5, 0}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
    EXPECT_THROW(require_valid(dag), std::invalid_argument);
    EXPECT_NO_THROW(require_valid(chain3()));
}

TEST(Anchors, Chain) {
    auto a = anchors(chain3());
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0], (Edge{0, 1, 10}));
    EXPECT_EQ(a[1], (Edge{1, 2, 10}));
}

TEST(Anchors, DiamondIsAllAnchors) {
    EXPECT_EQ(anchors(diamond()).size(), 4u);
}

TEST(Anchors, CountIsTerminalDegree) {
    auto dag = flexdo::testing::worked_example_dag();
    auto a = anchors(dag);
    EXPECT_EQ(a.size(), dag.out_edges(dag.initial()).size() + dag.in_edges(dag.ending()).size());
    for (const auto& e : a) EXPECT_TRUE(e.src == dag.initial() || e.dst == dag.ending());
}

TEST(Anchors, InvalidDagThrows) {
    auto dag = build_dag({0, 1, 1, 0}, {{0, 1, 1}, {2, 3, 1}});
    EXPECT_THROW(anchors(dag), std::invalid_argument);
}

TEST(Topology, OrderRespectsEdges) {
    auto dag = flexdo::testing::worked_example_dag();
    auto order = topological_order(dag);
    ASSERT_EQ(order.size(), dag.task_count());
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& e : dag.edges()) EXPECT_LT(pos[e.src], pos[e.dst]);
}

TEST(Augment, SourcesAndSinksGetOneEdgeEach) {
    RawGraph raw;
    for (TaskId i = 0; i < 5; ++i) raw.tasks.push_back({i, 1.0, 100});
    // sources 0, 1; sinks 2, 3, 4
    raw.edges = {{0, 2, 5}, {0, 3, 5}, {1, 3, 5}, {1, 4, 5}};
    auto dag = augment_with_terminals(raw, 7, uniform_up_to_memory());
    EXPECT_EQ(dag.edges().size(), raw.edges.size() + 5);
    EXPECT_EQ(dag.task_count(), 7u);
    EXPECT_EQ(dag.tasks().front().work, 0.0);
    EXPECT_EQ(dag.tasks().back().work, 0.0);
    EXPECT_TRUE(validate(dag).ok());
    for (const auto& e : anchors(dag)) {
        EXPECT_GE(e.data_bytes, 1);
        EXPECT_LE(e.data_bytes, 100);
    }
}

TEST(Augment, SingleTaskBecomesChain) {
    RawGraph raw{{{0, 3.0, 10}}, {}};
    auto dag = augment_with_terminals(raw, 1, constant_payload(4));
    ASSERT_EQ(dag.edges().size(), 2u);
    EXPECT_EQ(dag.edges()[0], (Edge{0, 1, 4}));
    EXPECT_EQ(dag.edges()[1], (Edge{1, 2, 4}));
}

TEST(Augment, RejectsCycle) {
    RawGraph raw{{{0, 1, 1}, {1, 1, 1}}, {{0, 1, 1}, {1, 0, 1}}};
    EXPECT_THROW(augment_with_terminals(raw, 1, constant_payload(1)), std::invalid_argument);
}

TEST(Augment, GeneratedRawGraphsValidate) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenParams p;
        p.seed = seed;
        auto raw = generate_raw_graph(p);
        auto dag = augment_with_terminals(raw, seed, uniform_up_to_memory());
        EXPECT_TRUE(validate(dag).ok()) << validate(dag).describe();
    }
}

TEST(Decision, FromMaskKeepsTerminalsLocal) {
    auto dag = diamond();
    auto d = OffloadDecision::from_mask(dag, 0b11);
    EXPECT_EQ(d.to_string(), "0110");
    EXPECT_EQ(d.offloaded_count(), 2u);
    EXPECT_NO_THROW(require_valid(dag, d));
    d.set(0, true);
    EXPECT_THROW(require_valid(dag, d), std::invalid_argument);
    EXPECT_THROW(require_valid(dag, OffloadDecision(3)), std::invalid_argument);
}

TEST(OneClimb, ChainPatterns) {
    auto dag = build_dag({0, 1, 1, 1, 0}, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}});
    EXPECT_TRUE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 0, 0, 0, 0})));
    EXPECT_TRUE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 1, 1, 0, 0})));
    EXPECT_FALSE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 1, 0, 1, 0})));
    // Offloading the middle task removes the violation.
    EXPECT_TRUE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 1, 1, 1, 0})));
}

TEST(OneClimb, ParallelBranchesAreIndependent) {
    // 1 and 2 are on different paths, so offloading 1 and keeping 2 local is fine.
    auto dag = diamond();
    EXPECT_TRUE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 1, 0, 0})));
}

TEST(OneClimb, PathThroughLongerRoute) {
    // 1 -> 2 -> 3 and 1 -> 3; 2 local between offloaded 1 and 3.
    auto dag = build_dag({0, 1, 1, 1, 0}, {{0, 1, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}, {3, 4, 1}});
    EXPECT_FALSE(one_climb_compliant(dag, OffloadDecision(std::vector<std::uint8_t>{0, 1, 0, 1, 0})));
}
