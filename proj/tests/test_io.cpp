#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"
#include "qcomb/io.hpp"
#include "qcomb/mbqc.hpp"
#include "support.hpp"

using namespace qcomb;

TEST(Io, QuantumCombRoundTrip) {
    const auto c = build_D_calibr(2).blocks[1];
    const auto back = io::comb_from_json(io::parse(io::to_json(c).dump()));
    EXPECT_EQ(back.structure, c.structure);
    EXPECT_EQ(back.op.layout, c.op.layout);
    EXPECT_LT(max_abs_diff(back.op, c.op), 1e-15);
}

TEST(Io, ClassicalCqRoundTrip) {
    const auto mi = support::random_micro_instance(3);
    const auto back = io::classical_cq_from_json(io::to_json(mi.cq));
    ASSERT_EQ(back.blocks.size(), mi.cq.blocks.size());
    EXPECT_EQ(back.x_names, mi.cq.x_names);
    for (std::size_t x = 0; x < back.blocks.size(); ++x) {
        EXPECT_DOUBLE_EQ(back.prior[x], mi.cq.prior[x]);
        EXPECT_LT((back.blocks[x].diag - mi.cq.blocks[x].diag).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_TRUE(std::holds_alternative<ClassicalCqComb>(io::any_from_json(io::to_json(mi.cq))));
}

TEST(Io, QuantumCqRoundTripThroughAFile) {
    const auto cq = support::as_quantum(support::random_micro_instance(5).cq);
    const auto path = (std::filesystem::temp_directory_path() / "qcomb_io_test.json").string();
    io::write_file(path, io::to_json(cq));
    const auto back = io::any_from_json(io::read_file(path));
    std::remove(path.c_str());
    ASSERT_TRUE(std::holds_alternative<ClassicalQuantumComb>(back));
    const auto& q = std::get<ClassicalQuantumComb>(back);
    ASSERT_EQ(q.blocks.size(), cq.blocks.size());
    EXPECT_LT(max_abs_diff(q.blocks[2].op, cq.blocks[2].op), 1e-15);
}

TEST(Io, GraphAndGflowRoundTrip) {
    auto g = fixtures::four_qubit_graph();
    g.planes = {{1, Plane::XY}, {2, Plane::YZ}};
    const auto gb = io::graph_from_json(io::to_json(g));
    EXPECT_EQ(gb.n, g.n);
    EXPECT_EQ(gb.edges, g.edges);
    EXPECT_EQ(gb.inputs, g.inputs);
    EXPECT_EQ(gb.outputs, g.outputs);
    EXPECT_EQ(gb.planes, g.planes);
    for (const auto& f : fixtures::four_qubit_catalogue()) EXPECT_EQ(io::gflow_from_json(io::to_json(f)), f);
}

TEST(Io, MalformedInputIsInvalid) {
    EXPECT_THROW(io::parse("{\"kind\": "), InvalidInput);
    EXPECT_THROW(io::any_from_json(io::parse("{\"kind\": \"teapot\"}")), InvalidInput);
    EXPECT_THROW(io::comb_from_json(io::parse("{\"kind\": \"quantum\", \"layout\": []}")), InvalidInput);
    EXPECT_THROW(io::read_file("/nonexistent/qcomb.json"), InvalidInput);
}
