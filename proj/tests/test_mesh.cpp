#include <gtest/gtest.h>

#include <sstream>

#include "ipmuq/mesh/boundary.hpp"
#include "ipmuq/mesh/mesh.hpp"

using namespace ipmuq;

namespace {

const char* kUnitSquare = R"(% unit square, two triangles
NDIME= 2
NPOIN= 4
0 0
1 0
1 1
0 1
NELEM= 2
0 1 2
0 2 3
NMARK= 1
MARKER_TAG= wall
MARKER_ELEMS= 4
0 1
1 2
2 3
3 0
)";

}  // namespace

TEST(Mesh1D, Geometry) {
    const auto mesh = make_mesh_1d(-1.0, 3.0, 8);
    EXPECT_EQ(mesh.cells(), 8);
    EXPECT_DOUBLE_EQ(mesh.volume[0], 0.5);
    EXPECT_DOUBLE_EQ(mesh.centroid[2].x(), -1.0 + 2.5 * 0.5);
    EXPECT_EQ(mesh.faces.size(), 9u);
    EXPECT_EQ(mesh.faces.front().tag, mesh.tag_index("left"));
    EXPECT_EQ(mesh.faces.back().tag, mesh.tag_index("right"));
    EXPECT_LT(closure_defect(mesh), 1e-15);
    const auto periodic = make_mesh_1d(0.0, 1.0, 5, true);
    EXPECT_EQ(periodic.faces.size(), 5u);
    for (const auto& f : periodic.faces) EXPECT_FALSE(f.boundary());
    for (const auto& faces : periodic.cell_faces) EXPECT_EQ(faces.size(), 2u);
}

TEST(Mesh2D, UnitSquare) {
    std::istringstream in(kUnitSquare);
    const auto mesh = read_mesh(in);
    EXPECT_EQ(mesh.cells(), 2);
    EXPECT_EQ(mesh.faces.size(), 5u);
    EXPECT_DOUBLE_EQ(mesh.volume[0], 0.5);
    EXPECT_DOUBLE_EQ(mesh.volume[1], 0.5);
    EXPECT_LT(closure_defect(mesh), 1e-15);
    int interior = 0;
    for (const auto& f : mesh.faces) interior += f.boundary() ? 0 : 1;
    EXPECT_EQ(interior, 1);
}

TEST(Mesh2D, ClockwiseTriangleIsReoriented) {
    const auto mesh = build_triangle_mesh({Point2(0, 0), Point2(1, 0), Point2(0, 1)}, {{0, 2, 1}},
                                          {{"b", {{{0, 1}}, {{1, 2}}, {{2, 0}}}}});
    EXPECT_DOUBLE_EQ(mesh.volume[0], 0.5);
    for (const auto& f : mesh.faces) EXPECT_GT(f.normal.dot(f.midpoint - mesh.centroid[0]), 0.0);
}

TEST(Mesh2D, StructuredSplitCounts) {
    RectangleSpec spec;
    spec.nx = 2;
    spec.ny = 4;
    const auto mesh = generate_rectangle(spec);
    ASSERT_EQ(mesh.cells(), 16);
    int boundary = 0, interior = 0;
    for (const auto& f : mesh.faces) (f.boundary() ? boundary : interior)++;
    // Every triangle has three edges; interior edges are counted twice.
    EXPECT_EQ(boundary, 2 * (spec.nx + spec.ny));
    EXPECT_EQ(interior, (3 * 16 - boundary) / 2);
    EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-14);
    EXPECT_LT(closure_defect(mesh), 1e-14);
}

TEST(Mesh2D, RoundTripIsExact) {
    RectangleSpec spec{0.0, 3.0, 0.0, 1.0, 12, 5, 0.1, 1.0, 2.0, {"wall", "farfield", "farfield", "farfield"}};
    const auto mesh = generate_rectangle(spec);
    std::stringstream buffer;
    write_mesh(buffer, mesh);
    const auto back = read_mesh(buffer);
    ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
    EXPECT_EQ(back.triangles, mesh.triangles);
    EXPECT_EQ(back.tags, mesh.tags);
    EXPECT_EQ(mesh_hash(back), mesh_hash(mesh));
    ASSERT_EQ(back.faces.size(), mesh.faces.size());
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        EXPECT_EQ(back.faces[i].normal, mesh.faces[i].normal);
        EXPECT_EQ(back.faces[i].tag, mesh.faces[i].tag);
    }
}

TEST(Mesh2D, ValidationErrorsCarryLineNumbers) {
    std::string degenerate = kUnitSquare;
    degenerate.replace(degenerate.find("0 2 3"), 5, "0 2 0");
    std::istringstream in(degenerate);
    try {
        read_mesh(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 10);
    }
    std::istringstream truncated("NDIME= 2\nNPOIN= 3\n0 0\n1 0\n");
    EXPECT_THROW(read_mesh(truncated), ParseError);
    std::istringstream garbage("NDIME= 2\nNPOIN= 1\n0 zero\n");
    try {
        read_mesh(garbage);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3);
    }
    // A fan of three triangles on one edge is not a manifold.
    EXPECT_THROW(build_triangle_mesh({Point2(0, 0), Point2(1, 0), Point2(0, 1), Point2(0, -1), Point2(1, 1)}, {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}, {}),
                 ParseError);
    EXPECT_THROW(load_mesh("/nonexistent/mesh.su2"), ConfigError);
}

TEST(Boundary, GhostStates) {
    using S = Eigen::Vector4d;
    const S u(1.0, 2.0, 0.0, 5.0);
    const S far(0.5, 0.1, 0.2, 3.0);
    const S parallel = ghost_state<4>(u, BoundaryKind::slip, Normal(1, 0), far);
    EXPECT_EQ(parallel, S(1.0, -2.0, 0.0, 5.0));
    const S tangential = ghost_state<4>(u, BoundaryKind::slip, Normal(0, 1), far);
    EXPECT_EQ(tangential, u);
    const Normal n(0.6, 0.8);
    const S oblique = ghost_state<4>(u, BoundaryKind::slip, n, far);
    EXPECT_NEAR((oblique.segment<2>(1) + u.segment<2>(1)).dot(n), 0.0, 1e-15);
    EXPECT_EQ(ghost_state<4>(u, BoundaryKind::dirichlet, n, far), far);
    EXPECT_EQ(ghost_state<4>(u, BoundaryKind::outflow, n, far), u);
}

TEST(Norms, DiscreteL2) {
    RectangleSpec spec;
    spec.x1 = 2.0;
    spec.nx = 4;
    spec.ny = 3;
    const auto mesh = generate_rectangle(spec);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(mesh.cells(), 3.0);
    EXPECT_NEAR(discrete_l2(c, mesh), 3.0 * std::sqrt(2.0), 1e-14);
    EXPECT_THROW(discrete_l2(c, mesh, MaskBox{10, 11, 10, 11}), DomainError);
    const double half = discrete_l2(c, mesh, MaskBox{0.0, 1.0, 0.0, 1.0});
    EXPECT_NEAR(half, 3.0, 1e-14);
    EXPECT_THROW(relative_l2_error(c, Eigen::VectorXd::Zero(mesh.cells()), mesh), DomainError);
    EXPECT_NEAR(relative_l2_error(1.1 * c, c, mesh), 0.1, 1e-14);
}
