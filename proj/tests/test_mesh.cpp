#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nssubdiv/localmatrix.hpp"
#include "nssubdiv/mesh.hpp"

using namespace nssubdiv;
using namespace nssubdiv::mesh;

namespace {

double signed_volume(const QuadMesh& m) {
    double vol = 0.0;
    for (const auto& f : m.faces()) {
        for (size_t i = 1; i + 1 < f.size(); ++i) {
            const Vec3& a = m.vertices()[static_cast<size_t>(f[0])];
            const Vec3& b = m.vertices()[static_cast<size_t>(f[i])];
            const Vec3& c = m.vertices()[static_cast<size_t>(f[i + 1])];
            vol += a.dot(b.cross(c)) / 6.0;
        }
    }
    return vol;
}

bool has_issue(const ValidationReport& r, const std::string& kind) {
    for (const auto& issue : r.issues) {
        if (issue.kind == kind) return true;
    }
    return false;
}

} // namespace

TEST_CASE("obj loading") {
    SUBCASE("unit cube") {
        std::istringstream obj(
            "v -1 -1 -1\nv 1 -1 -1\nv 1 1 -1\nv -1 1 -1\n"
            "v -1 -1 1\nv 1 -1 1\nv 1 1 1\nv -1 1 1\n"
            "f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n");
        const QuadMesh m = load_obj(obj);
        CHECK(m.n_vertices() == 8);
        CHECK(m.n_faces() == 6);
        const auto cls = classify_elements(m);
        CHECK(cls.extraordinary_faces.empty());
        CHECK(cls.extraordinary_vertices.size() == 8);
        for (int v : cls.extraordinary_vertices) CHECK(cls.vertex_valence[static_cast<size_t>(v)] == 3);
    }
    SUBCASE("single quad") {
        std::istringstream obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
        const QuadMesh m = load_obj(obj);
        CHECK(m.n_faces() == 1);
        CHECK(m.has_boundary());
        int boundary = 0;
        for (const auto& he : m.halfedges()) {
            if (he.twin == -1) ++boundary;
        }
        CHECK(boundary == 4);
    }
    SUBCASE("two quads sharing one edge") {
        std::istringstream obj(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 2 0 0\nv 2 1 0\n"
            "f 1 2 3 4\nf 2 5 6 3\n");
        const QuadMesh m = load_obj(obj);
        int inner = 0, boundary = 0;
        for (const auto& he : m.halfedges()) {
            if (he.twin >= 0) ++inner;
            else ++boundary;
        }
        CHECK(inner == 2); // the shared edge, once from each side
        CHECK(boundary == 6);
    }
    SUBCASE("flipped faces are reoriented") {
        std::istringstream obj(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 2 0 0\nv 2 1 0\n"
            "f 1 2 3 4\nf 2 3 6 5\n");
        const QuadMesh m = load_obj(obj);
        CHECK(validate_manifold(m).ok());
        CHECK(m.connectivity_clean());
    }
}

TEST_CASE("validation reports") {
    SUBCASE("cube is clean") {
        CHECK(validate_manifold(make_cube()).ok());
    }
    SUBCASE("three quads on one edge") {
        std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                            {1, -1, 0}, {0, -1, 0}, {1, 0, 1}, {0, 0, 1}};
        std::vector<std::vector<int>> f{{0, 1, 2, 3}, {0, 1, 4, 5}, {0, 1, 6, 7}};
        const auto rep = validate_manifold(QuadMesh::build(v, f));
        CHECK(has_issue(rep, "NonManifoldEdge"));
    }
    SUBCASE("repeated vertex index") {
        std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
        std::vector<std::vector<int>> f{{0, 1, 1, 2}};
        CHECK(has_issue(validate_manifold(QuadMesh::build(v, f)), "DegenerateFace"));
    }
    SUBCASE("bowtie vertex") {
        std::vector<Vec3> v{{0, 0, 0},  {1, 0, 0},  {1, 1, 0},  {0, 1, 0},
                            {-1, 0, 0}, {-1, -1, 0}, {0, -1, 0}};
        std::vector<std::vector<int>> f{{0, 1, 2, 3}, {0, 4, 5, 6}};
        CHECK(has_issue(validate_manifold(QuadMesh::build(v, f)), "NonManifoldVertex"));
    }
}

TEST_CASE("classification") {
    SUBCASE("regular torus") {
        const auto cls = classify_elements(make_torus_grid(8, 8));
        CHECK(cls.regular());
    }
    SUBCASE("pentagonal pole faces") {
        const QuadMesh m = make_face_pillow(5, 5);
        const auto cls = classify_elements(m);
        CHECK(cls.extraordinary_vertices.empty());
        // Two pentagons at the poles; the rim carries the topologically
        // required triangles, far from both poles.
        int pentagons = 0, triangles = 0;
        for (int f : cls.extraordinary_faces) {
            if (cls.face_valence[static_cast<size_t>(f)] == 5) ++pentagons;
            if (cls.face_valence[static_cast<size_t>(f)] == 3) ++triangles;
        }
        CHECK(pentagons == 2);
        CHECK(triangles == 10);
        CHECK(cls.extraordinary_faces.size() == 12);
    }
    SUBCASE("pillow meshes are closed and outward") {
        for (const QuadMesh& m : {make_vertex_pillow(5, 6), make_face_pillow(5, 5)}) {
            CHECK(validate_manifold(m).ok());
            CHECK_FALSE(m.has_boundary());
            int chi = 0;
            REQUIRE(m.euler_characteristic(&chi));
            CHECK(chi == 2);
            CHECK(signed_volume(m) > 0.0);
        }
    }
}

TEST_CASE("dual topologic refinement") {
    SUBCASE("cube counts") {
        const QuadMesh m = make_cube();
        const auto t = refine_topology_dual(m);
        CHECK(t.n_new_vertices == 24);
        CHECK(t.f_faces == 6);
        CHECK(t.e_faces == 12);
        CHECK(t.v_faces == 8);
        CHECK(static_cast<int>(t.faces.size()) == 26);
    }
    SUBCASE("refined cube is a clean closed mesh") {
        QuadMesh m = make_cube();
        const double vol0 = signed_volume(m);
        CHECK(vol0 > 0);
        for (int k = 1; k <= 3; ++k) {
            m = refine_dual(m, schemes::doo_sabin(), k);
            CHECK(validate_manifold(m).ok());
            int chi = 0;
            REQUIRE(m.euler_characteristic(&chi));
            CHECK(chi == 2);
            CHECK(signed_volume(m) > 0);
        }
    }
    SUBCASE("regular torus stays regular") {
        const QuadMesh m = refine_dual(make_torus_grid(6, 6), schemes::doo_sabin(), 1);
        CHECK(classify_elements(m).regular());
        int chi = 0;
        REQUIRE(m.euler_characteristic(&chi));
        CHECK(chi == 0);
    }
    SUBCASE("extraordinary faces persist in number and valence") {
        QuadMesh m = make_face_pillow(5, 5);
        const auto count = [](const ElementClassification& cls, int q) {
            int c = 0;
            for (int f : cls.extraordinary_faces) {
                if (cls.face_valence[static_cast<size_t>(f)] == q) ++c;
            }
            return c;
        };
        const int tri0 = count(classify_elements(m), 3);
        const auto s = schemes::trig_doo_sabin(1.0);
        for (int k = 1; k <= 3; ++k) {
            m = refine_dual(m, s, k);
            const auto cls = classify_elements(m);
            CHECK(count(cls, 5) == 2);
            CHECK(count(cls, 3) == tri0);
            CHECK(cls.extraordinary_vertices.empty());
        }
    }
    SUBCASE("an extraordinary vertex becomes an extraordinary face") {
        const QuadMesh before = make_vertex_pillow(5, 5);
        const QuadMesh m = refine_dual(before, schemes::doo_sabin(), 1);
        const auto cls = classify_elements(m);
        CHECK(cls.extraordinary_vertices.empty());
        int pentagons = 0;
        for (int f : cls.extraordinary_faces) {
            if (cls.face_valence[static_cast<size_t>(f)] == 5) ++pentagons;
        }
        CHECK(pentagons == 2);
    }
    SUBCASE("boundary is rejected") {
        std::istringstream obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
        const QuadMesh m = load_obj(obj);
        CHECK_THROWS_WITH_AS((void)refine_topology_dual(m),
                             doctest::Contains("BoundaryUnsupported"), SubdivError);
    }
}

TEST_CASE("primal topologic refinement") {
    SUBCASE("cube counts") {
        const auto t = refine_topology_primal(make_cube());
        CHECK(t.n_new_vertices == 26); // 6 + 12 + 8
        CHECK(static_cast<int>(t.faces.size()) == 24);
    }
    SUBCASE("refined cube is clean and all-quad") {
        QuadMesh m = make_cube();
        for (int k = 1; k <= 2; ++k) {
            m = refine_primal(m, schemes::catmull_clark(), k);
            CHECK(validate_manifold(m).ok());
            for (const auto& f : m.faces()) CHECK(f.size() == 4);
            int chi = 0;
            REQUIRE(m.euler_characteristic(&chi));
            CHECK(chi == 2);
            CHECK(signed_volume(m) > 0);
        }
    }
    SUBCASE("valence-5 vertex persists over three refinements") {
        QuadMesh m = make_vertex_pillow(5, 4);
        const auto s = schemes::exp_catmull_clark_real(3.0);
        for (int k = 1; k <= 3; ++k) {
            m = refine_primal(m, s, k);
            int poles = 0;
            for (int v = 0; v < m.n_vertices(); ++v) {
                if (m.vertex_valence(v) == 5) ++poles;
            }
            CHECK(poles == 2);
        }
    }
    SUBCASE("non-quad faces are rejected") {
        const QuadMesh m = make_face_pillow(5, 4);
        CHECK_THROWS_WITH_AS((void)refine_topology_primal(m), doctest::Contains("NonQuadFace"),
                             SubdivError);
    }
}

TEST_CASE("obj round trip is exact") {
    QuadMesh m = refine_dual(make_cube(), schemes::trig_doo_sabin(0.7), 1);
    std::ostringstream out;
    save_obj(m, out);
    std::istringstream in(out.str());
    const QuadMesh back = load_obj(in);
    REQUIRE(back.n_vertices() == m.n_vertices());
    REQUIRE(back.n_faces() == m.n_faces());
    for (int v = 0; v < m.n_vertices(); ++v) {
        CHECK(back.vertices()[static_cast<size_t>(v)] == m.vertices()[static_cast<size_t>(v)]);
    }
    for (int f = 0; f < m.n_faces(); ++f) {
        CHECK(back.faces()[static_cast<size_t>(f)] == m.faces()[static_cast<size_t>(f)]);
    }
}

TEST_CASE("local neighborhood extraction") {
    SUBCASE("face patch size") {
        const QuadMesh m = make_face_pillow(5, 6);
        const int pole = classify_elements(m).extraordinary_faces[0];
        const auto patch = extract_local_neighborhood(m, schemes::SchemeKind::Dual, pole);
        CHECK(patch.n == 5);
        CHECK(patch.d.rows() == 20);
        // Rows reference distinct vertices.
        std::set<int> seen(patch.row_vertex.begin(), patch.row_vertex.end());
        CHECK(seen.size() == 20);
    }
    SUBCASE("vertex patch size") {
        const QuadMesh m = make_vertex_pillow(5, 6);
        const int pole = classify_elements(m).extraordinary_vertices[0];
        const auto patch = extract_local_neighborhood(m, schemes::SchemeKind::Primal, pole);
        CHECK(patch.n == 5);
        CHECK(patch.d.rows() == 35);
        std::set<int> seen(patch.row_vertex.begin(), patch.row_vertex.end());
        CHECK(seen.size() == 31); // 30 distinct + replicated center
        for (int i = 0; i < 5; ++i) CHECK(patch.row_vertex[static_cast<size_t>(7 * i)] == pole);
    }
    SUBCASE("regular vertex is extractable") {
        const QuadMesh m = make_torus_grid(12, 12);
        const auto patch = extract_local_neighborhood(m, schemes::SchemeKind::Primal, 5 * 12 + 5);
        CHECK(patch.n == 4);
        CHECK(patch.d.rows() == 28);
    }
    SUBCASE("a nearby extraordinary element is rejected") {
        const QuadMesh m = make_vertex_pillow(5, 2); // poles only two rings apart
        const int pole = classify_elements(m).extraordinary_vertices[0];
        CHECK_THROWS_WITH_AS(
            (void)extract_local_neighborhood(m, schemes::SchemeKind::Primal, pole),
            doctest::Contains("InsufficientRegularCollar"), SubdivError);
    }
}

TEST_CASE("local matrix application matches mesh refinement") {
    // S_k applied to the extracted control vector must reproduce, row by row,
    // the refined mesh positions around the extraordinary element.
    SUBCASE("dual schemes") {
        for (const auto& s : {schemes::doo_sabin(), schemes::trig_doo_sabin(1.0)}) {
            for (int n : {3, 5, 7}) {
                CAPTURE(s.id());
                CAPTURE(n);
                const QuadMesh m = make_face_pillow(n, 6);
                const int pole = classify_elements(m).extraordinary_faces[0];
                const auto patch = extract_local_neighborhood(m, schemes::SchemeKind::Dual, pole);
                for (int k = 1; k <= 2; ++k) {
                    const auto S = localmatrix::local_matrix(s, k, n);
                    const Eigen::MatrixXd predicted = S.dense() * patch.d;

                    const QuadMesh fine = refine_dual(m, s, k);
                    // The F-face of the pole keeps its index and its corner 0
                    // is the image of the coarse corner 0.
                    const auto fine_patch =
                        extract_local_neighborhood(fine, schemes::SchemeKind::Dual, pole);
                    CHECK((fine_patch.d - predicted).cwiseAbs().maxCoeff() <
                          1e-13 * std::max(1.0, patch.d.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
    SUBCASE("primal schemes") {
        for (const auto& s : {schemes::catmull_clark(), schemes::exp_catmull_clark_real(3.0),
                              schemes::exp_catmull_clark_imag(10.0)}) {
            for (int n : {3, 5, 6}) {
                CAPTURE(s.id());
                CAPTURE(n);
                const QuadMesh m = make_vertex_pillow(n, 7);
                const int pole = classify_elements(m).extraordinary_vertices[0];
                const auto patch =
                    extract_local_neighborhood(m, schemes::SchemeKind::Primal, pole);
                for (int k = 1; k <= 2; ++k) {
                    const auto S = localmatrix::local_matrix(s, k, n);
                    const Eigen::MatrixXd predicted = S.dense() * patch.d;

                    const auto topo = refine_topology_primal(m);
                    const QuadMesh fine = refine_primal(m, s, k);
                    const int pole_fine = topo.vertex_point(pole);
                    // Anchor the fine extraction at the image of spoke 0.
                    const int e0 = patch.row_vertex[1];
                    const int anchor = topo.edge_point(pole, e0);
                    const auto fine_patch = extract_local_neighborhood(
                        fine, schemes::SchemeKind::Primal, pole_fine, 4, anchor);
                    CHECK((fine_patch.d - predicted).cwiseAbs().maxCoeff() <
                          1e-13 * std::max(1.0, patch.d.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("dual of the dual torus is still regular") {
    const QuadMesh m = dual_mesh(make_torus_grid(6, 8));
    CHECK(classify_elements(m).regular());
    CHECK(validate_manifold(m).ok());
}
