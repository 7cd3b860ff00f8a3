#pragma once

// 2-manifold quadrilateral meshes: half-edge connectivity, OBJ input/output,
// manifold validation, element classification, dual/primal topologic
// refinement with scheme-supplied geometric rules, and extraction of the
// ordered local neighborhood around an extraordinary element.

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "nssubdiv/errors.hpp"
#include "nssubdiv/schemes.hpp"

namespace nssubdiv::mesh {

using Vec3 = Eigen::Vector3d;

struct HalfEdge {
    int origin = -1;
    int face = -1;
    int next = -1;
    int twin = -1; // -1 boundary, -2 non-manifold or orientation conflict
};

class QuadMesh {
public:
    // Construction is tolerant: connectivity defects are recorded and can be
    // inspected through validate_manifold; only out-of-range indices throw.
    static QuadMesh build(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::vector<int>>& faces() const { return faces_; }
    const std::vector<HalfEdge>& halfedges() const { return halfedges_; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_faces() const { return static_cast<int>(faces_.size()); }
    int n_edges() const { return n_edges_; }

    int face_halfedge(int f) const { return face_he_[static_cast<size_t>(f)]; }
    int vertex_halfedge(int v) const { return vertex_he_[static_cast<size_t>(v)]; }
    int halfedge_between(int a, int b) const; // -1 when absent

    const HalfEdge& he(int i) const { return halfedges_[static_cast<size_t>(i)]; }
    int dest(int i) const { return he(he(i).next).origin; }
    int prev(int i) const;

    int vertex_valence(int v) const;
    bool has_boundary() const { return has_boundary_; }
    bool connectivity_clean() const { return connectivity_clean_; }

    bool euler_characteristic(int* out) const; // false when edges are broken

private:
    std::vector<Vec3> vertices_;
    std::vector<std::vector<int>> faces_;
    std::vector<HalfEdge> halfedges_;
    std::vector<int> face_he_;
    std::vector<int> vertex_he_;
    std::vector<int> valence_;
    std::unordered_map<long long, int> directed_;
    int n_edges_ = 0;
    bool has_boundary_ = false;
    bool connectivity_clean_ = true;
};

struct ValidationIssue {
    std::string kind; // NonManifoldEdge, InconsistentOrientation, DegenerateFace,
                      // NonManifoldVertex, IsolatedVertex
    std::vector<int> indices;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

ValidationReport validate_manifold(const QuadMesh& m);

struct ElementClassification {
    std::vector<int> vertex_valence;
    std::vector<int> face_valence;
    std::vector<int> extraordinary_vertices;
    std::vector<int> extraordinary_faces;
    bool regular() const { return extraordinary_vertices.empty() && extraordinary_faces.empty(); }
};

ElementClassification classify_elements(const QuadMesh& m);

// Wavefront OBJ, `v x y z` and 1-based `f` records. load_obj errors on
// non-manifold edges and unfixable orientation; orientation is otherwise made
// consistent by flipping faces.
QuadMesh load_obj(std::istream& in);
QuadMesh load_obj_file(const std::string& path);
void save_obj(const QuadMesh& m, std::ostream& out); // %.17g coordinates
void save_obj_file(const QuadMesh& m, const std::string& path);

QuadMesh orient_consistently(const QuadMesh& m);

// Topologic refinements. Both require a closed 2-manifold; the primal one
// additionally requires all-quad faces.
struct DualTopology {
    std::vector<int> corner_offset;      // new vertex (f, j) = corner_offset[f] + j
    std::vector<std::vector<int>> faces; // F-faces, then E-faces, then V-faces
    int n_new_vertices = 0;
    int f_faces = 0, e_faces = 0, v_faces = 0;
};

DualTopology refine_topology_dual(const QuadMesh& m);

struct PrimalTopology {
    // New vertex ids: face point f -> f, edge point e -> F + e, vertex point
    // v -> F + E + v, with the edge numbering exposed below.
    std::vector<std::array<int, 2>> edges;     // undirected, (min, max)
    std::unordered_map<long long, int> edge_id;
    std::vector<std::vector<int>> faces;       // all quads
    int n_new_vertices = 0;
    int face_point(int f) const { return f; }
    int edge_point(int a, int b) const;
    int vertex_point(int v) const { return vertex_offset + v; }
    int face_count = 0, edge_count = 0, vertex_offset = 0;
};

PrimalTopology refine_topology_primal(const QuadMesh& m);

// One geometric refinement step at level k. `normalized` multiplies the new
// positions by the level's normalization factor.
QuadMesh refine_dual(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k,
                     bool normalized = false);
QuadMesh refine_primal(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k,
                       bool normalized = false);
QuadMesh refine(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k,
                bool normalized = false);

// Ordered two-axis grids of mesh vertex ids around an extraordinary element,
// one quadrant per sector. Face case: slot (sector, a, b) holds the vertex at
// sector position (a + 1/2, b + 1/2), a,b in 0..R-1; the n corners of the
// extraordinary face are the (0,0) slots. Vertex case: slot (sector, a, b),
// a in 1..R, b in 0..R, holds the vertex at (a, b) with the center stored
// separately; the b axis of sector i coincides with the a axis of sector i+1.
struct SectorGridIds {
    bool dual = false;
    int n = 0;
    int R = 0;
    int center = -1;
    std::vector<int> ids;

    int& slot(int sector, int a, int b);
    int slot(int sector, int a, int b) const;
    // Resolves cross-sector wraps ((a,-c) of sector i is (c,a) of sector i-1)
    // and, for the vertex case, (0,0) to the center.
    int at(int sector, int a, int b) const;
    int slots_per_sector() const { return dual ? R * R : R * (R + 1); }

    // Normalizes quadrant coordinates into an owned slot; returns true when
    // the coordinates name the center of a vertex grid.
    static bool resolve(bool dual, int n, int& sector, int& a, int& b);
};

// The paper-ordered control vector around an extraordinary element plus the
// extended grid used for ring sampling. Vertex case rows are the folded
// vector: sector i contributes (center, e_i, d_i, w_i, g_i, k_i, m_i).
struct LocalPatch {
    schemes::SchemeKind kind = schemes::SchemeKind::Dual;
    int n = 0;
    int p = 0;
    Eigen::MatrixXd d;            // N x 3
    std::vector<int> row_vertex;  // row -> mesh vertex id
    SectorGridIds grid;
    int element = -1;             // face id (dual) or vertex id (primal)
};

// `anchor` fixes sector 0: the corner index within the face cycle (dual) or a
// neighbor vertex id (primal); -1 picks corner 0 / the smallest neighbor id.
LocalPatch extract_local_neighborhood(const QuadMesh& m, schemes::SchemeKind kind,
                                      int element, int rings = 4, int anchor = -1);

// Canonical closed test meshes: two quadrant-grid disks with `rings` rings
// glued along their boundary, giving exactly two extraordinary elements (the
// two poles). Vertex-centered for primal schemes, face-centered for dual.
QuadMesh make_vertex_pillow(int n, int rings, double height = 0.6);
QuadMesh make_face_pillow(int n, int rings, double height = 0.6);

// The dual mesh (face centroids become vertices).
QuadMesh dual_mesh(const QuadMesh& m);

QuadMesh make_cube();
QuadMesh make_torus_grid(int nu, int nv, double R = 2.0, double r = 0.8);

} // namespace nssubdiv::mesh
