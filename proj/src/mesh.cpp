#include "nssubdiv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nssubdiv::mesh {

namespace {

long long dkey(int a, int b) {
    return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

long long ukey(int a, int b) {
    return dkey(std::min(a, b), std::max(a, b));
}

} // namespace

QuadMesh QuadMesh::build(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces) {
    QuadMesh m;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);
    const int nv = m.n_vertices();
    for (const auto& f : m.faces_) {
        for (int v : f) {
            if (v < 0 || v >= nv) raise(ErrorCode::ParseError, "face index out of range");
        }
    }

    m.vertex_he_.assign(static_cast<size_t>(nv), -1);
    m.face_he_.reserve(m.faces_.size());
    for (size_t f = 0; f < m.faces_.size(); ++f) {
        const auto& cyc = m.faces_[f];
        const int q = static_cast<int>(cyc.size());
        const int base = static_cast<int>(m.halfedges_.size());
        m.face_he_.push_back(base);
        for (int i = 0; i < q; ++i) {
            HalfEdge he;
            he.origin = cyc[static_cast<size_t>(i)];
            he.face = static_cast<int>(f);
            he.next = base + (i + 1) % q;
            m.halfedges_.push_back(he);
            if (m.vertex_he_[static_cast<size_t>(he.origin)] < 0) {
                m.vertex_he_[static_cast<size_t>(he.origin)] = base + i;
            }
        }
    }

    std::unordered_map<long long, std::vector<int>> undirected;
    for (int h = 0; h < static_cast<int>(m.halfedges_.size()); ++h) {
        const int a = m.halfedges_[static_cast<size_t>(h)].origin;
        const int b = m.dest(h);
        undirected[ukey(a, b)].push_back(h);
        auto [it, inserted] = m.directed_.emplace(dkey(a, b), h);
        if (!inserted) m.connectivity_clean_ = false;
    }
    m.n_edges_ = static_cast<int>(undirected.size());
    m.valence_.assign(static_cast<size_t>(nv), 0);
    for (const auto& [key, hs] : undirected) {
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffLL);
        ++m.valence_[static_cast<size_t>(a)];
        if (b != a) ++m.valence_[static_cast<size_t>(b)];
    }

    for (auto& [key, hs] : undirected) {
        if (hs.size() == 1) {
            m.halfedges_[static_cast<size_t>(hs[0])].twin = -1;
            m.has_boundary_ = true;
        } else if (hs.size() == 2) {
            const int h0 = hs[0], h1 = hs[1];
            const bool opposite = m.halfedges_[static_cast<size_t>(h0)].origin == m.dest(h1);
            if (opposite) {
                m.halfedges_[static_cast<size_t>(h0)].twin = h1;
                m.halfedges_[static_cast<size_t>(h1)].twin = h0;
            } else {
                m.halfedges_[static_cast<size_t>(h0)].twin = -2;
                m.halfedges_[static_cast<size_t>(h1)].twin = -2;
                m.connectivity_clean_ = false;
            }
        } else {
            for (int h : hs) m.halfedges_[static_cast<size_t>(h)].twin = -2;
            m.connectivity_clean_ = false;
        }
    }
    return m;
}

int QuadMesh::halfedge_between(int a, int b) const {
    const auto it = directed_.find(dkey(a, b));
    return it == directed_.end() ? -1 : it->second;
}

int QuadMesh::prev(int h) const {
    int cur = h;
    while (he(cur).next != h) cur = he(cur).next;
    return cur;
}

int QuadMesh::vertex_valence(int v) const { return valence_[static_cast<size_t>(v)]; }

bool QuadMesh::euler_characteristic(int* out) const {
    if (!connectivity_clean_) return false;
    *out = n_vertices() - n_edges() + n_faces();
    return true;
}

ValidationReport validate_manifold(const QuadMesh& m) {
    ValidationReport rep;

    std::vector<char> has_face(static_cast<size_t>(m.n_vertices()), 0);
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        bool degenerate = cyc.size() < 3;
        std::set<int> seen;
        for (int v : cyc) {
            has_face[static_cast<size_t>(v)] = 1;
            if (!seen.insert(v).second) degenerate = true;
        }
        if (degenerate) rep.issues.push_back({"DegenerateFace", {f}});
    }

    std::unordered_map<long long, std::vector<int>> undirected;
    for (int h = 0; h < static_cast<int>(m.halfedges().size()); ++h) {
        undirected[ukey(m.he(h).origin, m.dest(h))].push_back(h);
    }
    for (auto& [key, hs] : undirected) {
        const int a = m.he(hs[0]).origin, b = m.dest(hs[0]);
        if (hs.size() > 2) {
            rep.issues.push_back({"NonManifoldEdge", {std::min(a, b), std::max(a, b)}});
        } else if (hs.size() == 2 && m.he(hs[0]).origin == m.he(hs[1]).origin) {
            rep.issues.push_back({"InconsistentOrientation", {std::min(a, b), std::max(a, b)}});
        }
    }

    // Umbrella test: the faces incident to a vertex must form one connected
    // fan. Only meaningful where the edge structure itself is clean.
    std::vector<std::vector<int>> outgoing(static_cast<size_t>(m.n_vertices()));
    for (int h = 0; h < static_cast<int>(m.halfedges().size()); ++h) {
        outgoing[static_cast<size_t>(m.he(h).origin)].push_back(h);
    }
    for (int v = 0; v < m.n_vertices(); ++v) {
        const auto& out = outgoing[static_cast<size_t>(v)];
        if (out.empty()) {
            if (!has_face[static_cast<size_t>(v)]) rep.issues.push_back({"IsolatedVertex", {v}});
            continue;
        }
        bool clean = true;
        for (int h : out) {
            if (m.he(h).twin == -2 || m.he(m.prev(h)).twin == -2) clean = false;
        }
        if (!clean) continue;
        // Sweep counterclockwise (twin of prev), then clockwise (next of
        // twin) from the same start; together they must reach every fan.
        std::set<int> visited;
        int h = out[0];
        while (h >= 0 && !visited.count(h)) {
            visited.insert(h);
            h = m.he(m.prev(h)).twin;
        }
        h = out[0];
        while (h >= 0) {
            const int t = m.he(h).twin;
            if (t < 0) break;
            h = m.he(t).next;
            if (visited.count(h)) break;
            visited.insert(h);
        }
        if (static_cast<int>(visited.size()) < static_cast<int>(out.size())) {
            rep.issues.push_back({"NonManifoldVertex", {v}});
        }
    }
    return rep;
}

ElementClassification classify_elements(const QuadMesh& m) {
    ElementClassification c;
    c.vertex_valence.reserve(static_cast<size_t>(m.n_vertices()));
    for (int v = 0; v < m.n_vertices(); ++v) {
        c.vertex_valence.push_back(m.vertex_valence(v));
        if (m.vertex_valence(v) != 4) c.extraordinary_vertices.push_back(v);
    }
    c.face_valence.reserve(static_cast<size_t>(m.n_faces()));
    for (int f = 0; f < m.n_faces(); ++f) {
        const int q = static_cast<int>(m.faces()[static_cast<size_t>(f)].size());
        c.face_valence.push_back(q);
        if (q != 4) c.extraordinary_faces.push_back(f);
    }
    return c;
}

QuadMesh load_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<std::vector<int>> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) {
                raise(ErrorCode::ParseError, "bad vertex record on line " + std::to_string(lineno));
            }
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> cyc;
            std::string tok;
            while (ls >> tok) {
                const size_t slash = tok.find('/');
                const std::string first = slash == std::string::npos ? tok : tok.substr(0, slash);
                int idx = 0;
                try {
                    idx = std::stoi(first);
                } catch (...) {
                    raise(ErrorCode::ParseError, "bad face index on line " + std::to_string(lineno));
                }
                if (idx > 0) cyc.push_back(idx - 1);
                else if (idx < 0) cyc.push_back(static_cast<int>(vertices.size()) + idx);
                else raise(ErrorCode::ParseError, "zero face index on line " + std::to_string(lineno));
            }
            if (cyc.size() < 3) {
                raise(ErrorCode::ParseError, "face with fewer than 3 vertices on line " +
                                                 std::to_string(lineno));
            }
            faces.push_back(std::move(cyc));
        }
    }
    QuadMesh m = QuadMesh::build(std::move(vertices), std::move(faces));
    for (const auto& he : m.halfedges()) {
        if (he.twin == -2) {
            // Distinguish a doubled orientation from a true >2-face edge.
            QuadMesh fixed = orient_consistently(m); // throws when impossible
            return fixed;
        }
    }
    return m;
}

QuadMesh load_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    return load_obj(in);
}

void save_obj(const QuadMesh& m, std::ostream& out) {
    char buf[128];
    for (const auto& v : m.vertices()) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : m.faces()) {
        out << 'f';
        for (int v : f) out << ' ' << (v + 1);
        out << '\n';
    }
}

void save_obj_file(const QuadMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path);
    save_obj(m, out);
}

QuadMesh orient_consistently(const QuadMesh& m) {
    // Face adjacency over undirected edges; BFS assigns a flip flag.
    std::unordered_map<long long, std::vector<std::pair<int, bool>>> edge_faces;
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        const int q = static_cast<int>(cyc.size());
        for (int i = 0; i < q; ++i) {
            const int a = cyc[static_cast<size_t>(i)];
            const int b = cyc[static_cast<size_t>((i + 1) % q)];
            edge_faces[ukey(a, b)].push_back({f, a < b});
        }
    }
    for (auto& [key, lst] : edge_faces) {
        if (lst.size() > 2) raise(ErrorCode::NonManifold, "edge shared by more than two faces");
    }

    std::vector<int> flip(static_cast<size_t>(m.n_faces()), -1);
    std::vector<int> stack;
    for (int seed = 0; seed < m.n_faces(); ++seed) {
        if (flip[static_cast<size_t>(seed)] >= 0) continue;
        flip[static_cast<size_t>(seed)] = 0;
        stack.push_back(seed);
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            const auto& cyc = m.faces()[static_cast<size_t>(f)];
            const int q = static_cast<int>(cyc.size());
            for (int i = 0; i < q; ++i) {
                const int a = cyc[static_cast<size_t>(i)];
                const int b = cyc[static_cast<size_t>((i + 1) % q)];
                for (const auto& [g, g_dir] : edge_faces[ukey(a, b)]) {
                    if (g == f) continue;
                    // Consistent orientation traverses the shared edge in
                    // opposite directions (after accounting for flips).
                    const bool f_dir = (a < b) != (flip[static_cast<size_t>(f)] == 1);
                    const bool g_traverses_same = g_dir;
                    const int needed = (g_traverses_same == f_dir) ? 1 : 0;
                    if (flip[static_cast<size_t>(g)] < 0) {
                        flip[static_cast<size_t>(g)] = needed;
                        stack.push_back(g);
                    } else if (flip[static_cast<size_t>(g)] != needed) {
                        raise(ErrorCode::InconsistentOrientation,
                              "mesh is not orientable");
                    }
                }
            }
        }
    }

    std::vector<std::vector<int>> faces = m.faces();
    for (int f = 0; f < m.n_faces(); ++f) {
        if (flip[static_cast<size_t>(f)] == 1) {
            std::reverse(faces[static_cast<size_t>(f)].begin(), faces[static_cast<size_t>(f)].end());
        }
    }
    return QuadMesh::build(m.vertices(), std::move(faces));
}

namespace {

void require_closed_clean(const QuadMesh& m) {
    if (!m.connectivity_clean()) {
        raise(ErrorCode::NonManifold, "mesh connectivity has defects; validate it first");
    }
    if (m.has_boundary()) raise(ErrorCode::BoundaryUnsupported, "mesh has boundary edges");
}

// Counterclockwise rotation of an outgoing halfedge around its origin.
int rot_ccw(const QuadMesh& m, int h) { return m.he(m.prev(h)).twin; }

// Corner index of halfedge h within its face.
int corner_index(const QuadMesh& m, int h) { return h - m.face_halfedge(m.he(h).face); }

} // namespace

DualTopology refine_topology_dual(const QuadMesh& m) {
    require_closed_clean(m);
    DualTopology t;
    t.corner_offset.reserve(static_cast<size_t>(m.n_faces()));
    int acc = 0;
    for (int f = 0; f < m.n_faces(); ++f) {
        t.corner_offset.push_back(acc);
        acc += static_cast<int>(m.faces()[static_cast<size_t>(f)].size());
    }
    t.n_new_vertices = acc;

    auto new_id = [&](int h) {
        return t.corner_offset[static_cast<size_t>(m.he(h).face)] + corner_index(m, h);
    };

    // F-faces: the shrunk copy of every old face.
    for (int f = 0; f < m.n_faces(); ++f) {
        const int q = static_cast<int>(m.faces()[static_cast<size_t>(f)].size());
        std::vector<int> cyc;
        cyc.reserve(static_cast<size_t>(q));
        for (int i = 0; i < q; ++i) cyc.push_back(t.corner_offset[static_cast<size_t>(f)] + i);
        t.faces.push_back(std::move(cyc));
        ++t.f_faces;
    }
    // E-faces: one per (inner) edge.
    for (int h = 0; h < static_cast<int>(m.halfedges().size()); ++h) {
        const int tw = m.he(h).twin;
        if (tw < h) continue; // visit each edge once
        const int h_next = m.he(h).next;
        const int tw_next = m.he(tw).next;
        t.faces.push_back({new_id(h), new_id(tw_next), new_id(tw), new_id(h_next)});
        ++t.e_faces;
    }
    // V-faces: one per vertex, corners taken around the vertex.
    for (int v = 0; v < m.n_vertices(); ++v) {
        int h = m.vertex_halfedge(v);
        std::vector<int> cyc;
        const int start = h;
        do {
            cyc.push_back(new_id(h));
            h = rot_ccw(m, h);
        } while (h != start);
        t.faces.push_back(std::move(cyc));
        ++t.v_faces;
    }
    return t;
}

int PrimalTopology::edge_point(int a, int b) const {
    const auto it = edge_id.find(ukey(a, b));
    if (it == edge_id.end()) raise(ErrorCode::InvalidParameter, "no such edge");
    return face_count + it->second;
}

PrimalTopology refine_topology_primal(const QuadMesh& m) {
    require_closed_clean(m);
    for (int f = 0; f < m.n_faces(); ++f) {
        if (m.faces()[static_cast<size_t>(f)].size() != 4) {
            raise(ErrorCode::NonQuadFace,
                  "primal refinement requires all-quad input; face " + std::to_string(f));
        }
    }
    PrimalTopology t;
    t.face_count = m.n_faces();
    for (int h = 0; h < static_cast<int>(m.halfedges().size()); ++h) {
        const int a = m.he(h).origin, b = m.dest(h);
        const long long key = ukey(a, b);
        if (!t.edge_id.count(key)) {
            t.edge_id[key] = static_cast<int>(t.edges.size());
            t.edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    t.edge_count = static_cast<int>(t.edges.size());
    t.vertex_offset = t.face_count + t.edge_count;
    t.n_new_vertices = t.vertex_offset + m.n_vertices();

    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        for (int j = 0; j < 4; ++j) {
            const int vj = cyc[static_cast<size_t>(j)];
            const int vn = cyc[static_cast<size_t>((j + 1) % 4)];
            const int vp = cyc[static_cast<size_t>((j + 3) % 4)];
            t.faces.push_back({t.vertex_point(vj), t.edge_point(vj, vn), t.face_point(f),
                               t.edge_point(vp, vj)});
        }
    }
    return t;
}

QuadMesh refine_dual(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k,
                     bool normalized) {
    const DualTopology t = refine_topology_dual(m);
    const double scale = normalized ? schemes::normalization_factor(s, k) : 1.0;

    std::vector<Vec3> pts(static_cast<size_t>(t.n_new_vertices), Vec3::Zero());
    std::map<int, std::vector<double>> weights_by_valence;
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        const int q = static_cast<int>(cyc.size());
        auto it = weights_by_valence.find(q);
        if (it == weights_by_valence.end()) {
            it = weights_by_valence.emplace(q, schemes::dual_face_weights(s, k, q)).first;
        }
        const auto& w = it->second;
        for (int j = 0; j < q; ++j) {
            Vec3 p = Vec3::Zero();
            for (int c = 0; c < q; ++c) {
                p += w[static_cast<size_t>((c - j + q) % q)] *
                     m.vertices()[static_cast<size_t>(cyc[static_cast<size_t>(c)])];
            }
            pts[static_cast<size_t>(t.corner_offset[static_cast<size_t>(f)] + j)] = scale * p;
        }
    }
    return QuadMesh::build(std::move(pts), t.faces);
}

QuadMesh refine_primal(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k,
                       bool normalized) {
    const PrimalTopology t = refine_topology_primal(m);
    const schemes::PrimalStencils st = schemes::primal_stencils(s, k);
    const double scale = normalized ? schemes::normalization_factor(s, k) : 1.0;

    std::vector<Vec3> pts(static_cast<size_t>(t.n_new_vertices), Vec3::Zero());
    const auto& V = m.vertices();

    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        Vec3 p = Vec3::Zero();
        for (int v : cyc) p += V[static_cast<size_t>(v)];
        pts[static_cast<size_t>(t.face_point(f))] = scale * 0.25 * p;
    }
    for (int h = 0; h < static_cast<int>(m.halfedges().size()); ++h) {
        const int tw = m.he(h).twin;
        if (tw < h) continue;
        const int a = m.he(h).origin, b = m.dest(h);
        // Wings: the two corners of each adjacent quad away from the edge.
        auto wing_sum = [&](int hh) {
            const int n1 = m.he(hh).next;
            const int n2 = m.he(n1).next;
            const int n3 = m.he(n2).next;
            return V[static_cast<size_t>(m.he(n2).origin)] + V[static_cast<size_t>(m.he(n3).origin)];
        };
        const Vec3 p = st.edge_d * (V[static_cast<size_t>(a)] + V[static_cast<size_t>(b)]) +
                       st.edge_e * (wing_sum(h) + wing_sum(tw));
        pts[static_cast<size_t>(t.edge_point(a, b))] = scale * p;
    }
    for (int v = 0; v < m.n_vertices(); ++v) {
        int h = m.vertex_halfedge(v);
        const int start = h;
        Vec3 edge_sum = Vec3::Zero(), diag_sum = Vec3::Zero();
        int n = 0;
        do {
            edge_sum += V[static_cast<size_t>(m.dest(h))];
            diag_sum += V[static_cast<size_t>(m.dest(m.he(h).next))]; // opposite quad corner
            ++n;
            h = rot_ccw(m, h);
        } while (h != start);
        const Vec3 p = st.vertex_a(n) * V[static_cast<size_t>(v)] + st.vertex_b(n) * edge_sum +
                       st.vertex_c(n) * diag_sum;
        pts[static_cast<size_t>(t.vertex_point(v))] = scale * p;
    }
    return QuadMesh::build(std::move(pts), t.faces);
}

QuadMesh refine(const QuadMesh& m, const schemes::SchemeDescriptor& s, int k, bool normalized) {
    return s.kind == schemes::SchemeKind::Dual ? refine_dual(m, s, k, normalized)
                                               : refine_primal(m, s, k, normalized);
}

int& SectorGridIds::slot(int sector, int a, int b) {
    const int idx = dual ? (a * R + b) : ((a - 1) * (R + 1) + b);
    return ids[static_cast<size_t>(sector * slots_per_sector() + idx)];
}

int SectorGridIds::slot(int sector, int a, int b) const {
    const int idx = dual ? (a * R + b) : ((a - 1) * (R + 1) + b);
    return ids[static_cast<size_t>(sector * slots_per_sector() + idx)];
}

bool SectorGridIds::resolve(bool dual, int n, int& sector, int& a, int& b) {
    // Quadrant coordinates rotate by one sector per wrap. Dual slots sit at
    // half-integer positions (a + 1/2, b + 1/2), so their reflection rule
    // shifts by one.
    for (int guard = 0; guard < 8; ++guard) {
        if (dual) {
            if (b < 0) {
                const int c = -b - 1;
                b = a;
                a = c;
                sector = (sector - 1 + n) % n;
                continue;
            }
            if (a < 0) {
                const int c = -a - 1;
                a = b;
                b = c;
                sector = (sector + 1) % n;
                continue;
            }
        } else {
            if (a == 0 && b == 0) return true;
            if (b < 0) { // (a, -c) of sector i is (c, a) of sector i-1
                const int c = -b;
                b = a;
                a = c;
                sector = (sector - 1 + n) % n;
                continue;
            }
            if (a <= 0) { // (0, b) and beyond belong to the next sector
                const int c = -a;
                a = b;
                b = c;
                sector = (sector + 1) % n;
                continue;
            }
        }
        break;
    }
    return false;
}

int SectorGridIds::at(int sector, int a, int b) const {
    if (resolve(dual, n, sector, a, b)) return center;
    const int a_lo = dual ? 0 : 1;
    const int a_hi = dual ? R - 1 : R;
    const int b_hi = dual ? R - 1 : R;
    if (a < a_lo || a > a_hi || b < 0 || b > b_hi) {
        raise(ErrorCode::InvalidParameter, "sector grid access out of range");
    }
    return slot(sector, a, b);
}

namespace {

// Continuation of the walk u -> w straight through the valence-4 vertex w.
int straight(const QuadMesh& m, int h_uw) {
    const int tw = m.he(h_uw).twin;
    if (tw < 0) raise(ErrorCode::InsufficientRegularCollar, "walk hit a boundary");
    int h = rot_ccw(m, tw);
    if (h < 0) raise(ErrorCode::InsufficientRegularCollar, "walk hit a boundary");
    h = rot_ccw(m, h);
    if (h < 0) raise(ErrorCode::InsufficientRegularCollar, "walk hit a boundary");
    return h;
}

void check_regular_interior(const QuadMesh& m, const std::vector<int>& verts, int center) {
    std::set<int> seen;
    for (int v : verts) {
        if (v == center) continue;
        if (!seen.insert(v).second) {
            raise(ErrorCode::InsufficientRegularCollar, "collar vertices are not distinct");
        }
        if (m.vertex_valence(v) != 4) {
            raise(ErrorCode::InsufficientRegularCollar,
                  "vertex " + std::to_string(v) + " in the collar has valence " +
                      std::to_string(m.vertex_valence(v)));
        }
    }
}

int find_he(const QuadMesh& m, int a, int b) {
    const int h = m.halfedge_between(a, b);
    if (h < 0) raise(ErrorCode::InsufficientRegularCollar, "expected grid edge missing");
    return h;
}

void require_quad(const QuadMesh& m, int h) {
    if (m.faces()[static_cast<size_t>(m.he(h).face)].size() != 4) {
        raise(ErrorCode::InsufficientRegularCollar, "collar face is not a quad");
    }
}

} // namespace

LocalPatch extract_local_neighborhood(const QuadMesh& m, schemes::SchemeKind kind, int element,
                                      int rings, int anchor) {
    require_closed_clean(m);
    LocalPatch patch;
    patch.kind = kind;
    patch.element = element;
    const int R = rings;

    if (kind == schemes::SchemeKind::Dual) {
        const auto& cyc = m.faces()[static_cast<size_t>(element)];
        const int n = static_cast<int>(cyc.size());
        patch.n = n;
        patch.p = 4;
        patch.grid.dual = true;
        patch.grid.n = n;
        patch.grid.R = R;
        patch.grid.ids.assign(static_cast<size_t>(n) * patch.grid.slots_per_sector(), -1);

        const int shift = anchor < 0 ? 0 : anchor;
        std::vector<int> u(static_cast<size_t>(n));
        std::vector<int> h_edge(static_cast<size_t>(n)); // u_i -> u_{i+1}
        for (int i = 0; i < n; ++i) {
            u[static_cast<size_t>(i)] = cyc[static_cast<size_t>((i + shift) % n)];
        }
        for (int i = 0; i < n; ++i) {
            h_edge[static_cast<size_t>(i)] =
                find_he(m, u[static_cast<size_t>(i)], u[static_cast<size_t>((i + 1) % n)]);
        }
        // Seed each sector with the corner u_i and its two neighbors in the
        // diagonal face: x_i on the E_{i-1} side, z_i on the E_i side.
        for (int i = 0; i < n; ++i) {
            const int prev = (i - 1 + n) % n;
            const int tw_prev = m.he(h_edge[static_cast<size_t>(prev)]).twin;
            require_quad(m, tw_prev);
            const int x = m.dest(m.he(m.he(tw_prev).next).next);
            const int tw_cur = m.he(h_edge[static_cast<size_t>(i)]).twin;
            require_quad(m, tw_cur);
            const int z = m.dest(m.he(tw_cur).next);
            patch.grid.slot(i, 0, 0) = u[static_cast<size_t>(i)];
            patch.grid.slot(i, 1, 0) = x;
            patch.grid.slot(i, 0, 1) = z;
        }
        // Extend the b = 0 row by straight walks, then sweep rows upward.
        for (int i = 0; i < n; ++i) {
            int h = find_he(m, patch.grid.slot(i, 0, 0), patch.grid.slot(i, 1, 0));
            for (int a = 2; a < R; ++a) {
                h = straight(m, h);
                patch.grid.slot(i, a, 0) = m.dest(h);
            }
            for (int b = 0; b + 1 < R; ++b) {
                for (int a = 1; a < R; ++a) {
                    const int h2 = find_he(m, patch.grid.at(i, a - 1, b), patch.grid.at(i, a, b));
                    require_quad(m, h2);
                    const int above = m.dest(m.he(h2).next);
                    const int above_l = m.dest(m.he(m.he(h2).next).next);
                    int& s_above = patch.grid.slot(i, a, b + 1);
                    if (s_above >= 0 && s_above != above) {
                        raise(ErrorCode::InsufficientRegularCollar, "grid is not consistent");
                    }
                    s_above = above;
                    int& s_above_l = patch.grid.slot(i, a - 1, b + 1);
                    if (s_above_l >= 0 && s_above_l != above_l) {
                        raise(ErrorCode::InsufficientRegularCollar, "grid is not consistent");
                    }
                    s_above_l = above_l;
                }
            }
        }
        check_regular_interior(m, patch.grid.ids, -1);

        patch.d.resize(4 * n, 3);
        patch.row_vertex.reserve(static_cast<size_t>(4 * n));
        for (int i = 0; i < n; ++i) {
            const int order[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
            for (int r = 0; r < 4; ++r) {
                const int vid = patch.grid.slot(i, order[r][0], order[r][1]);
                patch.row_vertex.push_back(vid);
                patch.d.row(4 * i + r) = m.vertices()[static_cast<size_t>(vid)];
            }
        }
        return patch;
    }

    // Vertex-centered (primal) case.
    const int v = element;
    std::vector<int> spokes;
    {
        int h0 = m.vertex_halfedge(v);
        if (anchor >= 0) {
            int h = h0;
            do {
                if (m.dest(h) == anchor) { h0 = h; break; }
                h = rot_ccw(m, h);
            } while (h != h0);
            if (m.dest(h0) != anchor) {
                raise(ErrorCode::InvalidParameter, "anchor is not a neighbor of the vertex");
            }
        } else {
            int h = h0, best = h0;
            do {
                if (m.dest(h) < m.dest(best)) best = h;
                h = rot_ccw(m, h);
            } while (h != h0);
            h0 = best;
        }
        int h = h0;
        do {
            spokes.push_back(h);
            h = rot_ccw(m, h);
        } while (h != h0);
    }
    const int n = static_cast<int>(spokes.size());
    patch.n = n;
    patch.p = 6;
    patch.grid.dual = false;
    patch.grid.n = n;
    patch.grid.R = R;
    patch.grid.center = v;
    patch.grid.ids.assign(static_cast<size_t>(n) * patch.grid.slots_per_sector(), -1);

    // Spoke rows first (they are shared between adjacent sectors).
    for (int i = 0; i < n; ++i) {
        int h = spokes[static_cast<size_t>(i)];
        require_quad(m, h);
        patch.grid.slot(i, 1, 0) = m.dest(h);
        for (int a = 2; a <= R; ++a) {
            h = straight(m, h);
            patch.grid.slot(i, a, 0) = m.dest(h);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < R; ++b) {
            for (int a = 1; a <= R; ++a) {
                const int va = patch.grid.at(i, a - 1, b);
                const int vb = patch.grid.at(i, a, b);
                const int h2 = find_he(m, va, vb);
                require_quad(m, h2);
                const int above = m.dest(m.he(h2).next);
                const int above_l = m.dest(m.he(m.he(h2).next).next);
                int& s_above = patch.grid.slot(i, a, b + 1);
                if (s_above >= 0 && s_above != above) {
                    raise(ErrorCode::InsufficientRegularCollar, "grid is not consistent");
                }
                s_above = above;
                if (a > 1) {
                    int& s_above_l = patch.grid.slot(i, a - 1, b + 1);
                    if (s_above_l >= 0 && s_above_l != above_l) {
                        raise(ErrorCode::InsufficientRegularCollar, "grid is not consistent");
                    }
                    s_above_l = above_l;
                } else if (patch.grid.at(i, 0, b + 1) != above_l) {
                    raise(ErrorCode::InsufficientRegularCollar, "sector seams do not match");
                }
            }
        }
    }
    check_regular_interior(m, patch.grid.ids, v);

    patch.d.resize(7 * n, 3);
    patch.row_vertex.reserve(static_cast<size_t>(7 * n));
    const int order[6][2] = {{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {1, 2}};
    for (int i = 0; i < n; ++i) {
        patch.row_vertex.push_back(v);
        patch.d.row(7 * i) = m.vertices()[static_cast<size_t>(v)];
        for (int r = 0; r < 6; ++r) {
            const int vid = patch.grid.slot(i, order[r][0], order[r][1]);
            patch.row_vertex.push_back(vid);
            patch.d.row(7 * i + 1 + r) = m.vertices()[static_cast<size_t>(vid)];
        }
    }
    return patch;
}

namespace {

// Two quadrant-grid disks joined by one ring of prism-wall quads. The poles
// are the only high-valence vertices; the topologically unavoidable excess
// curvature (a closed all-quad mesh needs sum(4 - valence) = 8) sits in 2n
// benign valence-3 corners on the wall rim, combinatorially R rings away
// from the poles.
struct PillowBuilder {
    int n, R;
    double height;
    std::map<std::array<int, 4>, int> ids; // (side, sector, a, b) -> vertex id
    std::vector<Vec3> pts;
    std::vector<std::vector<int>> faces;

    Vec3 position(int side, int sector, int a, int b) const {
        const double wall = 0.15 * height;
        if (a == 0 && b == 0) return Vec3(0, 0, side == 0 ? height + wall : -height - wall);
        const double frac = std::atan2(double(b), double(a)) / (M_PI / 2.0);
        const double phi = 2.0 * M_PI * (sector + frac) / n;
        const double r = std::hypot(double(a), double(b)) / R;
        const double z = wall + std::cos(std::min(1.0, r) * M_PI / 2.0) * height;
        return Vec3(r * std::cos(phi), r * std::sin(phi), side == 0 ? z : -z);
    }

    int id(int side, int sector, int a, int b) {
        if (a == 0 && b == 0) sector = -1; // one pole per side
        else if (a == 0) return id(side, (sector + 1) % n, b, 0);
        const std::array<int, 4> key{side, sector, a, b};
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        const int nid = static_cast<int>(pts.size());
        pts.push_back(position(side, std::max(sector, 0), a, b));
        ids[key] = nid;
        return nid;
    }

    std::vector<int> boundary_cycle(int side) {
        std::vector<int> cyc;
        for (int i = 0; i < n; ++i) {
            for (int b = 0; b < R; ++b) cyc.push_back(id(side, i, R, b));
            for (int a = R; a >= 1; --a) cyc.push_back(id(side, i, a, R));
        }
        return cyc;
    }

    void emit() {
        for (int side = 0; side < 2; ++side) {
            for (int i = 0; i < n; ++i) {
                for (int a = 1; a <= R; ++a) {
                    for (int b = 1; b <= R; ++b) {
                        std::vector<int> cyc{id(side, i, a - 1, b - 1), id(side, i, a, b - 1),
                                             id(side, i, a, b), id(side, i, a - 1, b)};
                        if (side == 1) std::reverse(cyc.begin(), cyc.end());
                        faces.push_back(std::move(cyc));
                    }
                }
            }
        }
        const std::vector<int> top = boundary_cycle(0);
        const std::vector<int> bottom = boundary_cycle(1);
        const int len = static_cast<int>(top.size());
        for (int j = 0; j < len; ++j) {
            const int jn = (j + 1) % len;
            faces.push_back({top[static_cast<size_t>(j)], bottom[static_cast<size_t>(j)],
                             bottom[static_cast<size_t>(jn)], top[static_cast<size_t>(jn)]});
        }
    }
};

} // namespace

QuadMesh make_vertex_pillow(int n, int rings, double height) {
    if (n < 3 || rings < 2) raise(ErrorCode::InvalidParameter, "need n >= 3 and rings >= 2");
    PillowBuilder b{n, rings, height, {}, {}, {}};
    b.emit();
    return QuadMesh::build(std::move(b.pts), std::move(b.faces));
}

QuadMesh dual_mesh(const QuadMesh& m) {
    require_closed_clean(m);
    std::vector<Vec3> pts(static_cast<size_t>(m.n_faces()), Vec3::Zero());
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& cyc = m.faces()[static_cast<size_t>(f)];
        Vec3 c = Vec3::Zero();
        for (int v : cyc) c += m.vertices()[static_cast<size_t>(v)];
        pts[static_cast<size_t>(f)] = c / double(cyc.size());
    }
    std::vector<std::vector<int>> faces;
    faces.reserve(static_cast<size_t>(m.n_vertices()));
    for (int v = 0; v < m.n_vertices(); ++v) {
        int h = m.vertex_halfedge(v);
        const int start = h;
        std::vector<int> cyc;
        do {
            cyc.push_back(m.he(h).face);
            h = rot_ccw(m, h);
        } while (h != start);
        faces.push_back(std::move(cyc));
    }
    return QuadMesh::build(std::move(pts), std::move(faces));
}

QuadMesh make_face_pillow(int n, int rings, double height) {
    return dual_mesh(make_vertex_pillow(n, rings + 1, height));
}

QuadMesh make_cube() {
    std::vector<Vec3> v{{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                        {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
    std::vector<std::vector<int>> f{{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                    {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    return QuadMesh::build(std::move(v), std::move(f));
}

QuadMesh make_torus_grid(int nu, int nv, double R, double r) {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<size_t>(nu) * nv);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double a = 2 * M_PI * i / nu;
            const double b = 2 * M_PI * j / nv;
            pts.emplace_back((R + r * std::cos(b)) * std::cos(a),
                             (R + r * std::cos(b)) * std::sin(a), r * std::sin(b));
        }
    }
    std::vector<std::vector<int>> faces;
    auto vid = [&](int i, int j) { return ((i + nu) % nu) * nv + ((j + nv) % nv); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return QuadMesh::build(std::move(pts), std::move(faces));
}

} // namespace nssubdiv::mesh
