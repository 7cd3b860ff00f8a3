#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nssubdiv/analyzer.hpp"
#include "nssubdiv/json_io.hpp"

namespace py = pybind11;
using namespace nssubdiv;

namespace {

py::object json_to_py(const io::json& j) {
    switch (j.type()) {
        case nlohmann::detail::value_t::null: return py::none();
        case nlohmann::detail::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::detail::value_t::number_integer: return py::int_(j.get<long long>());
        case nlohmann::detail::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case nlohmann::detail::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::detail::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::detail::value_t::array: {
            py::list lst;
            for (const auto& item : j) lst.append(json_to_py(item));
            return lst;
        }
        case nlohmann::detail::value_t::object: {
            py::dict d;
            for (auto it = j.begin(); it != j.end(); ++it) {
                d[py::str(it.key())] = json_to_py(it.value());
            }
            return d;
        }
        default: return py::none();
    }
}

symbols::Mask2D mask_from_array(const Eigen::MatrixXd& arr, std::pair<int, int> offset) {
    symbols::Mask2D m({offset.first, offset.second}, static_cast<int>(arr.rows()),
                      static_cast<int>(arr.cols()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = arr(i, j);
    return m;
}

Eigen::MatrixXd mask_to_array(const symbols::Mask2D& m) {
    Eigen::MatrixXd arr(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) arr(i, j) = m.at(i, j);
    return arr;
}

schemes::SchemeDescriptor scheme(const std::string& id) { return schemes::parse_scheme_id(id); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Non-stationary subdivision engine and analyzer";

    py::register_exception<SubdivError>(m, "SubdivError");

    py::class_<mesh::QuadMesh>(m, "QuadMesh")
        .def_property_readonly("n_vertices", &mesh::QuadMesh::n_vertices)
        .def_property_readonly("n_faces", &mesh::QuadMesh::n_faces)
        .def_property_readonly("n_edges", &mesh::QuadMesh::n_edges)
        .def("vertices",
             [](const mesh::QuadMesh& mm) {
                 Eigen::MatrixXd v(mm.n_vertices(), 3);
                 for (int i = 0; i < mm.n_vertices(); ++i) {
                     v.row(i) = mm.vertices()[static_cast<size_t>(i)];
                 }
                 return v;
             })
        .def("faces", [](const mesh::QuadMesh& mm) { return mm.faces(); })
        .def("vertex_valence", &mesh::QuadMesh::vertex_valence);

    m.def("build_mesh", [](const Eigen::MatrixXd& v, const std::vector<std::vector<int>>& f) {
        if (v.cols() != 3) throw SubdivError(ErrorCode::ShapeMismatch, "vertices must be N x 3");
        std::vector<mesh::Vec3> pts;
        pts.reserve(static_cast<size_t>(v.rows()));
        for (int i = 0; i < v.rows(); ++i) {
            pts.emplace_back(v(i, 0), v(i, 1), v(i, 2));
        }
        return mesh::QuadMesh::build(std::move(pts), f);
    });
    m.def("load_obj", &mesh::load_obj_file);
    m.def("save_obj", &mesh::save_obj_file);
    m.def("make_cube", &mesh::make_cube);
    m.def("make_torus_grid", &mesh::make_torus_grid, py::arg("nu"), py::arg("nv"),
          py::arg("R") = 2.0, py::arg("r") = 0.8);
    m.def("make_vertex_pillow", &mesh::make_vertex_pillow, py::arg("n"), py::arg("rings"),
          py::arg("height") = 0.6);
    m.def("make_face_pillow", &mesh::make_face_pillow, py::arg("n"), py::arg("rings"),
          py::arg("height") = 0.6);

    m.def("validate_manifold",
          [](const mesh::QuadMesh& mm) { return json_to_py(io::to_json(mesh::validate_manifold(mm))); });
    m.def("classify_elements",
          [](const mesh::QuadMesh& mm) { return json_to_py(io::to_json(mesh::classify_elements(mm))); });

    m.def(
        "refine",
        [](const mesh::QuadMesh& mm, const std::string& id, int k, bool normalized) {
            return mesh::refine(mm, scheme(id), k, normalized);
        },
        py::arg("mesh"), py::arg("scheme"), py::arg("level") = 1, py::arg("normalized") = false);
    m.def(
        "refine_levels",
        [](const mesh::QuadMesh& mm, const std::string& id, int levels, bool normalized) {
            const auto s = scheme(id);
            mesh::QuadMesh cur = mm;
            for (int k = 1; k <= levels; ++k) cur = mesh::refine(cur, s, k, normalized);
            return cur;
        },
        py::arg("mesh"), py::arg("scheme"), py::arg("levels"), py::arg("normalized") = false);

    m.def(
        "regular_mask",
        [](const std::string& id, int k) { return mask_to_array(schemes::regular_mask(scheme(id), k)); },
        py::arg("scheme"), py::arg("level") = 1);
    m.def("normalization_factor",
          [](const std::string& id, int k) { return schemes::normalization_factor(scheme(id), k); });
    m.def("vk", [](const std::string& id, int k) { return schemes::vk(scheme(id).param, k); });

    m.def(
        "operator_norm",
        [](const Eigen::MatrixXd& arr, std::pair<int, int> offset) {
            return symbols::operator_norm(mask_from_array(arr, offset));
        },
        py::arg("mask"), py::arg("offset") = std::pair<int, int>{0, 0});
    m.def("mask_distance", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return symbols::mask_distance(mask_from_array(a, {0, 0}), mask_from_array(b, {0, 0}));
    });
    m.def(
        "divided_difference",
        [](const Eigen::MatrixXd& arr, int direction) {
            const auto b = symbols::divided_difference_symbol(
                symbols::symbol_from_mask(mask_from_array(arr, {0, 0})), direction);
            return mask_to_array(symbols::mask_from_symbol(b, 1e-9));
        },
        py::arg("mask"), py::arg("direction"));
    m.def(
        "has_smoothing_factor",
        [](const Eigen::MatrixXd& arr) {
            return symbols::has_smoothing_factor(
                symbols::symbol_from_mask(mask_from_array(arr, {0, 0})));
        },
        py::arg("mask"));
    m.def(
        "asymptotic_equivalence",
        [](const std::string& id, int order, int k_max) {
            const auto s = scheme(id);
            const auto ref = schemes::regular_mask(s.stationary_reference(), 1);
            const auto est = symbols::asymptotic_equivalence(
                order, [&](int k) { return schemes::regular_mask(s, k); }, ref, k_max);
            return json_to_py(io::to_json(est));
        },
        py::arg("scheme"), py::arg("order") = 1, py::arg("k_max") = 40);

    m.def("local_matrix", [](const std::string& id, int k, int n) {
        return localmatrix::local_matrix(scheme(id), k, n).dense();
    });
    m.def("product_chain", [](const std::string& id, int n, int k) {
        return localmatrix::product_chain(scheme(id), n, k);
    });
    m.def("spectrum", [](const std::string& id, int n) {
        return json_to_py(io::to_json(localmatrix::spectrum(localmatrix::local_matrix(scheme(id), 1, n))));
    });
    m.def(
        "decay_fit",
        [](const std::string& id, int n, int k_lo, int k_hi) {
            return json_to_py(io::to_json(localmatrix::decay_fit(scheme(id), n, k_lo, k_hi)));
        },
        py::arg("scheme"), py::arg("n"), py::arg("k_lo") = 1, py::arg("k_hi") = 15);
    m.def(
        "limit_point",
        [](const std::string& id, int n, const Eigen::MatrixXd& d1) {
            return json_to_py(io::to_json(localmatrix::limit_point(scheme(id), n, d1)));
        },
        py::arg("scheme"), py::arg("n"), py::arg("d1"));

    m.def(
        "extract_patch",
        [](const mesh::QuadMesh& mm, const std::string& kind, int element) {
            const auto k = kind == "face" ? schemes::SchemeKind::Dual : schemes::SchemeKind::Primal;
            const auto patch = mesh::extract_local_neighborhood(mm, k, element);
            py::dict d;
            d["n"] = patch.n;
            d["p"] = patch.p;
            d["d"] = patch.d;
            d["rows"] = patch.row_vertex;
            return d;
        },
        py::arg("mesh"), py::arg("kind"), py::arg("element"));

    m.def(
        "verify_convergence",
        [](const std::string& id, int n) {
            const auto s = scheme(id);
            return json_to_py(io::to_json(
                analyzer::verify_convergence_conditions(s, s.stationary_reference(), n)));
        },
        py::arg("scheme"), py::arg("n"));
    m.def(
        "verify_normal_continuity",
        [](const std::string& id, int n) {
            const auto s = scheme(id);
            return json_to_py(io::to_json(
                analyzer::verify_normal_continuity_conditions(s, s.stationary_reference(), n)));
        },
        py::arg("scheme"), py::arg("n"));
    m.def(
        "characteristic_ring",
        [](const std::string& id, int n, int depth) {
            return json_to_py(io::to_json(analyzer::sample_characteristic_ring(scheme(id), n, depth)));
        },
        py::arg("scheme"), py::arg("n"), py::arg("depth") = 5);
    m.def(
        "limit_and_normal",
        [](const mesh::QuadMesh& mm, const std::string& id, int element, int k_max, int depth) {
            const auto s = scheme(id);
            const auto patch = mesh::extract_local_neighborhood(mm, s.kind, element);
            const auto lp = localmatrix::limit_point(s, patch.n, patch.d);
            const auto rings = analyzer::generate_rings(s, patch, mm, k_max, depth);
            const auto est = analyzer::estimate_limit_normal(rings, lp.r_c);
            py::dict d;
            d["limit"] = json_to_py(io::to_json(lp));
            d["normal"] = json_to_py(io::to_json(est));
            return d;
        },
        py::arg("mesh"), py::arg("scheme"), py::arg("element"), py::arg("k_max") = 6,
        py::arg("depth") = 5);
    m.def(
        "basic_limit_function",
        [](const std::string& id, int k, int depth) {
            const auto blf = analyzer::basic_limit_function(scheme(id), k, depth);
            py::dict d;
            d["values"] = mask_to_array(blf.values);
            d["offset"] = std::pair<int, int>{blf.values.offset[0], blf.values.offset[1]};
            d["du"] = mask_to_array(blf.du);
            d["dv"] = mask_to_array(blf.dv);
            return d;
        },
        py::arg("scheme"), py::arg("start_level") = 1, py::arg("depth") = 6);
}
