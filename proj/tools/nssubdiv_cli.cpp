// Command-line front end: refine meshes, run the convergence and
// normal-continuity analyses, and report limit points.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nssubdiv/analyzer.hpp"
#include "nssubdiv/json_io.hpp"

namespace fs = std::filesystem;
using namespace nssubdiv;

namespace {

struct ValenceRange {
    int lo = 5, hi = 10;
};

ValenceRange parse_valences(const std::string& spec) {
    ValenceRange r;
    const auto dots = spec.find("..");
    try {
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(spec);
        } else {
            r.lo = std::stoi(spec.substr(0, dots));
            r.hi = std::stoi(spec.substr(dots + 2));
        }
    } catch (...) {
        raise(ErrorCode::ParseError, "bad valence range: " + spec);
    }
    if (r.lo < 3 || r.hi < r.lo) raise(ErrorCode::ParseError, "bad valence range: " + spec);
    return r;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
    out << content;
}

int depth_from_grid(int grid) {
    int depth = 0;
    while ((1 << depth) < grid) ++depth;
    return depth;
}

int cmd_refine(const std::string& scheme_id, const std::string& input, int levels,
               const std::string& out_dir, int normalized_flag) {
    const auto s = schemes::parse_scheme_id(scheme_id);
    mesh::QuadMesh m = mesh::load_obj_file(input);
    // The trigonometric rules are not affine; their published surfaces use
    // the normalized variant, so that is the default there.
    const bool normalized = normalized_flag < 0 ? (s.name == "trig-ds") : (normalized_flag > 0);
    fs::create_directories(out_dir);
    for (int k = 1; k <= levels; ++k) {
        m = mesh::refine(m, s, k, normalized);
        const fs::path path = fs::path(out_dir) / ("mesh_" + std::to_string(k) + ".obj");
        std::ofstream out(path);
        if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
        mesh::save_obj(m, out);
        std::printf("wrote %s (%d vertices, %d faces)\n", path.string().c_str(), m.n_vertices(),
                    m.n_faces());
    }
    return 0;
}

int cmd_analyze(const std::string& scheme_id, const std::string& reference_id,
                const std::string& valences, int ktop, int grid, double tol_eigen,
                const std::string& out_dir, const std::string& format) {
    const auto ns = schemes::parse_scheme_id(scheme_id);
    const auto stat = reference_id.empty() ? ns.stationary_reference()
                                           : schemes::parse_scheme_id(reference_id);
    const ValenceRange range = parse_valences(valences);

    analyzer::AnalyzerOptions opts;
    opts.decay_k_hi = ktop;
    opts.eigen_tol = tol_eigen;
    opts.charmap_depth = depth_from_grid(grid);

    fs::create_directories(out_dir);
    bool all_pass = true;
    for (int n = range.lo; n <= range.hi; ++n) {
        const auto conv = analyzer::verify_convergence_conditions(ns, stat, n, opts);
        const auto g1 = analyzer::verify_normal_continuity_conditions(ns, stat, n, opts);
        all_pass = all_pass && conv.overall && g1.overall;

        const std::string tag = "n" + std::to_string(n);
        write_file(fs::path(out_dir) / ("convergence_" + tag + ".json"),
                   io::to_json(conv).dump(2) + "\n");
        write_file(fs::path(out_dir) / ("normal_continuity_" + tag + ".json"),
                   io::to_json(g1).dump(2) + "\n");
        if (format == "csv") {
            try {
                const auto fit = localmatrix::decay_fit(ns, n, 1, ktop);
                write_file(fs::path(out_dir) / ("decay_" + tag + ".csv"), io::decay_csv(fit));
            } catch (const SubdivError& e) {
                if (e.code() != ErrorCode::AllBelowNoiseFloor) throw;
            }
            const auto est = symbols::asymptotic_equivalence(
                1, [&](int k) { return schemes::regular_mask(ns, k); },
                schemes::regular_mask(stat, 1), opts.equivalence_k_max);
            write_file(fs::path(out_dir) / ("equivalence_" + tag + ".csv"),
                       io::equivalence_csv(est));
        }
        std::printf("valence %d: convergence %s, normal continuity %s\n", n,
                    conv.overall ? "pass" : "FAIL", g1.overall ? "pass" : "FAIL");
    }
    return all_pass ? 0 : 2;
}

int cmd_limit(const std::string& scheme_id, const std::string& input, int vertex, int face,
              int depth, const std::string& out_dir) {
    const auto s = schemes::parse_scheme_id(scheme_id);
    const mesh::QuadMesh m = mesh::load_obj_file(input);
    if ((vertex < 0) == (face < 0)) {
        raise(ErrorCode::InvalidParameter, "give exactly one of --vertex or --face");
    }
    if ((s.kind == schemes::SchemeKind::Primal) != (vertex >= 0)) {
        raise(ErrorCode::InvalidParameter,
              "primal schemes analyze vertices, dual schemes analyze faces");
    }
    const int element = vertex >= 0 ? vertex : face;
    const auto patch = mesh::extract_local_neighborhood(m, s.kind, element);

    localmatrix::LimitPointOptions lopts;
    const auto lp = localmatrix::limit_point(s, patch.n, patch.d, lopts);

    const auto rings = analyzer::generate_rings(s, patch, m, 8, depth);
    const auto est = analyzer::estimate_limit_normal(rings, lp.r_c);

    io::json j;
    j["scheme"] = s.id();
    j["element"] = element;
    j["valence"] = patch.n;
    j["limit"] = io::to_json(lp);
    j["normal"] = io::to_json(est);
    try {
        const auto fit = localmatrix::decay_fit(s, patch.n, 1, 15);
        j["decay"] = io::to_json(fit);
    } catch (const SubdivError& e) {
        if (e.code() != ErrorCode::AllBelowNoiseFloor) throw;
        j["decay"] = "stationary";
    }
    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "limit.json", text);
        write_file(fs::path(out_dir) / "rings.obj", io::rings_to_obj(rings));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stationary subdivision engine and analyzer"};
    app.require_subcommand(1);

    std::string scheme = "ds", reference, input, out_dir = ".", format = "json";
    std::string valences = "5..10";
    int levels = 3, ktop = 15, grid = 64, depth = 6;
    int vertex = -1, face = -1;
    double tol_eigen = 1e-8;
    bool raw = false, normalized = false;

    auto* refine = app.add_subcommand("refine", "refine an OBJ mesh");
    refine->add_option("--scheme", scheme, "scheme id (ds, cc, trig-ds:h=..., exp-cc:theta=...)");
    refine->add_option("--input", input, "input OBJ")->required();
    refine->add_option("--levels", levels, "number of refinement levels");
    refine->add_option("--out", out_dir, "output directory");
    refine->add_flag("--raw", raw, "write the raw (unnormalized) refinement");
    refine->add_flag("--normalized", normalized, "write the normalized refinement");

    auto* analyze = app.add_subcommand("analyze", "verify the theorem hypotheses");
    analyze->add_option("--scheme", scheme, "scheme id")->required();
    analyze->add_option("--reference", reference, "stationary reference id (default: inferred)");
    analyze->add_option("--valences", valences, "valence range a..b");
    analyze->add_option("--ktop", ktop, "largest level for the decay fit");
    analyze->add_option("--grid", grid, "characteristic-map samples per cell axis");
    analyze->add_option("--tol-eigen", tol_eigen, "eigenvalue clustering tolerance");
    analyze->add_option("--out", out_dir, "output directory");
    analyze->add_option("--format", format, "json or csv (csv adds series files)");

    auto* limit = app.add_subcommand("limit", "limit point of an extraordinary element");
    limit->add_option("--scheme", scheme, "scheme id")->required();
    limit->add_option("--input", input, "input OBJ")->required();
    limit->add_option("--vertex", vertex, "extraordinary vertex id (primal schemes)");
    limit->add_option("--face", face, "extraordinary face id (dual schemes)");
    limit->add_option("--depth", depth, "ring sampling depth");
    limit->add_option("--out", out_dir, "output directory (optional artifacts)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (refine->parsed()) {
            const int flag = raw ? 0 : (normalized ? 1 : -1);
            return cmd_refine(scheme, input, levels, out_dir, flag);
        }
        if (analyze->parsed()) {
            return cmd_analyze(scheme, reference, valences, ktop, grid, tol_eigen, out_dir,
                               format);
        }
        if (limit->parsed()) {
            return cmd_limit(scheme, input, vertex, face, depth,
                             out_dir == "." ? std::string() : out_dir);
        }
    } catch (const SubdivError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
