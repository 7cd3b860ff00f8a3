#include "nssubdiv/json_io.hpp"

#include <cstdio>
#include <sstream>

namespace nssubdiv::io {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

json to_json(const symbols::Mask2D& m) {
    json j;
    j["offset"] = {m.offset[0], m.offset[1]};
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["data"] = m.a;
    return j;
}

symbols::Mask2D mask_from_json(const json& j) {
    symbols::Mask2D m({j.at("offset").at(0).get<int>(), j.at("offset").at(1).get<int>()},
                      j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& data = j.at("data");
    if (data.size() != m.a.size()) raise(ErrorCode::ParseError, "mask data size mismatch");
    for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = data.at(i).get<double>();
    return m;
}

json to_json(const symbols::EquivalenceEstimate& e) {
    json j;
    j["order"] = e.order;
    j["k_max"] = e.k_max;
    j["terms"] = e.terms;
    j["partial_sums"] = e.partial_sums;
    j["tail_ratio"] = e.tail_ratio;
    j["verdict"] = symbols::verdict_name(e.verdict);
    return j;
}

std::string equivalence_csv(const symbols::EquivalenceEstimate& e) {
    std::ostringstream out;
    out << "k,term,partial_sum\n";
    for (size_t i = 0; i < e.terms.size(); ++i) {
        out << (i + 1) << ',' << fmt17(e.terms[i]) << ',' << fmt17(e.partial_sums[i]) << '\n';
    }
    return out.str();
}

json to_json(const localmatrix::Spectrum& s) {
    json j;
    json eigs = json::array();
    for (const auto& l : s.eigenvalues) eigs.push_back({l.real(), l.imag()});
    j["eigenvalues"] = eigs;
    j["lambda0"] = s.lambda0;
    j["dominant_is_one"] = s.dominant_is_one;
    j["dominant_simple"] = s.dominant_simple;
    j["all_ones_eigenvector"] = s.all_ones_eigenvector;
    j["lambda1"] = s.lambda1;
    j["lambda1_algebraic"] = s.lambda1_algebraic;
    j["lambda1_geometric"] = s.lambda1_geometric;
    j["subdominant_real_positive"] = s.subdominant_real_positive;
    j["subdominant_double_nondefective"] = s.subdominant_double_nondefective;
    j["subdominant_separated"] = s.subdominant_separated;
    return j;
}

json to_json(const localmatrix::DecayFit& f) {
    json j;
    j["ks"] = f.ks;
    j["norms"] = f.norms;
    j["sigma"] = f.sigma;
    j["constant"] = f.constant;
    j["residual_rms"] = f.residual_rms;
    j["sigma_lo"] = f.sigma_lo;
    j["sigma_hi"] = f.sigma_hi;
    j["excluded_below_floor"] = f.excluded_below_floor;
    return j;
}

std::string decay_csv(const localmatrix::DecayFit& f) {
    std::ostringstream out;
    out << "k,norm,fitted\n";
    for (size_t i = 0; i < f.ks.size(); ++i) {
        const double fitted = f.constant * std::pow(f.sigma, -f.ks[i]);
        out << f.ks[i] << ',' << fmt17(f.norms[i]) << ',' << fmt17(fitted) << '\n';
    }
    return out.str();
}

json to_json(const localmatrix::LimitPoint& lp) {
    json j;
    j["q0"] = {lp.q0.x(), lp.q0.y(), lp.q0.z()};
    j["beta0"] = {lp.beta0.x(), lp.beta0.y(), lp.beta0.z()};
    j["r_c"] = {lp.r_c.x(), lp.r_c.y(), lp.r_c.z()};
    j["k_used"] = lp.k_used;
    j["increments"] = lp.increments;
    j["rank_one_gap"] = lp.rank_one_gap;
    return j;
}

json to_json(const localmatrix::BlockCirculantMatrix& S) {
    json j;
    j["n"] = S.n;
    j["m"] = S.m;
    j["from_vertex"] = S.from_vertex;
    json blocks = json::array();
    for (const auto& b : S.blocks) {
        json rows = json::array();
        for (int r = 0; r < b.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
            rows.push_back(row);
        }
        blocks.push_back(rows);
    }
    j["blocks"] = blocks;
    return j;
}

json to_json(const mesh::ValidationReport& r) {
    json j;
    j["ok"] = r.ok();
    json issues = json::array();
    for (const auto& issue : r.issues) {
        json e;
        e["kind"] = issue.kind;
        e["indices"] = issue.indices;
        issues.push_back(e);
    }
    j["issues"] = issues;
    return j;
}

json to_json(const mesh::ElementClassification& c) {
    json j;
    j["vertex_valence"] = c.vertex_valence;
    j["face_valence"] = c.face_valence;
    j["extraordinary_vertices"] = c.extraordinary_vertices;
    j["extraordinary_faces"] = c.extraordinary_faces;
    j["regular"] = c.regular();
    return j;
}

json to_json(const analyzer::ConditionReport& r) {
    json j;
    j["version"] = 1;
    j["theorem"] = r.theorem;
    j["scheme"] = r.ns_id;
    j["reference"] = r.stat_id;
    j["valence"] = r.valence;
    json hyps = json::array();
    for (const auto& h : r.hypotheses) {
        json e;
        e["name"] = h.name;
        e["status"] = h.status;
        json ev;
        for (const auto& [k, v] : h.evidence) ev[k] = v;
        e["evidence"] = ev;
        if (!h.note.empty()) e["note"] = h.note;
        hyps.push_back(e);
    }
    j["hypotheses"] = hyps;
    j["overall"] = r.overall ? "pass" : "fail";
    return j;
}

json to_json(const analyzer::JacobianSignReport& r) {
    json j;
    j["valence"] = r.valence;
    j["depth"] = r.depth;
    j["samples"] = r.samples;
    j["positive"] = r.positive;
    j["negative"] = r.negative;
    j["min_abs_det"] = r.min_abs_det;
    j["max_abs_det"] = r.max_abs_det;
    j["lambda1_matrix"] = r.lambda1_matrix;
    j["lambda1_window"] = r.lambda1_window;
    j["constant_sign"] = r.constant_sign;
    j["pass"] = r.pass;
    return j;
}

json to_json(const analyzer::NormalEstimate& e) {
    json j;
    j["n_inf"] = {e.n_inf.x(), e.n_inf.y(), e.n_inf.z()};
    j["theta_max"] = e.theta_max;
    j["sup_dist"] = e.sup_dist;
    j["degenerate_fraction"] = e.degenerate_fraction;
    return j;
}

std::string angles_csv(const analyzer::NormalEstimate& e) {
    std::ostringstream out;
    out << "ring,theta_max,sup_dist\n";
    for (size_t i = 0; i < e.theta_max.size(); ++i) {
        out << (i + 1) << ',' << fmt17(e.theta_max[i]) << ',' << fmt17(e.sup_dist[i]) << '\n';
    }
    return out.str();
}

std::string rings_to_obj(const std::vector<analyzer::RingSample>& rings) {
    std::ostringstream out;
    char buf[128];
    for (const auto& ring : rings) {
        for (const auto& cs : ring.cells) {
            for (int r = 0; r < cs.grid.v.rows(); ++r) {
                std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", cs.grid.v(r, 0),
                              cs.grid.v(r, 1), cs.grid.v(r, 2));
                out << buf;
            }
        }
    }
    return out.str();
}

} // namespace nssubdiv::io
