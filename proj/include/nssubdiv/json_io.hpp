#pragma once

// JSON and CSV serialization of the analysis artifacts. All writers are
// deterministic: insertion-ordered keys and plain double round-trips, so
// identical inputs produce byte-identical output.

#include <string>

#include "json.hpp"
#include "nssubdiv/analyzer.hpp"
#include "nssubdiv/localmatrix.hpp"
#include "nssubdiv/mesh.hpp"
#include "nssubdiv/symbols.hpp"

namespace nssubdiv::io {

using json = nlohmann::ordered_json;

json to_json(const symbols::Mask2D& m);
symbols::Mask2D mask_from_json(const json& j);

json to_json(const symbols::EquivalenceEstimate& e);
std::string equivalence_csv(const symbols::EquivalenceEstimate& e);

json to_json(const localmatrix::Spectrum& s);
json to_json(const localmatrix::DecayFit& f);
std::string decay_csv(const localmatrix::DecayFit& f);
json to_json(const localmatrix::LimitPoint& lp);
json to_json(const localmatrix::BlockCirculantMatrix& S);

json to_json(const mesh::ValidationReport& r);
json to_json(const mesh::ElementClassification& c);

json to_json(const analyzer::ConditionReport& r);
json to_json(const analyzer::JacobianSignReport& r);
json to_json(const analyzer::NormalEstimate& e);
std::string angles_csv(const analyzer::NormalEstimate& e);

// Ring samples as an OBJ point cloud (`v` records only).
std::string rings_to_obj(const std::vector<analyzer::RingSample>& rings);

} // namespace nssubdiv::io
