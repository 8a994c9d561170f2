#pragma once

// JSON and CSV glue for all file formats: lattices, short-vector reports,
// wedge classes, orbit specs, search results, covers, and certification
// reports. Numeric output uses 12 significant decimal digits so repeated
// runs diff cleanly.

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "covering.hpp"
#include "enumeration.hpp"
#include "exterior.hpp"
#include "lattice.hpp"
#include "lattice_ops.hpp"
#include "orbit.hpp"

namespace wellround::io {

using json = nlohmann::ordered_json;

// Round to 12 significant decimal digits (the output convention).
double round_sig(double x);
json num(double x);
json vec(const Eigen::VectorXd& v);
json mat(const Eigen::MatrixXd& m);

json parse(const std::string& text);  // throws parse_error

Lattice lattice_from_json(const json& j);
json lattice_to_json(const Lattice& x);

json report_to_json(const ShortVectorReport& rep);
json cover_membership_to_json(const CoverMembership& cm);

WedgeClass wedge_from_json(const json& j);
json wedge_to_json(const WedgeClass& w);
json stabilizer_to_json(const StabilizerSubspace& s);

// {"n":..., "rows":[[...]]} -> complete chain flag.
Flag flag_from_json(const json& j);
json flag_analysis_to_json(const std::vector<MultiIndex>& nested, const FlagCodimReport& codim);

// {"blocks":[{"type":"unit"}|{"type":"quadratic","D":...}]}
std::pair<Lattice, ClosedOrbitStructure> orbit_from_spec_json(const json& j);
json orbit_to_json(const Lattice& x, const ClosedOrbitStructure& s);
json search_result_to_json(const SearchResult& r);
std::string trace_csv(const SearchResult& r);

GridDomain domain_from_json(const json& j);
Cover cover_from_json(const json& j);
// Declared missed faces per element ([-1,-1] when absent).
std::vector<std::array<int, 2>> face_misses_from_json(const json& j);
bool domain_is_kkm(const json& j);

json certify_report_to_json(const CertifyReport& rep);
json kkm_report_to_json(const KkmReport& rep);
json order_report_to_json(const OrderReport& rep);
std::string heatmap_csv(const GridCover& gc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace wellround::io
