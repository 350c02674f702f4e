#pragma once

#include <string>

#include <json.hpp>

#include "mdim/box_cover.hpp"
#include "mdim/complex.hpp"
#include "mdim/dim_optimizer.hpp"

namespace mdim {

using json = nlohmann::json;

/// Sorted keys, no whitespace: byte-stable for equal values.
std::string canonical_dump(const json& j);

json to_json(const Rational& r);
Rational rational_from_json(const json& j);
/// Integers stay JSON integers; -inf becomes the string "-inf".
json to_json(const ExtInt& v);
json to_json(const ExtRational& v);
ExtInt ext_int_from_json(const json& j);

json complex_to_json(const SimplicialComplex& K);
SimplicialComplex complex_from_json(const json& j, std::size_t cap = kDefaultSimplexCap);

json set_to_json(const SimplexSet& s);
json cover_to_json(const Cover& c);
Cover cover_from_json(const ComplexPtr& K, const json& j);
json restriction_to_json(const Restriction& r);
Restriction restriction_from_json(const SimplicialComplex& K, const json& j);

json box_cover_to_json(const BoxCover& c);
/// Accepts {"kind":"distinguishing"|"standard_path","resolution":m},
/// {"resolution":m,"intervals":[{"lo","hi","lo_closed","hi_closed"}...]}
/// or the full {"resolution","dim","elements"} form.
BoxCover box_cover_from_json(const json& j);

json dim_result_to_json(const DimResult& r, bool with_witness = true);
json inequality_report_to_json(const InequalityReport& r);

}  // namespace mdim
