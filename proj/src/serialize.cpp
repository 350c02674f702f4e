#include "mdim/serialize.hpp"

#include "mdim/errors.hpp"

namespace mdim {

std::string canonical_dump(const json& j) { return j.dump(); }

json to_json(const Rational& r) { return r.to_string(); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return Rational::parse(j.dump());
  throw UsageError("expected a rational, got " + j.dump());
}

json to_json(const ExtInt& v) {
  if (v.is_neg_inf()) return "-inf";
  return v.value();
}

json to_json(const ExtRational& v) { return v.to_string(); }

ExtInt ext_int_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "-inf") return ExtInt::neg_inf();
  if (j.is_number_integer()) return ExtInt(j.get<std::int64_t>());
  throw UsageError("expected an integer or \"-inf\", got " + j.dump());
}

json complex_to_json(const SimplicialComplex& K) {
  json j;
  j["ambient_dim"] = K.ambient_dim();
  if (K.grid()) j["grid"] = *K.grid();
  json verts = json::array();
  for (const auto& p : K.points()) {
    json q = json::array();
    for (const auto& x : p) q.push_back(x.to_string());
    verts.push_back(std::move(q));
  }
  j["vertices"] = std::move(verts);
  j["simplices"] = K.simplices();
  return j;
}

SimplicialComplex complex_from_json(const json& j, std::size_t cap) {
  try {
    const int d = j.at("ambient_dim").get<int>();
    std::vector<Point> pts;
    for (const auto& q : j.at("vertices")) {
      Point p;
      for (const auto& x : q) p.push_back(rational_from_json(x));
      pts.push_back(std::move(p));
    }
    auto simps = j.at("simplices").get<std::vector<Simplex>>();
    SimplicialComplex K(d, std::move(pts), simps, cap);
    if (j.contains("grid")) K.set_grid(j.at("grid").get<int>());
    return K;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed complex: ") + e.what());
  }
}

json set_to_json(const SimplexSet& s) { return s.ids(); }

json cover_to_json(const Cover& c) {
  json elems = json::array();
  for (const auto& e : c.elements()) elems.push_back(e.ids());
  return json{{"elements", elems}};
}

Cover cover_from_json(const ComplexPtr& K, const json& j) {
  try {
    std::vector<OpenSimplexSet> elems;
    for (const auto& e : j.at("elements")) {
      elems.emplace_back(*K, SimplexSet(K->num_simplices(), e.get<std::vector<int>>()));
    }
    return Cover(K, std::move(elems));
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed cover: ") + e.what());
  }
}

json restriction_to_json(const Restriction& r) {
  json j{{"kind", to_string(r.kind())}};
  if (r.kind() == Restriction::Kind::Closed || r.kind() == Restriction::Kind::Open) {
    j["simplices"] = r.payload().ids();
  }
  return j;
}

Restriction restriction_from_json(const SimplicialComplex& K, const json& j) {
  const std::string kind = j.value("kind", "whole");
  if (kind == "whole") return Restriction::whole();
  if (kind == "empty") return Restriction::empty();
  SimplexSet s(K.num_simplices(), j.at("simplices").get<std::vector<int>>());
  if (kind == "closed") return Restriction::closed(K, std::move(s));
  if (kind == "open") return Restriction::open(K, std::move(s));
  throw UsageError("unknown restriction kind '" + kind + "'");
}

json box_cover_to_json(const BoxCover& c) {
  json elems = json::array();
  for (const auto& e : c.elements()) {
    json boxes = json::array();
    for (const auto& b : e) {
      json factors = json::array();
      for (const auto& f : b) {
        std::vector<int> codes;
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (f[i]) codes.push_back(static_cast<int>(i));
        }
        factors.push_back(codes);
      }
      boxes.push_back(std::move(factors));
    }
    elems.push_back(std::move(boxes));
  }
  return json{{"resolution", c.resolution()}, {"dim", c.dim()}, {"elements", elems}};
}

BoxCover box_cover_from_json(const json& j) {
  try {
    const int m = j.at("resolution").get<int>();
    if (j.contains("kind")) {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "distinguishing") return distinguishing_interval_cover(m);
      if (kind == "standard_path") return standard_path_cover(m);
      throw UsageError("unknown cover kind '" + kind + "'");
    }
    if (j.contains("intervals")) {
      std::vector<GridInterval> ivs;
      for (const auto& iv : j.at("intervals")) {
        ivs.push_back(GridInterval{iv.at("lo").get<int>(), iv.at("hi").get<int>(), iv.value("lo_closed", true),
                                   iv.value("hi_closed", true)});
      }
      return BoxCover::intervals(m, ivs);
    }
    const int d = j.at("dim").get<int>();
    std::vector<std::vector<Box>> elems;
    for (const auto& e : j.at("elements")) {
      std::vector<Box> boxes;
      for (const auto& b : e) {
        Box box;
        for (const auto& f : b) {
          CellSet cs(2 * m + 1, 0);
          for (int code : f.get<std::vector<int>>()) {
            if (code < 0 || code > 2 * m) throw UsageError("cell code out of range");
            cs[code] = 1;
          }
          box.push_back(std::move(cs));
        }
        boxes.push_back(std::move(box));
      }
      elems.push_back(std::move(boxes));
    }
    return BoxCover(m, d, std::move(elems));
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed box cover: ") + e.what());
  }
}

json dim_result_to_json(const DimResult& r, bool with_witness) {
  json j{{"value", to_json(r.value)},
         {"lower_bound", to_json(r.lower_bound)},
         {"level", r.level},
         {"exact", r.exact},
         {"nodes", r.stats.nodes}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  if (with_witness && r.witness) j["witness"] = *r.witness;
  if (r.level_complex) {
    j["level_vertices"] = r.level_complex->num_vertices();
    j["level_simplices"] = r.level_complex->num_simplices();
  }
  return j;
}

json inequality_report_to_json(const InequalityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e{{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(std::move(e));
  }
  return json{{"checks", checks}, {"all_pass", r.all_pass()}};
}

}  // namespace mdim
