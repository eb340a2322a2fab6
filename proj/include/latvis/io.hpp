#pragma once

// JSON and CSV serialization for every report type, plus the fixed-width
// float formatting used in human/CSV output (12 significant digits, so
// runs are byte-for-byte reproducible). JSON numbers that may exceed the
// double range (big integers, exact rationals) travel as decimal strings.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latvis/arith.hpp"
#include "latvis/density.hpp"
#include "latvis/densityset.hpp"
#include "latvis/enumerate.hpp"
#include "latvis/intlinalg.hpp"

namespace latvis {

using nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_string(const Int& v) { return v.str(); }

inline std::string to_string(const Rat& v) {
  return numerator(v).str() + "/" + denominator(v).str();
}

inline Int int_from_string(const std::string& s) { return Int(s); }

// --- Int / Rat ---------------------------------------------------------------

inline void to_json(json& j, const Int& v) { j = v.str(); }
inline void from_json(const json& j, Int& v) { v = Int(j.get<std::string>()); }

inline void to_json(json& j, const Rat& v) {
  j = json{{"num", numerator(v).str()}, {"den", denominator(v).str()}};
}
inline void from_json(const json& j, Rat& v) {
  v = Rat(Int(j.at("num").get<std::string>()), Int(j.at("den").get<std::string>()));
}

}  // namespace latvis

// The big-number types live in boost::multiprecision, out of ADL's reach;
// route them through explicit serializer specializations.
namespace nlohmann {
template <>
struct adl_serializer<latvis::Int> {
  static void to_json(json& j, const latvis::Int& v) { latvis::to_json(j, v); }
  static void from_json(const json& j, latvis::Int& v) { latvis::from_json(j, v); }
};
template <>
struct adl_serializer<latvis::Rat> {
  static void to_json(json& j, const latvis::Rat& v) { latvis::to_json(j, v); }
  static void from_json(const json& j, latvis::Rat& v) { latvis::from_json(j, v); }
};
}  // namespace nlohmann

namespace latvis {

// --- DensityValue ------------------------------------------------------------

inline void to_json(json& j, const DensityValue& v) {
  if (v.kind == DensityValue::Kind::FiniteProduct) {
    j = json{{"kind", "finite-product"}, {"primes", v.primes}, {"exponent", v.exponent}, {"value", v.value}};
  } else {
    j = json{{"kind", "inverse-zeta"}, {"argument", v.zeta_argument}};
  }
}

inline void from_json(const json& j, DensityValue& v) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite-product") {
    v = DensityValue::finite_product(j.at("primes").get<std::vector<uint64_t>>(), j.at("exponent").get<unsigned>());
    Rat check;
    from_json(j.at("value"), check);
    if (check != v.value) throw std::invalid_argument("finite-product value does not match its prime set");
  } else if (kind == "inverse-zeta") {
    v = DensityValue::inverse_zeta(j.at("argument").get<unsigned>());
  } else {
    throw std::invalid_argument("unknown density value kind: " + kind);
  }
}

// --- IntMatrix / SNF ----------------------------------------------------------

inline void to_json(json& j, const IntMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(i, c).str());
    rows.push_back(std::move(row));
  }
  j = std::move(rows);
}

inline void from_json(const json& j, IntMatrix& m) {
  const int rows = int(j.size());
  if (rows == 0) throw std::invalid_argument("matrix needs at least one row");
  const int cols = int(j.at(0).size());
  IntMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (int(j.at(size_t(i)).size()) != cols) throw std::invalid_argument("ragged matrix rows");
    for (int c = 0; c < cols; ++c) {
      const json& cell = j.at(size_t(i)).at(size_t(c));
      out.at(i, c) = cell.is_string() ? Int(cell.get<std::string>()) : Int(cell.get<int64_t>());
    }
  }
  m = std::move(out);
}

inline void to_json(json& j, const SnfDecomposition& s) {
  j = json{{"D", s.d}, {"U", s.u}, {"V", s.v}, {"invariant_factors", s.invariant_factors}, {"rank", s.rank}};
}

inline void from_json(const json& j, SnfDecomposition& s) {
  from_json(j.at("D"), s.d);
  from_json(j.at("U"), s.u);
  from_json(j.at("V"), s.v);
  s.invariant_factors = j.at("invariant_factors").get<std::vector<Int>>();
  s.rank = j.at("rank").get<int>();
}

// --- DensityResult ------------------------------------------------------------

inline void to_json(json& j, const DensityResult& r) {
  j = json{{"density", r.density},
           {"density_float", r.density.numeric()},
           {"codim", r.codim},
           {"ambient", r.ambient},
           {"k", r.k},
           {"anchor_gcd", r.anchor_gcd},
           {"transformed_prefix", r.transformed_prefix},
           {"snf", r.snf},
           {"path", to_string(r.path)},
           {"extrapolated", r.extrapolated}};
  if (r.point_determinant) j["point_determinant"] = *r.point_determinant;
}

inline void from_json(const json& j, DensityResult& r) {
  from_json(j.at("density"), r.density);
  r.codim = j.at("codim").get<int>();
  r.ambient = j.at("ambient").get<int>();
  r.k = j.at("k").get<unsigned>();
  from_json(j.at("anchor_gcd"), r.anchor_gcd);
  r.transformed_prefix = j.at("transformed_prefix").get<std::vector<Int>>();
  from_json(j.at("snf"), r.snf);
  const std::string path = j.at("path").get<std::string>();
  if (path == "general-hyperplane")
    r.path = DensityPath::GeneralHyperplane;
  else if (path == "dm=1")
    r.path = DensityPath::DmOne;
  else if (path == "full-snf")
    r.path = DensityPath::FullSnf;
  else if (path == "point-determinant")
    r.path = DensityPath::PointDeterminant;
  else
    throw std::invalid_argument("unknown density path: " + path);
  r.extrapolated = j.at("extrapolated").get<bool>();
  if (j.contains("point_determinant")) {
    Int d;
    from_json(j.at("point_determinant"), d);
    r.point_determinant = d;
  } else {
    r.point_determinant.reset();
  }
}

// --- BoxCount / ConvergenceTrace -----------------------------------------------

inline void to_json(json& j, const BoxCount& b) {
  j = json{{"r", b.r},     {"total", b.total},
           {"hits", b.hits}, {"ratio", b.ratio},
           {"ratio_float", b.ratio_float}, {"k", b.k}};
  if (b.b) j["b"] = *b.b;
}

inline void from_json(const json& j, BoxCount& b) {
  b.r = j.at("r").get<int64_t>();
  b.total = j.at("total").get<uint64_t>();
  b.hits = j.at("hits").get<uint64_t>();
  from_json(j.at("ratio"), b.ratio);
  b.ratio_float = j.at("ratio_float").get<double>();
  b.k = j.at("k").get<unsigned>();
  if (j.contains("b"))
    b.b = j.at("b").get<int64_t>();
  else
    b.b.reset();
}

inline void to_json(json& j, const TraceRow& t) {
  j = json{{"box", t.box}, {"deviation", t.deviation}, {"deviation_grew", t.deviation_grew}};
}

inline void from_json(const json& j, TraceRow& t) {
  from_json(j.at("box"), t.box);
  t.deviation = j.at("deviation").get<double>();
  t.deviation_grew = j.at("deviation_grew").get<bool>();
}

inline void to_json(json& j, const ConvergenceTrace& t) {
  j = json{{"rows", t.rows},
           {"predicted", t.predicted},
           {"final_deviation", t.final_deviation},
           {"any_blowup", t.any_blowup}};
}

inline void from_json(const json& j, ConvergenceTrace& t) {
  t.rows = j.at("rows").get<std::vector<TraceRow>>();
  from_json(j.at("predicted"), t.predicted);
  t.final_deviation = j.at("final_deviation").get<double>();
  t.any_blowup = j.at("any_blowup").get<bool>();
}

// --- density set reports --------------------------------------------------------

inline void to_json(json& j, const GreedyStep& s) {
  j = json{{"prime", s.prime}, {"partial", s.partial}, {"partial_float", s.partial_float}, {"residual", s.residual}};
}

inline void from_json(const json& j, GreedyStep& s) {
  s.prime = j.at("prime").get<uint64_t>();
  from_json(j.at("partial"), s.partial);
  s.partial_float = j.at("partial_float").get<double>();
  s.residual = j.at("residual").get<double>();
}

inline void to_json(json& j, const GreedyApproximation& g) {
  j = json{{"target", g.target},
           {"target_exact", g.target_exact},
           {"n", g.n},
           {"steps", g.steps},
           {"reached_exact", g.reached_exact},
           {"unreachable", g.unreachable},
           {"prime_bound_exhausted", g.prime_bound_exhausted},
           {"prime_bound", g.prime_bound}};
}

inline void from_json(const json& j, GreedyApproximation& g) {
  g.target = j.at("target").get<double>();
  from_json(j.at("target_exact"), g.target_exact);
  g.n = j.at("n").get<unsigned>();
  g.steps = j.at("steps").get<std::vector<GreedyStep>>();
  g.reached_exact = j.at("reached_exact").get<bool>();
  g.unreachable = j.at("unreachable").get<bool>();
  g.prime_bound_exhausted = j.at("prime_bound_exhausted").get<bool>();
  g.prime_bound = j.at("prime_bound").get<uint64_t>();
}

inline void to_json(json& j, const HyperplaneEquation& h) { j = json{{"a", h.a}, {"b", h.b}}; }

inline void from_json(const json& j, HyperplaneEquation& h) {
  h.a = j.at("a").get<std::vector<Int>>();
  from_json(j.at("b"), h.b);
}

inline void to_json(json& j, const GapCertificate& g) {
  j = json{{"n", g.n},
           {"prime", g.prime},
           {"left", g.left},
           {"left_float", g.left_float},
           {"right_lo", g.right_lo},
           {"right_hi", g.right_hi},
           {"right_estimate", g.right_estimate},
           {"margin_lo", g.margin_lo},
           {"zeta_route", g.zeta_route}};
}

inline void from_json(const json& j, GapCertificate& g) {
  g.n = j.at("n").get<unsigned>();
  g.prime = j.at("prime").get<uint64_t>();
  from_json(j.at("left"), g.left);
  g.left_float = j.at("left_float").get<double>();
  g.right_lo = j.at("right_lo").get<double>();
  g.right_hi = j.at("right_hi").get<double>();
  g.right_estimate = j.at("right_estimate").get<double>();
  g.margin_lo = j.at("margin_lo").get<double>();
  g.zeta_route = j.at("zeta_route").get<double>();
}

inline void to_json(json& j, const IntervalEndpoint& e) {
  j = json{{"coeff", e.coeff}, {"zeta_power", e.zeta_power}, {"zeta_arg", e.zeta_arg}, {"value", e.value}};
}

inline void from_json(const json& j, IntervalEndpoint& e) {
  from_json(j.at("coeff"), e.coeff);
  e.zeta_power = j.at("zeta_power").get<unsigned>();
  e.zeta_arg = j.at("zeta_arg").get<unsigned>();
  e.value = j.at("value").get<double>();
}

inline void to_json(json& j, const DensityInterval& iv) { j = json{{"lo", iv.lo}, {"hi", iv.hi}}; }

inline void from_json(const json& j, DensityInterval& iv) {
  from_json(j.at("lo"), iv.lo);
  from_json(j.at("hi"), iv.hi);
}

inline void to_json(json& j, const IntervalUnion& u) {
  j = json{{"n", u.n}, {"certified", u.certified}, {"note", u.note}, {"intervals", u.intervals}};
}

inline void from_json(const json& j, IntervalUnion& u) {
  u.n = j.at("n").get<unsigned>();
  u.certified = j.at("certified").get<bool>();
  u.note = j.at("note").get<std::string>();
  u.intervals = j.at("intervals").get<std::vector<DensityInterval>>();
}

inline void to_json(json& j, const SampleEntry& s) {
  j = json{{"b", s.b}, {"primes", s.primes}, {"value", s.value}, {"value_float", s.value_float}};
}

inline void from_json(const json& j, SampleEntry& s) {
  from_json(j.at("b"), s.b);
  s.primes = j.at("primes").get<std::vector<uint64_t>>();
  from_json(j.at("value"), s.value);
  s.value_float = j.at("value_float").get<double>();
}

// --- CSV ------------------------------------------------------------------------

/// Convergence CSV: r,total,hits,ratio,predicted,deviation
inline void write_trace_csv(std::ostream& os, const ConvergenceTrace& t) {
  os << "r,total,hits,ratio,predicted,deviation\n";
  const double predicted = t.predicted.numeric();
  for (const TraceRow& row : t.rows) {
    os << row.box.r << ',' << row.box.total << ',' << row.box.hits << ',' << fmt_double(row.box.ratio_float) << ','
       << fmt_double(predicted) << ',' << fmt_double(row.deviation) << '\n';
  }
}

/// Sample CSV: b,primes,value_num,value_den,value (primes joined by '*',
/// empty set printed as 1)
inline void write_sample_csv(std::ostream& os, const std::vector<SampleEntry>& entries) {
  os << "b,primes,value_num,value_den,value\n";
  for (const SampleEntry& e : entries) {
    os << e.b.str() << ',';
    if (e.primes.empty()) {
      os << '1';
    } else {
      for (size_t i = 0; i < e.primes.size(); ++i) {
        if (i) os << '*';
        os << e.primes[i];
      }
    }
    os << ',' << numerator(e.value).str() << ',' << denominator(e.value).str() << ',' << fmt_double(e.value_float)
       << '\n';
  }
}

}  // namespace latvis
