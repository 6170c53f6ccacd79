#pragma once

#include "carnot/common.hpp"
#include "carnot/format.hpp"
#include "carnot/group.hpp"
#include "carnot/rational.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace carnot
{

struct InputsDigest
{
  std::string group;
  std::string map;
  std::string geometry;
  double p = 0.0;
  double q = 0.0;
  int resolution = 0;
};

// One numerical check of an inequality (lhs <= rhs (1 + slack)) or of an
// identity between two estimates (agreement within error bars or a relative
// gap below slack). Raw numbers are always retained.
struct VerificationReport
{
  enum class Kind
  {
    inequality,
    agreement,
  };

  std::string id;
  std::string property;
  Kind kind = Kind::inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  double slack = 0.10;
  bool pass = false;
  InputsDigest inputs;
  std::string notes;
  std::string reason;  // machine-readable failure reason, empty when the check ran

  // Recomputes pass from the stored numbers.
  bool evaluate() const
  {
    if (!reason.empty()) return false;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) return false;
    if (kind == Kind::inequality) return lhs <= rhs * (1.0 + slack);
    const double gap = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return gap <= lhs_error + rhs_error || gap <= slack * scale;
  }

  // Fraction of the allowed slack that was used (inequalities only).
  double slack_used() const
  {
    if (rhs <= 0.0) return lhs <= 0.0 ? 0.0 : INFINITY;
    return std::max(0.0, lhs / rhs - 1.0) / slack;
  }

  void finish() { pass = evaluate(); }
};

inline const char* report_csv_header()
{
  return "id,property,kind,group,map,geometry,p,q,resolution,lhs,lhs_error,rhs,rhs_error,slack,pass,reason,notes";
}

inline std::string csv_escape(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline void write_report_row(std::ostream& os, const VerificationReport& r)
{
  os << csv_escape(r.id) << ',' << csv_escape(r.property) << ','
     << (r.kind == VerificationReport::Kind::inequality ? "inequality" : "agreement") << ','
     << csv_escape(r.inputs.group) << ',' << csv_escape(r.inputs.map) << ',' << csv_escape(r.inputs.geometry) << ','
     << format_double(r.inputs.p) << ',' << format_double(r.inputs.q) << ',' << r.inputs.resolution << ','
     << format_double(r.lhs) << ',' << format_double(r.lhs_error) << ',' << format_double(r.rhs) << ','
     << format_double(r.rhs_error) << ',' << format_double(r.slack) << ',' << (r.pass ? 1 : 0) << ','
     << csv_escape(r.reason) << ',' << csv_escape(r.notes) << '\n';
}

// Exponent family used by the push-forward estimates:
//   r = q / (q - (nu - 1)),  s = p / (p - (nu - 1)),  1/kappa = 1/q - 1/p.
struct Exponents
{
  Rational p, q, r, s;
  std::optional<Rational> kappa;  // nullopt when p == q (kappa = infinity)
  int nu = 0;
  double weight = 1.0;  // Lambda
  double m_fc = 1.0;    // M(f, C)

  static Exponents make(const Group& g, double p, double q)
  {
    Exponents e;
    e.p = Rational::from_double(p);
    e.q = Rational::from_double(q);
    e.nu = g.hom_dim();
    require(e.q <= e.p, ErrorCode::precondition, "exponents need q <= p");
    const Rational nu1(e.nu - 1);
    require(nu1 < e.q, ErrorCode::precondition,
            "exponents need q > nu - 1 = " + std::to_string(e.nu - 1) + " (got q = " + e.q.str() + ")");
    e.r = e.q / (e.q - nu1);
    e.s = e.p / (e.p - nu1);
    e.kappa = kappa_of(e.p, e.q);
    return e;
  }

  static std::optional<Rational> kappa_of(Rational p, Rational q)
  {
    if (p == q) return std::nullopt;
    return (q.reciprocal() - p.reciprocal()).reciprocal();
  }
};

}  // namespace carnot
