#include "scorecraft/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace scorecraft {

const char* row_kind_name(RowKind kind) {
  switch (kind) {
    case RowKind::fixed: return "fixed";
    case RowKind::centering: return "centering";
    case RowKind::cross: return "cross";
    case RowKind::group: return "group";
    case RowKind::inweight: return "inweight";
    case RowKind::pattern: return "pattern";
  }
  return "?";
}

std::string RowProvenance::describe() const {
  std::string out = row_kind_name(kind);
  out += " [";
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (i) out += ' ';
    out += attributes[i] == 0 ? std::string("intercept") : "att" + std::to_string(attributes[i]);
  }
  out += ']';
  return out;
}

ConstraintSet ConstraintSet::none(Eigen::Index q) {
  ConstraintSet cs;
  cs.aeq.resize(0, q);
  cs.beq.resize(0);
  cs.a.resize(0, q);
  cs.b.resize(0);
  return cs;
}

void ConstraintSet::validate() const {
  require_size("constraints: A columns", a.cols(), aeq.cols());
  require_size("constraints: beq", beq.size(), aeq.rows());
  require_size("constraints: b", b.size(), a.rows());
  require_size("constraints: equality provenance", static_cast<Eigen::Index>(eq_rows.size()), aeq.rows());
  require_size("constraints: inequality provenance", static_cast<Eigen::Index>(ineq_rows.size()), a.rows());
}

CenteringPolicy CenteringPolicy::weighted(const Matrix& design, const Vector& w) {
  require_size("centering weights", w.size(), design.rows());
  CenteringPolicy p;
  p.mode = CenteringMode::weighted_sum_zero;
  p.attribute_counts = design.rightCols(design.cols() - 1).transpose() * w;
  return p;
}

namespace {

struct RowBuilder {
  Eigen::Index q;
  std::vector<Vector> rows;
  std::vector<double> rhs;
  std::vector<RowProvenance> prov;

  void add(Vector row, double value, RowProvenance p) {
    rows.push_back(std::move(row));
    rhs.push_back(value);
    prov.push_back(std::move(p));
  }

  void emit(Matrix& m, Vector& v, std::vector<RowProvenance>& out) const {
    m.setZero(static_cast<Eigen::Index>(rows.size()), q);
    v.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      v[static_cast<Eigen::Index>(r)] = rhs[r];
    }
    out = prov;
  }
};

}  // namespace

ConstraintSet compile_constraints(const ScorecardSpec& spec, const CenteringPolicy& policy,
                                  const std::vector<InWeight>& inweights) {
  const Eigen::Index q = spec.q();
  RowBuilder eq{q, {}, {}, {}};
  RowBuilder ineq{q, {}, {}, {}};
  auto check_att = [&](int owner, int att) {
    if (att < 1 || att >= q) {
      throw ValidationError("constraints: attribute " + std::to_string(owner) +
                            " references out-of-range attribute " + std::to_string(att));
    }
  };

  std::map<int, double> fixed_values;  // coefficient index -> pinned value
  for (const auto& ch : spec.characteristics()) {
    for (const auto& attr : ch.attributes) {
      const int a = attr.index;
      for (const auto& t : attr.tag.terms) {
        Vector row = Vector::Zero(q);
        switch (t.op) {
          case TermOp::fixed_to: {
            auto [it, inserted] = fixed_values.emplace(a, t.value);
            if (!inserted) {
              if (it->second != t.value) {
                throw ValidationError("constraints: attribute " + std::to_string(a) +
                                      " has contradictory fixed values");
              }
              continue;
            }
            row[a] = 1.0;
            eq.add(std::move(row), t.value, {RowKind::fixed, {a}});
            break;
          }
          case TermOp::greater_than:
            check_att(a, t.att);
            row[t.att] = 1.0;
            row[a] = -1.0;
            ineq.add(std::move(row), 0.0, {RowKind::pattern, {a, t.att}});
            break;
          case TermOp::less_than:
            check_att(a, t.att);
            row[a] = 1.0;
            row[t.att] = -1.0;
            ineq.add(std::move(row), 0.0, {RowKind::pattern, {a, t.att}});
            break;
          case TermOp::tied_to:
            check_att(a, t.att);
            row[a] = 1.0;
            row[t.att] = -1.0;
            eq.add(std::move(row), 0.0, {RowKind::cross, {a, t.att}});
            break;
        }
      }
    }
  }

  if (policy.mode == CenteringMode::weighted_sum_zero) {
    require_size("centering attribute counts", policy.attribute_counts.size(), q - 1);
    for (const auto& ch : spec.characteristics()) {
      Vector row = Vector::Zero(q);
      RowProvenance p{RowKind::centering, {}};
      for (const auto& attr : ch.attributes) {
        row[attr.index] = policy.attribute_counts[attr.index - 1];
        p.attributes.push_back(attr.index);
      }
      if (row.cwiseAbs().maxCoeff() == 0.0) continue;  // characteristic never observed
      eq.add(std::move(row), 0.0, std::move(p));
    }
  }

  for (const auto& iw : inweights) {
    if (iw.coefficient < 1 || iw.coefficient > q) {
      throw ValidationError("constraints: in-weight coefficient " + std::to_string(iw.coefficient) +
                            " outside 1.." + std::to_string(q));
    }
    if (!std::isfinite(iw.value)) throw ValidationError("constraints: in-weight value must be finite");
    auto [it, inserted] = fixed_values.emplace(iw.coefficient - 1, iw.value);
    if (!inserted && it->second != iw.value) {
      throw ValidationError("constraints: in-weight on coefficient " + std::to_string(iw.coefficient) +
                            " contradicts another fixed value");
    }
    Vector row = Vector::Zero(q);
    row[iw.coefficient - 1] = 1.0;
    eq.add(std::move(row), iw.value, {RowKind::inweight, {iw.coefficient - 1}});
  }

  ConstraintSet cs;
  eq.emit(cs.aeq, cs.beq, cs.eq_rows);
  ineq.emit(cs.a, cs.b, cs.ineq_rows);
  return cs;
}

ConstraintResiduals constraint_residuals(const ConstraintSet& cs, const Vector& beta) {
  cs.validate();
  require_size("constraint_residuals beta", beta.size(), cs.q());
  ConstraintResiduals r;
  if (cs.equality_count() > 0) r.eq = (cs.aeq * beta - cs.beq).cwiseAbs().maxCoeff();
  if (cs.inequality_count() > 0) r.ineq = std::max(0.0, (cs.a * beta - cs.b).maxCoeff());
  return r;
}

FeasibilityReport check_feasible(const ConstraintSet& cs, const Vector& beta, double tol) {
  FeasibilityReport rep;
  rep.residuals = constraint_residuals(cs, beta);
  const Vector eq_res = cs.aeq * beta - cs.beq;
  for (Eigen::Index r = 0; r < eq_res.size(); ++r) {
    if (std::abs(eq_res[r]) > tol) {
      rep.violations.push_back({true, r, std::abs(eq_res[r]), cs.eq_rows[static_cast<std::size_t>(r)]});
    }
  }
  const Vector in_res = cs.a * beta - cs.b;
  for (Eigen::Index r = 0; r < in_res.size(); ++r) {
    if (in_res[r] > tol) {
      rep.violations.push_back({false, r, in_res[r], cs.ineq_rows[static_cast<std::size_t>(r)]});
    }
  }
  rep.feasible = rep.violations.empty();
  return rep;
}

std::string FeasibilityReport::describe() const {
  std::ostringstream os;
  os << (feasible ? "feasible" : "infeasible") << " (eq residual " << residuals.eq << ", ineq violation "
     << residuals.ineq << ")\n";
  for (const auto& v : violations) {
    os << "  " << (v.equality ? "eq" : "ineq") << " row " << v.row + 1 << ' ' << v.provenance.describe()
       << " violated by " << v.amount << '\n';
  }
  return os.str();
}

std::string format_provenance(const ConstraintSet& cs) {
  std::ostringstream os;
  auto dump = [&](const char* type, const Matrix& m, const Vector& rhs, const std::vector<RowProvenance>& prov) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      os << type << '\t' << r + 1 << '\t' << prov[static_cast<std::size_t>(r)].describe() << "\trhs=" << rhs[r]
         << '\n';
    }
  };
  os << "type\trow\tprovenance\trhs\n";
  dump("eq", cs.aeq, cs.beq, cs.eq_rows);
  dump("ineq", cs.a, cs.b, cs.ineq_rows);
  return os.str();
}

}  // namespace scorecraft
