#include "scorecraft/constraints.hpp"

#include "scorecraft/csv.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace scorecraft;

namespace {

const char* kChar170 =
    "char,att,label,kind,lo,hi,categories,constraint\n"
    "char170,1,-9999999,special,-9999999,,,= 0\n"
    "char170,2,0-<5,interval,0,5,,> 3\n"
    "char170,3,5-<25,interval,5,25,,> 4\n"
    "char170,4,25-<35,interval,25,35,,> 5\n"
    "char170,5,35-<300,interval,35,300,,> 6\n"
    "char170,6,300-High,interval,300,,,\n"
    "char170,7,NO INFORMATION,noinfo,,,,= 0\n";

// Counts "= 0" and ordering terms straight from the fixture text.
std::pair<int, int> count_fixture_tags() {
  const auto rows = csv::parse(csv::read_file(testkit::fixture_path("scorecard.csv")));
  int fixed = 0;
  int ordering = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string& tag = rows[r].cells.back();
    for (std::size_t i = 0; i < tag.size(); ++i) {
      if (tag[i] == '=') ++fixed;
      if (tag[i] == '<' || tag[i] == '>') ++ordering;
    }
  }
  return {fixed, ordering};
}

}  // namespace

TEST(CompileConstraints, Char170PatternRow) {
  const auto cs = compile_constraints(parse_spec(kChar170));
  ASSERT_EQ(cs.inequality_count(), 4);
  ASSERT_EQ(cs.equality_count(), 2);
  // "2 > 3" becomes S3 - S2 <= 0.
  Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(8);
  expected[2] = -1.0;
  expected[3] = 1.0;
  EXPECT_EQ(cs.a.row(0), expected);
  EXPECT_EQ(cs.b, Vector::Zero(4));
  EXPECT_EQ(cs.ineq_rows[0].kind, RowKind::pattern);
  EXPECT_EQ(cs.ineq_rows[0].attributes, (std::vector<int>{2, 3}));
  EXPECT_EQ(cs.aeq(0, 1), 1.0);
  EXPECT_EQ(cs.aeq(1, 7), 1.0);
}

TEST(CompileConstraints, EmptyTags) {
  const auto cs = compile_constraints(parse_spec(
      "char,att,label,kind,lo,hi,categories,constraint\nc,1,a,interval,,0,,\nc,2,NO INFORMATION,noinfo,,,,\n"));
  EXPECT_EQ(cs.equality_count(), 0);
  EXPECT_EQ(cs.inequality_count(), 0);
  EXPECT_EQ(cs.q(), 3);
}

TEST(CompileConstraints, FixtureCounts) {
  const auto [fixed_tags, ordering_tags] = count_fixture_tags();
  EXPECT_EQ(ordering_tags, 106);
  const auto cs = compile_constraints(testkit::fixture_spec());
  EXPECT_EQ(cs.inequality_count(), 106);
  EXPECT_EQ(cs.equality_count(), fixed_tags);
  for (const auto& r : cs.eq_rows) EXPECT_EQ(r.kind, RowKind::fixed);
}

TEST(CompileConstraints, RowShapesOnFixture) {
  const auto cs = compile_constraints(testkit::fixture_spec());
  for (Eigen::Index r = 0; r < cs.a.rows(); ++r) {
    EXPECT_EQ(cs.a(r, 0), 0.0);
    EXPECT_EQ((cs.a.row(r).array() != 0.0).count(), 2);
    EXPECT_EQ(cs.a.row(r).sum(), 0.0);
  }
  for (Eigen::Index r = 0; r < cs.aeq.rows(); ++r) {
    EXPECT_EQ(cs.aeq(r, 0), 0.0);
    EXPECT_EQ((cs.aeq.row(r).array() != 0.0).count(), 1);
    EXPECT_EQ(cs.aeq.row(r).sum(), 1.0);
  }
}

TEST(CompileConstraints, CrossRestriction) {
  const auto cs = compile_constraints(parse_spec(
      "char,att,label,kind,lo,hi,categories,constraint\n"
      "c,1,a,interval,,0,,~ 2\nc,2,b,interval,0,,,\nc,3,NO INFORMATION,noinfo,,,,\n"));
  ASSERT_EQ(cs.equality_count(), 1);
  EXPECT_EQ(cs.eq_rows[0].kind, RowKind::cross);
  EXPECT_EQ(cs.aeq(0, 1), 1.0);
  EXPECT_EQ(cs.aeq(0, 2), -1.0);
}

TEST(CompileConstraints, ContradictoryFixedValues) {
  const char* spec =
      "char,att,label,kind,lo,hi,categories,constraint\n"
      "c,1,a,interval,,0,,= 0 & = 1\nc,2,NO INFORMATION,noinfo,,,,\n";
  EXPECT_THROW(compile_constraints(parse_spec(spec)), ValidationError);
  // An in-weight contradicting a tag is also caught.
  EXPECT_THROW(compile_constraints(parse_spec(kChar170), {}, {{2, 0.5}}), ValidationError);
}

TEST(CompileConstraints, InterceptInWeight) {
  const auto cs = compile_constraints(parse_spec(kChar170), {}, {{1, -0.1026}});
  ASSERT_EQ(cs.equality_count(), 3);
  EXPECT_EQ(cs.eq_rows.back().kind, RowKind::inweight);
  EXPECT_EQ(cs.aeq(2, 0), 1.0);
  EXPECT_EQ(cs.beq[2], -0.1026);
  EXPECT_THROW(compile_constraints(parse_spec(kChar170), {}, {{9, 1.0}}), ValidationError);
}

TEST(CompileConstraints, WeightedCentering) {
  const auto spec = parse_spec(kChar170);
  Matrix x = Matrix::Zero(4, 8);
  x.col(0).setOnes();
  x(0, 2) = x(1, 2) = x(2, 3) = x(3, 6) = 1.0;
  const Vector w = (Vector(4) << 1, 2, 1, 1).finished();
  const auto cs = compile_constraints(spec, CenteringPolicy::weighted(x, w));
  ASSERT_EQ(cs.equality_count(), 3);
  EXPECT_EQ(cs.eq_rows[2].kind, RowKind::centering);
  Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(8);
  expected[2] = 3.0;
  expected[3] = 1.0;
  expected[6] = 1.0;
  EXPECT_EQ(cs.aeq.row(2), expected);
}

TEST(ConstraintResiduals, Examples) {
  ConstraintSet cs = ConstraintSet::none(2);
  cs.a.resize(1, 2);
  cs.a << 1, -1;
  cs.b = Vector::Zero(1);
  cs.ineq_rows.push_back({RowKind::pattern, {1, 2}});
  EXPECT_EQ(constraint_residuals(cs, Vector::Zero(2)).ineq, 0.0);
  EXPECT_EQ(constraint_residuals(cs, (Vector(2) << 0, 1).finished()).ineq, 0.0);
  EXPECT_EQ(constraint_residuals(cs, (Vector(2) << 1, 0).finished()).ineq, 1.0);
  EXPECT_EQ(constraint_residuals(cs, Vector::Zero(2)).eq, 0.0);
}

TEST(ConstraintResiduals, TableWeightsSatisfyTheirTags) {
  const auto spec = testkit::fixture_spec();
  const auto cs = compile_constraints(spec);
  const auto rows = csv::parse(csv::read_file(testkit::fixture_path("reference_weights.csv")));
  for (std::size_t col = 1; col < rows.front().cells.size(); ++col) {
    Vector beta = Vector::Zero(spec.q());
    for (std::size_t r = 1; r < rows.size(); ++r) {
      double att = 0.0;
      double v = 0.0;
      ASSERT_TRUE(csv::parse_double(rows[r].cells[0], att));
      ASSERT_TRUE(csv::parse_double(rows[r].cells[col], v));
      beta[static_cast<Eigen::Index>(att)] = v;
    }
    const auto res = constraint_residuals(cs, beta);
    EXPECT_EQ(res.ineq, 0.0) << rows.front().cells[col];
    EXPECT_EQ(res.eq, 0.0) << rows.front().cells[col];
  }
}

TEST(CheckFeasible, ReportsPatternProvenance) {
  const auto cs = compile_constraints(parse_spec(kChar170));
  Vector beta = Vector::Zero(8);
  EXPECT_TRUE(check_feasible(cs, beta, 1e-8).feasible);
  EXPECT_TRUE(check_feasible(cs, beta, 1e-8).violations.empty());
  beta[4] = 0.5;  // S4 above S3 violates "3 > 4"
  const auto report = check_feasible(cs, beta, 1e-8);
  EXPECT_FALSE(report.feasible);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].provenance.kind, RowKind::pattern);
  EXPECT_EQ(report.violations[0].provenance.attributes, (std::vector<int>{3, 4}));
  EXPECT_NE(report.describe().find("att3"), std::string::npos);
  EXPECT_NE(report.describe().find("att4"), std::string::npos);
}

TEST(CheckFeasible, StrictOrderingsImplyFeasibility) {
  const auto spec = testkit::fixture_spec();
  const auto cs = compile_constraints(spec);
  // Build a beta that satisfies every tag strictly: walk the ordering terms
  // until every "a > k" has S_a > S_k.
  Vector beta = Vector::Zero(spec.q());
  for (int pass = 0; pass < 200; ++pass) {
    bool changed = false;
    for (const auto& ch : spec.characteristics()) {
      for (const auto& a : ch.attributes) {
        for (const auto& t : a.tag.terms) {
          if (t.op == TermOp::greater_than && !(beta[a.index] > beta[t.att])) {
            beta[a.index] = beta[t.att] + 1.0;
            changed = true;
          }
          if (t.op == TermOp::less_than && !(beta[a.index] < beta[t.att])) {
            beta[t.att] = beta[a.index] + 1.0;
            changed = true;
          }
        }
      }
    }
    for (const auto& ch : spec.characteristics())
      for (const auto& a : ch.attributes)
        for (const auto& t : a.tag.terms)
          if (t.op == TermOp::fixed_to && beta[a.index] != t.value) {
            // Shift the whole characteristic so the fixed attribute lands on its value.
            const double shift = t.value - beta[a.index];
            for (const auto& b : ch.attributes) beta[b.index] += shift;
            changed = true;
          }
    if (!changed) break;
  }
  ASSERT_TRUE(check_feasible(cs, beta, 0.0).feasible) << check_feasible(cs, beta, 0.0).describe();
}

TEST(FormatProvenance, ListsEveryRow) {
  const auto cs = compile_constraints(parse_spec(kChar170));
  const auto text = format_provenance(cs);
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  EXPECT_EQ(n, 1u + 2u + 4u);
}
