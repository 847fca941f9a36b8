#include "scorecraft/model.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

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

const char* kThree =
    "char,att,label,kind,lo,hi,categories,constraint\n"
    "x,1,low,interval,,10,,\n"
    "x,2,high,interval,10,,,\n"
    "x,3,NO INFORMATION,noinfo,,,,\n";

int count_op(const ScorecardSpec& spec, TermOp op) {
  int n = 0;
  for (const auto& ch : spec.characteristics())
    for (const auto& a : ch.attributes)
      for (const auto& t : a.tag.terms) n += t.op == op;
  return n;
}

}  // namespace

TEST(ParseSpec, Char170Block) {
  const auto spec = parse_spec(kChar170);
  EXPECT_EQ(spec.q(), 8);
  EXPECT_EQ(count_op(spec, TermOp::fixed_to), 2);
  EXPECT_EQ(count_op(spec, TermOp::greater_than), 4);
  EXPECT_EQ(spec.attribute(1).tag.terms[0], (ConstraintTerm{TermOp::fixed_to, 0.0, 0}));
  EXPECT_EQ(spec.attribute(2).tag.terms[0], (ConstraintTerm{TermOp::greater_than, 0.0, 3}));
  EXPECT_EQ(spec.characteristics()[0].no_information_att(), 7);
}

TEST(ParseSpec, MinimalUntagged) {
  const auto spec = parse_spec(
      "char,att,label,kind,lo,hi,categories,constraint\n"
      "c,1,a,interval,,0,,\n"
      "c,2,NO INFORMATION,noinfo,,,,\n");
  EXPECT_EQ(spec.q(), 3);
  EXPECT_TRUE(spec.attribute(1).tag.empty());
  EXPECT_TRUE(spec.attribute(2).tag.empty());
}

TEST(ParseSpec, ConjunctionTag) {
  const auto tag = parse_constraint_tag("= 0 & < 69");
  ASSERT_EQ(tag.terms.size(), 2u);
  EXPECT_EQ(tag.terms[0], (ConstraintTerm{TermOp::fixed_to, 0.0, 0}));
  EXPECT_EQ(tag.terms[1], (ConstraintTerm{TermOp::less_than, 0.0, 69}));
  EXPECT_EQ(format_constraint_tag(tag), "= 0 & < 69");
}

TEST(ParseSpec, TagErrors) {
  EXPECT_THROW(parse_constraint_tag("> x"), ValidationError);
  EXPECT_THROW(parse_constraint_tag("= "), ValidationError);
  EXPECT_THROW(parse_constraint_tag(">> 3"), ValidationError);
  EXPECT_THROW(parse_constraint_tag("= 0 &"), ValidationError);
  EXPECT_TRUE(parse_constraint_tag("  ").empty());
}

TEST(ParseSpec, StructuralErrors) {
  // Non-consecutive att numbers.
  EXPECT_THROW(parse_spec("char,att,label,kind,lo,hi,categories,constraint\n"
                          "c,1,a,interval,,0,,\nc,3,NO INFORMATION,noinfo,,,,\n"),
               ValidationError);
  // Missing NoInformation attribute.
  EXPECT_THROW(parse_spec("char,att,label,kind,lo,hi,categories,constraint\nc,1,a,interval,,0,,\n"),
               ValidationError);
  // Tag references an attribute that does not exist.
  EXPECT_THROW(parse_spec("char,att,label,kind,lo,hi,categories,constraint\n"
                          "c,1,a,interval,,0,,> 9\nc,2,NO INFORMATION,noinfo,,,,\n"),
               ValidationError);
  EXPECT_THROW(parse_spec("char,att,label\n"), ValidationError);
}

TEST(ParseSpec, FixtureShape) {
  const auto spec = testkit::fixture_spec();
  EXPECT_EQ(spec.characteristics().size(), 25u);
  EXPECT_EQ(spec.attribute_count(), 171);
  EXPECT_EQ(spec.q(), 172);
  EXPECT_EQ(spec.attribute(71).tag, parse_constraint_tag("= 0 & < 69"));
}

TEST(SpecRoundTrip, FixtureIsIdentity) {
  const auto spec = testkit::fixture_spec();
  const auto text = write_spec(spec);
  EXPECT_EQ(parse_spec(text), spec);
  EXPECT_EQ(write_spec(parse_spec(text)), text);
  EXPECT_EQ(spec_hash(parse_spec(text)), spec_hash(spec));
}

TEST(SpecRoundTrip, HashChangesWithTags) {
  const auto a = parse_spec(kChar170);
  std::string edited = kChar170;
  edited.replace(edited.find("> 6"), 3, "< 6");
  EXPECT_NE(spec_hash(a), spec_hash(parse_spec(edited)));
}

TEST(BinValue, Char170Examples) {
  const auto spec = parse_spec(kChar170);
  const auto& ch = spec.characteristics()[0];
  EXPECT_EQ(bin_value(ch, RawValue::of(4)), 2);
  EXPECT_EQ(bin_value(ch, RawValue::missing()), 7);
  EXPECT_EQ(bin_value(ch, RawValue::of(-9999999)), 1);
  EXPECT_EQ(bin_value(ch, RawValue::of(5)), 3);
  EXPECT_EQ(bin_value(ch, RawValue::of(1e9)), 6);
  // Below every interval and not a special value.
  EXPECT_EQ(bin_value(ch, RawValue::of(-3)), 7);
  EXPECT_EQ(bin_value(ch, RawValue::parse("abc")), 7);
}

TEST(BinValue, SpecialBeforeInterval) {
  const auto spec = parse_spec(
      "char,att,label,kind,lo,hi,categories,constraint\n"
      "c,1,all,interval,,,,\n"
      "c,2,zero,special,0,,,\n"
      "c,3,NO INFORMATION,noinfo,,,,\n");
  const auto& ch = spec.characteristics()[0];
  EXPECT_EQ(bin_value(ch, RawValue::of(0)), 2);
  EXPECT_EQ(bin_value(ch, RawValue::of(1)), 1);
}

TEST(BinValue, CategoryMatchesText) {
  const auto spec = testkit::fixture_spec();
  const auto* ch = spec.find("char950");
  ASSERT_NE(ch, nullptr);
  EXPECT_EQ(bin_value(*ch, RawValue::parse("3300-<4901")), 126);
  EXPECT_EQ(bin_value(*ch, RawValue::parse("nonsense")), ch->no_information_att());
}

TEST(BinValue, TotalOnRandomInputs) {
  const auto spec = testkit::fixture_spec();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2e7, 2e7);
  for (const auto& ch : spec.characteristics()) {
    const int first = ch.attributes.front().index;
    const int last = ch.attributes.back().index;
    for (int k = 0; k < 200; ++k) {
      const int att = bin_value(ch, RawValue::of(std::round(u(rng) / (k % 2 ? 1.0 : 1e5))));
      EXPECT_GE(att, first);
      EXPECT_LE(att, last);
    }
  }
}

TEST(DesignMatrix, TwoRecords) {
  const auto spec = parse_spec(kThree);
  Sample s;
  s.columns = {"x"};
  s.y = Vector::Ones(2);
  s.w = Vector::Ones(2);
  s.records = {{RawValue::of(3)}, {RawValue::missing()}};
  const Matrix x = build_design_matrix(spec, s);
  Matrix expected(2, 4);
  expected << 1, 1, 0, 0, 1, 0, 0, 1;
  EXPECT_EQ(x, expected);
}

TEST(DesignMatrix, EmptySample) {
  const auto spec = parse_spec(kThree);
  Sample s;
  s.columns = {"x"};
  const Matrix x = build_design_matrix(spec, s);
  EXPECT_EQ(x.rows(), 0);
  EXPECT_EQ(x.cols(), 4);
}

TEST(DesignMatrix, MissingColumnIsAnError) {
  const auto spec = parse_spec(kThree);
  Sample s;
  s.columns = {"other"};
  s.y = Vector::Ones(1);
  s.w = Vector::Ones(1);
  s.records = {{RawValue::of(1)}};
  EXPECT_THROW(build_design_matrix(spec, s), ValidationError);
}

TEST(DesignMatrix, FixtureRowsHaveOneIndicatorPerCharacteristic) {
  const auto spec = testkit::fixture_spec();
  Sample s;
  for (const auto& ch : spec.characteristics()) s.columns.push_back(ch.name);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 20000);
  for (int i = 0; i < 50; ++i) {
    std::vector<RawValue> rec;
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      rec.push_back(i % 7 == 0 ? RawValue::missing() : RawValue::of(std::floor(u(rng))));
    }
    s.records.push_back(rec);
  }
  s.y = Vector::Ones(50);
  s.w = Vector::Ones(50);
  const Matrix x = build_design_matrix(spec, s);
  ASSERT_EQ(x.cols(), 172);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(x.row(i).sum(), 26.0);
    // Each characteristic block sums to the intercept column.
    for (const auto& ch : spec.characteristics()) {
      double block = 0.0;
      for (const auto& a : ch.attributes) block += x(i, a.index);
      EXPECT_EQ(block, x(i, 0));
    }
  }
}

TEST(ScoreVector, Examples) {
  Matrix x(2, 2);
  x << 1, 0, 1, 1;
  EXPECT_EQ(score_vector(x, Vector::LinSpaced(2, 1, 2)), (Vector(2) << 1, 3).finished());
  EXPECT_EQ(score_vector(x, Vector::Zero(2)), Vector::Zero(2));
  EXPECT_THROW(score_vector(x, Vector::Zero(3)), ValidationError);
}

TEST(ScoreVector, HandSummedScorecardPoints) {
  const auto spec = testkit::fixture_spec();
  std::mt19937_64 rng(5);
  const Vector beta = testkit::random_vector(rng, spec.q());
  Sample s;
  for (const auto& ch : spec.characteristics()) s.columns.push_back(ch.name);
  std::uniform_real_distribution<double> u(-10, 5000);
  for (int i = 0; i < 3; ++i) {
    std::vector<RawValue> rec;
    for (std::size_t c = 0; c < s.columns.size(); ++c) rec.push_back(RawValue::of(std::floor(u(rng))));
    s.records.push_back(rec);
  }
  s.y = Vector::Ones(3);
  s.w = Vector::Ones(3);
  const Vector theta = score_vector(build_design_matrix(spec, s), beta);
  for (int i = 0; i < 3; ++i) {
    double points = beta[0];
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      points += beta[bin_value(spec.characteristics()[c], s.records[static_cast<std::size_t>(i)][c])];
    }
    EXPECT_NEAR(theta[i], points, 1e-12);
  }
}
