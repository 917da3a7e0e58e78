#include <gtest/gtest.h>

#include "hsl/forms.hpp"
#include "hsl/indices.hpp"

using namespace hsl;

namespace {

Engine& engine() {
  static Engine e(EngineConfig{0, std::nullopt});
  return e;
}

DoubledIndex idx(std::initializer_list<std::initializer_list<GaussInt>> rows) {
  return DoubledIndex(Matrix<GaussInt>(rows));
}

}  // namespace

TEST(Combo, Examples) {
  EXPECT_EQ(combo_coeff(engine(), Combo::schottky(), DoubledIndex::diagonal({2})), 0);
  EXPECT_EQ(combo_coeff(engine(), Combo{{1, 0, 0}}, DoubledIndex::diagonal({2})), 480);
  // Singular 4x4 index: v1 = v2 is forced.
  const DoubledIndex singular = idx({{GaussInt(2), GaussInt(2), GaussInt(0), GaussInt(0)},
                                     {GaussInt(2), GaussInt(2), GaussInt(0), GaussInt(0)},
                                     {GaussInt(0), GaussInt(0), GaussInt(2), GaussInt(0)},
                                     {GaussInt(0), GaussInt(0), GaussInt(0), GaussInt(2)}});
  EXPECT_EQ(combo_coeff(engine(), Combo::schottky(), singular), 0);
  EXPECT_EQ(Combo::schottky().tag(), "F(8,-15,7)");
  EXPECT_EQ(Combo::cusp2().to_json().dump(), "[-8,3,5]");
}

TEST(Combo, WeightRecords) {
  EXPECT_EQ(kSchottkyWeight.k, 0);
  EXPECT_EQ(kSchottkyWeight.l, 8);
}

TEST(Indices, CanonicalOrder) {
  const auto d = index_diagonals(2, 4, 4);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front(), (std::vector<std::int64_t>{4, 0}));
  EXPECT_EQ(d.back(), (std::vector<std::int64_t>{0, 0}));
  EXPECT_TRUE(std::is_sorted(d.rbegin(), d.rend()));
  EXPECT_EQ(d.size(), 6U);
  EXPECT_TRUE(index_diagonals(2, 4, -1).empty());

  std::vector<Matrix<GaussInt64>> seen;
  for_each_index_with_diagonal({2, 2}, [&](const Matrix<GaussInt64>& m) {
    seen.push_back(m);
    return true;
  });
  ASSERT_EQ(seen.size(), 13U);  // |c|^2 <= 4
  EXPECT_EQ(seen.front()(1, 0), GaussInt64(-2, 0));
  EXPECT_EQ(seen.back()(1, 0), GaussInt64(2, 0));
  for (const auto& m : seen) EXPECT_EQ(m(0, 1), conj(m(1, 0)));
}

TEST(Indices, EarlyStop) {
  int calls = 0;
  const bool finished = for_each_index(3, 4, -1, [&](const Matrix<GaussInt64>&) { return ++calls < 5; });
  EXPECT_FALSE(finished);
  EXPECT_EQ(calls, 5);
}

TEST(LowDeg, ThetaSeriesAgreeAtDegreeOne) {
  for (std::int64_t t = 0; t <= 8; t += 2) {
    const DoubledIndex i = DoubledIndex::diagonal({t});
    const BigInt a1 = rep_count(engine(), 1, i);
    EXPECT_EQ(rep_count(engine(), 2, i), a1);
    EXPECT_EQ(rep_count(engine(), 3, i), a1);
  }
}

TEST(LowDeg, Scans) {
  const ScanReport n1 = lowdeg_scan(engine(), 1, 16);
  EXPECT_TRUE(n1.clean());
  EXPECT_EQ(n1.checked, 9U);
  EXPECT_EQ(n1.extra["max_abs"], "0");

  const ScanReport n2 = lowdeg_scan(engine(), 2, 8);
  EXPECT_TRUE(n2.clean());
  EXPECT_GT(n2.checked, 100U);

  const ScanReport n3 = lowdeg_scan(engine(), 3, 6);
  EXPECT_TRUE(n3.clean());
  EXPECT_GT(n3.checked, 1000U);
  EXPECT_EQ(n3.to_json()["scan"], "lowdeg");
  EXPECT_THROW(lowdeg_scan(engine(), 4, 2), InvalidIndex);
}

TEST(Cusp, SchottkyDegreeFourSingularIndices) {
  const ScanReport r = cusp_scan(engine(), Combo::schottky(), 4, 6, 2, false);
  EXPECT_TRUE(r.clean());
  EXPECT_GT(r.checked, 0U);
  EXPECT_TRUE(r.witness.is_null());
}

TEST(Cusp, CombinationMinus8_3_5IsACuspForm) {
  const ScanReport r = cusp_scan(engine(), Combo::cusp2(), 2, 8);
  EXPECT_TRUE(r.clean());
  ASSERT_FALSE(r.witness.is_null());
  EXPECT_NE(r.witness["value"], "0");
  const DoubledIndex w = DoubledIndex::from_json(r.witness["T"]);
  EXPECT_NE(determinant(w.matrix()), GaussInt(0));
}

TEST(Cusp, ThetaSeriesAreNotCuspForms) {
  const ScanReport r = cusp_scan(engine(), Combo{{1, 0, 0}}, 2, 4, -1, false);
  EXPECT_FALSE(r.clean());
  EXPECT_THROW(cusp_scan(engine(), Combo{{1, 0, 0}}, 1, 4), InvalidIndex);
}

TEST(H2H2, NoWitnessAtTraceTwo) {
  const ScanReport r = h2h2_scan(engine(), 2);
  EXPECT_TRUE(r.witness.is_null());
  EXPECT_GT(r.checked, 0U);
}

TEST(H2H2, WitnessAtTraceEight) {
  const ScanReport r = h2h2_scan(engine(), 8);
  ASSERT_FALSE(r.witness.is_null());
  const DoubledIndex t1 = DoubledIndex::from_json(r.witness["T1"]);
  const DoubledIndex t2 = DoubledIndex::from_json(r.witness["T2"]);
  BigInt v = 0;
  const Combo c = Combo::schottky();
  for (int i = 1; i <= 3; ++i)
    v += BigInt(c.c[static_cast<std::size_t>(i - 1)]) * rep_count(engine(), i, t1) * rep_count(engine(), i, t2);
  EXPECT_NE(v, 0);
  EXPECT_EQ(r.witness["value"], v.str());
  EXPECT_EQ(t1, idx({{GaussInt(6), GaussInt(-3, 1)}, {GaussInt(-3, -1), GaussInt(2)}}));
  EXPECT_EQ(r.witness["value"], "123863040");
}

TEST(Relations, SchottkyCombinationVanishesAtDegreeTwo) {
  for_each_index(2, 6, -1, [&](const Matrix<GaussInt64>& m) {
    const DoubledIndex t = DoubledIndex::from_small(m);
    const BigInt a1 = rep_count(engine(), 1, t);
    const BigInt a2 = rep_count(engine(), 2, t);
    const BigInt a3 = rep_count(engine(), 3, t);
    EXPECT_EQ(8 * a1 - 15 * a2 + 7 * a3, 0) << to_string(t);
    return true;
  });
}
