#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "hsl/elliptic.hpp"
#include "hsl/engine.hpp"
#include "hsl/lattice.hpp"
#include "hsl/shell_cache.hpp"

using namespace hsl;

namespace {

GramMatrix from_rows(std::initializer_list<std::initializer_list<GaussInt>> rows) {
  return {0, Matrix<GaussInt>(rows)};
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hsl_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(LoadGram, Examples) {
  const GramMatrix s1 = load_gram(1);
  const std::vector<int> row0{2, 0, 0, 0, 1, 1, 0, 1};
  for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(s1.entries(0, c), GaussInt(row0[c], 0));
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_TRUE(s1.entries(r, c).is_real());

  EXPECT_EQ(load_gram(2).entries(7, 7), GaussInt(4));

  const GramMatrix s3 = load_gram(3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 4; c < 8; ++c) {
      EXPECT_TRUE(s3.entries(r, c).is_zero());
      EXPECT_TRUE(s3.entries(c, r).is_zero());
    }

  EXPECT_THROW(load_gram(0), UnknownLattice);
  EXPECT_THROW(load_gram(4), UnknownLattice);
}

TEST(HermIp, Examples) {
  const GramMatrix s1 = load_gram(1);
  const LatticeVector e1 = unit_vector(8, 0);
  const LatticeVector e5 = unit_vector(8, 4);
  EXPECT_EQ(herm_ip(s1, e1, e1), GaussInt(2));
  EXPECT_EQ(herm_ip(s1, zero_vector(8), e5), GaussInt(0));
  EXPECT_EQ(herm_ip(s1, e1, e5), GaussInt(1));
  EXPECT_EQ(herm_ip(s1, e5, e1), GaussInt(1));
  EXPECT_THROW(herm_ip(s1, unit_vector(7, 0), e1), DimensionMismatch);
}

TEST(HermIp, IsSesquilinearInTheConvention) {
  // <v, w> = w^* G v: linear in v, conjugate-linear in w.
  const GramMatrix s2 = load_gram(2);
  LatticeVector v = zero_vector(8);
  LatticeVector w = zero_vector(8);
  v[0] = GaussInt(1, 2);
  v[6] = GaussInt(-1, 0);
  w[1] = GaussInt(0, 1);
  w[7] = GaussInt(2, -1);
  const GaussInt i(0, 1);
  EXPECT_EQ(herm_ip(s2, times_unit(v, 1), w), i * herm_ip(s2, v, w));
  EXPECT_EQ(herm_ip(s2, v, times_unit(w, 1)), gi_conj(i) * herm_ip(s2, v, w));
  EXPECT_EQ(herm_ip(s2, w, v), gi_conj(herm_ip(s2, v, w)));
}

TEST(Ldl, Identity) {
  GramMatrix id{0, Matrix<GaussInt>::identity(4, GaussInt(1), GaussInt(0))};
  const LdlFactors f = ldl(id);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(f.D[r], 1);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(f.L(r, c), GaussRat(GaussInt(r == c ? 1 : 0)));
  }
}

TEST(Ldl, ReconstructsBuiltinsWithUnitDeterminant) {
  for (int i = 1; i <= 3; ++i) {
    const GramMatrix g = load_gram(i);
    const LdlFactors f = ldl(g);
    EXPECT_EQ(reconstruct(f), g.entries.map([](const GaussInt& z) { return GaussRat(z); })) << "S" << i;
    BigRat det = 1;
    for (const auto& d : f.D) {
      EXPECT_GT(d, 0);
      det *= d;
    }
    EXPECT_EQ(det, 1) << "S" << i;
    for (std::size_t r = 0; r < 8; ++r) {
      EXPECT_EQ(f.L(r, r), GaussRat(GaussInt(1)));
      for (std::size_t c = 0; c < r; ++c) EXPECT_TRUE(f.L(r, c).is_zero());
    }
  }
}

TEST(Ldl, RejectsIndefinite) {
  EXPECT_THROW(ldl(from_rows({{GaussInt(2), GaussInt(0)}, {GaussInt(0), GaussInt(-2)}})), NotPositiveDefinite);
  EXPECT_THROW(ldl(from_rows({{GaussInt(2), GaussInt(2)}, {GaussInt(2), GaussInt(2)}})), NotPositiveDefinite);
}

TEST(ValidateGram, Builtins) {
  for (int i = 1; i <= 3; ++i) {
    const GramDiagnostics d = validate_gram(load_gram(i));
    EXPECT_TRUE(d.ok()) << "S" << i;
    EXPECT_TRUE(d.unimodular) << "S" << i;
  }
}

TEST(ValidateGram, Failures) {
  const GramDiagnostics nh = validate_gram(from_rows({{GaussInt(2), GaussInt(1, 1)}, {GaussInt(1, 1), GaussInt(2)}}));
  EXPECT_FALSE(nh.hermitian);
  EXPECT_FALSE(nh.ok());

  const GramDiagnostics indef = validate_gram(from_rows({{GaussInt(2), GaussInt(0)}, {GaussInt(0), GaussInt(-2)}}));
  EXPECT_TRUE(indef.hermitian);
  EXPECT_FALSE(indef.positive_definite);
  EXPECT_EQ(indef.determinant, -4);

  const GramDiagnostics odd = validate_gram(from_rows({{GaussInt(1), GaussInt(0)}, {GaussInt(0), GaussInt(1)}}));
  EXPECT_FALSE(odd.even);
  EXPECT_TRUE(odd.positive_definite);
}

TEST(Shell, Examples) {
  const GramMatrix s1 = load_gram(1);
  const VectorShell zero = enumerate_shell(s1, 0);
  ASSERT_EQ(zero.size(), 1U);
  EXPECT_EQ(zero.vector(0), zero_vector(8));
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(enumerate_shell(load_gram(i), 2).size(), 480U) << "S" << i;
  EXPECT_EQ(enumerate_shell(s1, 4).size(), 61920U);
}

TEST(Shell, OddAndNegativeNormsAreEmpty) {
  for (int i = 1; i <= 3; ++i) {
    const GramMatrix g = load_gram(i);
    EXPECT_TRUE(enumerate_shell(g, 1).empty());
    EXPECT_TRUE(enumerate_shell(g, 3).empty());
    EXPECT_TRUE(enumerate_shell(g, -2).empty());
  }
}

TEST(Shell, CountsMatchRank16Oracle) {
  const QSeries oracle = rank16_theta_oracle(4);
  for (int i = 1; i <= 3; ++i) {
    const ScaledForm form(ldl(load_gram(i)));
    const auto counts = form.count_up_to(8, 1);
    for (std::int64_t t = 0; t <= 8; ++t) {
      const BigInt want = t % 2 == 0 ? oracle[static_cast<std::size_t>(t / 2)] : BigInt(0);
      EXPECT_EQ(BigInt(counts[static_cast<std::size_t>(t)]), want) << "S" << i << " norm " << t;
    }
  }
}

class ShellInvariants : public ::testing::TestWithParam<int> {};

TEST_P(ShellInvariants, MembersHaveTheNormAndAreSortedAndUnitClosed) {
  const GramMatrix g = load_gram(GetParam());
  for (const std::int64_t t : {2, 4}) {
    const VectorShell s = enumerate_shell(g, t);
    EXPECT_EQ(s.size() % 4, 0U);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const LatticeVector v = s.vector(k);
      if (k % 97 == 0 || t == 2) EXPECT_EQ(herm_ip(g, v, v), GaussInt(t));
      if (k > 0) EXPECT_LT(s.vector(k - 1), v);
      for (unsigned u = 1; u < 4; ++u) {
        const LatticeVector uv = times_unit(v, u);
        std::vector<std::int16_t> packed;
        for (const auto& z : uv.coords) {
          packed.push_back(static_cast<std::int16_t>(z.re));
          packed.push_back(static_cast<std::int16_t>(z.im));
        }
        ASSERT_LT(s.find(packed), s.size());
      }
    }
  }
}

TEST_P(ShellInvariants, SelfInnerProductIsRealAndEven) {
  const GramMatrix g = load_gram(GetParam());
  std::mt19937_64 rng(7 + GetParam());
  std::uniform_int_distribution<int> d(-3, 3);
  for (int k = 0; k < 500; ++k) {
    LatticeVector v = zero_vector(8);
    for (auto& z : v.coords) z = GaussInt(d(rng), d(rng));
    const GaussInt n = herm_ip(g, v, v);
    EXPECT_EQ(n.im, 0);
    EXPECT_EQ(n.re % 2, 0);
    EXPECT_GE(n.re, 0);
  }
}

TEST_P(ShellInvariants, IndependentOfThreadCount) {
  const GramMatrix g = load_gram(GetParam());
  const VectorShell a = enumerate_shell(g, 4, 1);
  const VectorShell b = enumerate_shell(g, 4, 4);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(std::ranges::equal(a.packed(), b.packed()));
}

INSTANTIATE_TEST_SUITE_P(Lattices, ShellInvariants, ::testing::Values(1, 2, 3));

TEST(ShellCache, RoundTripThroughEngine) {
  const auto dir = fresh_dir("cache");
  {
    Engine e(EngineConfig{1, dir});
    EXPECT_EQ(e.lattice(2).shell(2).size(), 480U);
  }
  const auto file = shell_cache_path(dir, 2, 2);
  ASSERT_TRUE(std::filesystem::exists(file));
  const auto loaded = read_shell_cache(file, load_gram(2), 2);
  ASSERT_TRUE(loaded.has_value());
  const VectorShell fresh = enumerate_shell(load_gram(2), 2);
  EXPECT_TRUE(std::ranges::equal(loaded->packed(), fresh.packed()));

  std::ifstream is(file);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(Json::parse(header), Json::parse(R"({"lattice":2,"norm":2,"count":480,"version":1})"));
  std::filesystem::remove_all(dir);
}

TEST(ShellCache, AbsentFileIsNotAnError) {
  const auto dir = fresh_dir("absent");
  EXPECT_FALSE(read_shell_cache(shell_cache_path(dir, 1, 2), load_gram(1), 2).has_value());
  std::filesystem::remove_all(dir);
}

TEST(ShellCache, TamperingIsDetected) {
  const auto dir = fresh_dir("tamper");
  const VectorShell s = enumerate_shell(load_gram(1), 2);
  const auto file = shell_cache_path(dir, 1, 2);
  write_shell_cache(file, s);

  std::vector<std::string> lines;
  {
    std::ifstream is(file);
    for (std::string l; std::getline(is, l);) lines.push_back(l);
  }
  auto rewrite = [&](const std::vector<std::string>& ls) {
    std::ofstream os(file, std::ios::trunc);
    for (const auto& l : ls) os << l << '\n';
  };

  // A vector of the wrong norm.
  auto bad = lines;
  bad[1] = R"([["0","0"],["0","0"],["0","0"],["0","0"],["0","0"],["0","0"],["0","0"],["0","0"]])";
  rewrite(bad);
  EXPECT_THROW(read_shell_cache(file, load_gram(1), 2), FormatError);

  // A missing line.
  bad = lines;
  bad.pop_back();
  rewrite(bad);
  EXPECT_THROW(read_shell_cache(file, load_gram(1), 2), FormatError);

  // Header for another lattice.
  rewrite(lines);
  EXPECT_THROW(read_shell_cache(file, load_gram(2), 2), FormatError);

  // Two lines swapped.
  bad = lines;
  std::swap(bad[1], bad[2]);
  rewrite(bad);
  EXPECT_THROW(read_shell_cache(file, load_gram(1), 2), FormatError);

  // A vector dropped together with the header count: only the engine's ball
  // count notices.
  bad = lines;
  bad.pop_back();
  bad[0] = R"({"lattice":1,"norm":2,"count":479,"version":1})";
  rewrite(bad);
  EXPECT_TRUE(read_shell_cache(file, load_gram(1), 2).has_value());
  Engine e(EngineConfig{1, dir});
  EXPECT_THROW(e.lattice(1).shell(2), FormatError);
  std::filesystem::remove_all(dir);
}
