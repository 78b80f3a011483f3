#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "jgecert/error.hpp"
#include "jgecert/pencil.hpp"

using namespace jgecert;
using fixtures::from_slices;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

FactorTriple random_square_factors(SeededRng& rng, Index r, Index k) {
  return {rng.normal_matrix(r, r), rng.normal_matrix(r, r), rng.normal_matrix(k, r)};
}

}  // namespace

TEST(CharPoly, TriangularExampleFactorizes) {
  const Tensor3 t = fixtures::triangular_tensor();
  EXPECT_NEAR(char_poly_eval(t, vec({0, 1, 0})), -2.0, 1e-12);
  EXPECT_NEAR(char_poly_eval(t, vec({0, 0, 1})), 15.0, 1e-12);
  EXPECT_NEAR(char_poly_eval(t, vec({1, 0, 0})), 1.0, 1e-12);
  SeededRng rng(1);
  for (int n = 0; n < 20; ++n) {
    const Vector g = rng.normal_vector(3);
    const double expected = fixtures::triangular_char_poly(g);
    EXPECT_NEAR(char_poly_eval(t, g), expected, 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST(CharPoly, SingularMixExampleVanishes) {
  const Tensor3 t = fixtures::singular_mix_tensor();
  SeededRng rng(2);
  for (int n = 0; n < 50; ++n) EXPECT_NEAR(char_poly_eval(t, rng.normal_vector(3)), 0.0, 1e-10);
}

TEST(CharPoly, HomogeneousOfDegreeR) {
  SeededRng rng(3);
  for (int n = 0; n < 20; ++n) {
    const Index r = 2 + n % 5;
    const Tensor3 t = random_normal_tensor(rng, {r, r, 3});
    const Vector g = rng.normal_vector(3);
    const double s = 0.5 + rng.uniform() * 2.0;
    const double lhs = char_poly_eval(t, s * g);
    const double rhs = std::pow(s, static_cast<double>(r)) * char_poly_eval(t, g);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(rhs));
  }
}

TEST(CharPoly, Errors) {
  EXPECT_THROW(char_poly_eval(Tensor3(2, 3, 2), vec({1, 0})), DimensionError);
  EXPECT_THROW(char_poly_eval(Tensor3(2, 2, 2), vec({1, 0, 0})), DimensionError);
}

TEST(SliceMixProbe, Fixtures) {
  SeededRng rng(4);
  EXPECT_FALSE(slice_mix_probe(fixtures::singular_mix_tensor(), rng, 100, 1e-8).invertible);

  const SliceMixProbe tri = slice_mix_probe(fixtures::triangular_tensor(), rng, 10, 1e-8);
  ASSERT_TRUE(tri.invertible);
  ASSERT_TRUE(tri.witness.has_value());
  EXPECT_NEAR(tri.witness->norm(), 1.0, 1e-12);

  const Tensor3 id = from_slices({{{1, 0}, {0, 1}}, {{0, 0}, {0, 0}}});
  const SliceMixProbe p = slice_mix_probe(id, rng, 0, 1e-8);
  ASSERT_TRUE(p.invertible);
  EXPECT_NEAR(std::abs((*p.witness)(0)), 1.0, 1e-15);
}

TEST(PencilSpectrum, DiagonalPencilIsSimple) {
  SeededRng rng(5);
  const PencilDiagnosis d = pencil_spectrum(from_slices({{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}}), rng);
  ASSERT_EQ(d.verdict, PencilVerdict::Simple);
  Spectrum expected;
  expected.lines = {Line(vec({1, 0})), Line(vec({0, 1}))};
  EXPECT_LT(matching_distance(*d.spectrum, expected), 1e-12);
  ASSERT_TRUE(d.cpd.has_value());
  EXPECT_LT(matching_distance(spectrum_from_columns(d.cpd->C), expected), 1e-12);
}

TEST(PencilSpectrum, JordanBlockIsRepeated) {
  SeededRng rng(6);
  const PencilDiagnosis d = pencil_spectrum(from_slices({{{1, 0}, {0, 1}}, {{1, 1}, {0, 1}}}), rng);
  EXPECT_EQ(d.verdict, PencilVerdict::RepeatedEigenvalue);
  EXPECT_FALSE(d.cpd.has_value());
  const auto j = jennrich_pencil_cpd(from_slices({{{1, 0}, {0, 1}}, {{1, 1}, {0, 1}}}), rng);
  ASSERT_TRUE(std::holds_alternative<PencilDiagnosis>(j));
  EXPECT_EQ(std::get<PencilDiagnosis>(j).verdict, PencilVerdict::RepeatedEigenvalue);
}

TEST(PencilSpectrum, RotationIsComplex) {
  SeededRng rng(7);
  const Tensor3 p = from_slices({{{1, 0}, {0, 1}}, {{0, -1}, {1, 0}}});
  // Oracle: the rotation has eigenvalues +-i.
  Eigen::EigenSolver<Matrix> es(Matrix(p.slice(1)));
  EXPECT_NEAR(std::abs(es.eigenvalues()(0).imag()), 1.0, 1e-12);
  const PencilDiagnosis d = pencil_spectrum(p, rng);
  EXPECT_EQ(d.verdict, PencilVerdict::ComplexSpectrum);
  EXPECT_FALSE(d.cpd.has_value());
}

TEST(PencilSpectrum, SingularPencil) {
  SeededRng rng(8);
  const PencilDiagnosis d = pencil_spectrum(from_slices({{{1, 0}, {0, 0}}, {{2, 0}, {0, 0}}}), rng);
  EXPECT_EQ(d.verdict, PencilVerdict::NotSliceMixInvertible);
  EXPECT_FALSE(d.spectrum.has_value());
}

TEST(PencilSpectrum, InvariantUnderInternalMixes) {
  SeededRng gen(9);
  for (int n = 0; n < 10; ++n) {
    const Tensor3 p = synthesize(random_square_factors(gen, 5, 2));
    SeededRng r1(100 + n), r2(200 + n);
    const PencilDiagnosis a = pencil_spectrum(p, r1), b = pencil_spectrum(p, r2);
    ASSERT_EQ(a.verdict, PencilVerdict::Simple);
    ASSERT_EQ(b.verdict, PencilVerdict::Simple);
    EXPECT_LT(matching_distance(*a.spectrum, *b.spectrum), 1e-8);
  }
}

TEST(Jennrich, RoundTripRecoversFactors) {
  SeededRng gen(10);
  for (Index r = 2; r <= 10; ++r) {
    for (int n = 0; n < 5; ++n) {
      const FactorTriple truth = random_square_factors(gen, r, 2);
      const Tensor3 p = synthesize(truth);
      const auto out = jennrich_pencil_cpd(p, gen);
      ASSERT_TRUE(std::holds_alternative<FactorTriple>(out)) << "R=" << r;
      const FactorTriple& f = std::get<FactorTriple>(out);
      EXPECT_LT(frobenius_norm(synthesize(f) - p), 1e-8 * frobenius_norm(p));
      EXPECT_LT(matching_distance(spectrum_from_columns(f.C), spectrum_from_columns(truth.C)), 1e-7);
      for (Index c = 0; c < r; ++c) EXPECT_NEAR(f.C.col(c).norm(), 1.0, 1e-12);
    }
  }
}

TEST(Jennrich, DiagonalPencil) {
  SeededRng rng(11);
  const auto out = jennrich_pencil_cpd(from_slices({{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}}), rng);
  ASSERT_TRUE(std::holds_alternative<FactorTriple>(out));
  const FactorTriple& f = std::get<FactorTriple>(out);
  // Each column of A and B has a single nonzero entry, sharing its row index.
  for (Index c = 0; c < 2; ++c) {
    Index ia, ib;
    f.A.col(c).cwiseAbs().maxCoeff(&ia);
    f.B.col(c).cwiseAbs().maxCoeff(&ib);
    EXPECT_EQ(ia, ib);
    EXPECT_NEAR(std::abs(f.A(1 - ia, c)) + std::abs(f.B(1 - ib, c)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(f.C(ia, c)), 1.0, 1e-12);
  }
}

TEST(SolveFirstFactor, RecoversA) {
  SeededRng rng(12);
  const FactorTriple f{rng.normal_matrix(6, 3), rng.normal_matrix(4, 3), rng.normal_matrix(5, 3)};
  EXPECT_LT((solve_first_factor(synthesize(f), f.B, f.C) - f.A).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SliceMix, MatchesModalProduct) {
  SeededRng rng(13);
  const Tensor3 t = random_normal_tensor(rng, {3, 3, 4});
  const Vector v = rng.normal_vector(4);
  EXPECT_LT((slice_mix(t, v) - Matrix(modal_product(t, Matrix(v.transpose()), 3).slice(0))).norm(), 1e-13);
}
