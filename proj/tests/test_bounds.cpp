#include <cmath>

#include <Eigen/QR>
#include <gtest/gtest.h>
#include "json.hpp"

#include "fixtures.hpp"
#include "jgecert/bounds.hpp"
#include "jgecert/error.hpp"
#include "jgecert/serialize.hpp"

using namespace jgecert;

namespace {

FactorTriple random_pencil_factors(SeededRng& rng, Index r) {
  return {rng.normal_matrix(r, r), rng.normal_matrix(r, r), rng.normal_matrix(2, r)};
}

Tensor3 random_direction(SeededRng& rng, Dims dims, double norm) {
  Tensor3 e = random_normal_tensor(rng, dims);
  e *= norm / frobenius_norm(e);
  return e;
}

double product_objective(const FactorTriple& f) { return sigma_min(f.A) * sigma_min(f.B); }

}  // namespace

TEST(Balance, PreservesTensorAndEqualizesColumns) {
  SeededRng rng(1);
  const FactorTriple f{rng.normal_matrix(4, 4), rng.normal_matrix(4, 4), rng.normal_matrix(3, 4)};
  const Tensor3 t = synthesize(f);
  for (BalanceMode mode : {BalanceMode::Default, BalanceMode::Als}) {
    const FactorTriple g = balance_factors(f, mode);
    EXPECT_LT(frobenius_norm(synthesize(g) - t), 1e-12 * frobenius_norm(t));
    EXPECT_EQ(g.C, f.C);
  }
  const FactorTriple d = balance_factors(f);
  for (Index r = 0; r < 4; ++r) EXPECT_NEAR(d.A.col(r).norm(), d.B.col(r).norm(), 1e-12);
}

TEST(Balance, AlreadyBalancedIsUnchanged) {
  SeededRng rng(2);
  FactorTriple f{rng.normal_matrix(3, 3), rng.normal_matrix(3, 3), rng.normal_matrix(2, 3)};
  for (Index r = 0; r < 3; ++r) {
    f.A.col(r).normalize();
    f.B.col(r).normalize();
  }
  const FactorTriple g = balance_factors(f);
  EXPECT_LT((g.A - f.A).norm(), 1e-14);
  EXPECT_LT((g.B - f.B).norm(), 1e-14);
}

TEST(Balance, UndoesInverseScaling) {
  SeededRng rng(3);
  FactorTriple f{rng.normal_matrix(3, 3), rng.normal_matrix(3, 3), rng.normal_matrix(2, 3)};
  f = balance_factors(f);
  FactorTriple skew = f;
  skew.A *= 10.0;
  skew.B /= 10.0;
  EXPECT_NEAR(product_objective(balance_factors(skew)), product_objective(f), 1e-12);
}

TEST(Balance, AlsNeverWorseThanDefault) {
  SeededRng rng(4);
  for (int n = 0; n < 20; ++n) {
    const FactorTriple f{rng.normal_matrix(5, 5), rng.normal_matrix(5, 5), rng.normal_matrix(2, 5)};
    EXPECT_GE(product_objective(balance_factors(f, BalanceMode::Als)),
              product_objective(balance_factors(f, BalanceMode::Default)) - 1e-9);
  }
}

TEST(Balance, ZeroColumnThrows) {
  FactorTriple f{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  f.A.col(1).setZero();
  EXPECT_THROW(balance_factors(f), ArgumentError);
}

TEST(PencilEpsilonTest, IdentityFactors) {
  SeededRng rng(5);
  const FactorTriple f{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const PencilEpsilon e = pencil_existence_epsilon(synthesize(f), rng);
  EXPECT_NEAR(e.epsilon, 0.5, 1e-12);
  EXPECT_NEAR(e.min_chordal_gap, 1.0, 1e-12);
}

TEST(PencilEpsilonTest, RepeatedColumnGivesZero) {
  SeededRng rng(6);
  FactorTriple f = random_pencil_factors(rng, 3);
  f.C.col(2) = 2.0 * f.C.col(0);
  const PencilEpsilon e = pencil_existence_epsilon(synthesize(f), rng);
  EXPECT_EQ(e.epsilon, 0.0);
  EXPECT_NE(e.diagnosis.verdict, PencilVerdict::Simple);
}

TEST(PencilEpsilonTest, SoundUnderRandomPerturbations) {
  SeededRng rng(7);
  for (int n = 0; n < 10; ++n) {
    const Tensor3 p = synthesize(random_pencil_factors(rng, 4));
    const PencilEpsilon e = pencil_existence_epsilon(p, rng);
    ASSERT_GT(e.epsilon, 0.0);
    const Spectrum sp = *e.diagnosis.spectrum;
    for (int k = 0; k < 100; ++k) {
      const double size = e.epsilon * (0.999 * rng.uniform());
      const Tensor3 e_dir = random_direction(rng, p.dims(), size);
      const PencilDiagnosis d = pencil_spectrum(p + e_dir, rng);
      ASSERT_EQ(d.verdict, PencilVerdict::Simple);
      EXPECT_TRUE(d.spectrum->all_real);
      EXPECT_LE(matching_distance(sp, *d.spectrum), size / (e.sigma_min_a * e.sigma_min_b) + 1e-9);
      EXPECT_TRUE(slice_mix_probe(p + e_dir, rng, 4, 1e-8).invertible);
    }
  }
}

TEST(PencilEpsilonTest, InvariantUnderPermutationAndScaling) {
  SeededRng rng(8);
  const FactorTriple f = random_pencil_factors(rng, 4);
  FactorTriple g = f;
  const Eigen::Vector4i order(2, 0, 3, 1);
  for (Index r = 0; r < 4; ++r) {
    g.A.col(r) = 3.0 * (r + 1) * f.A.col(order(r));
    g.B.col(r) = f.B.col(order(r)) / (3.0 * (r + 1));
    g.C.col(r) = f.C.col(order(r));
  }
  SeededRng r1(9), r2(9);
  const double ef = pencil_existence_epsilon(synthesize(f), r1, {}, BalanceMode::Als).epsilon;
  const double eg = pencil_existence_epsilon(synthesize(g), r2, {}, BalanceMode::Als).epsilon;
  EXPECT_NEAR(ef, eg, 1e-6 * ef);
}

TEST(MatchingBound, ZeroAndBoundary) {
  SeededRng rng(10);
  const FactorTriple f = random_pencil_factors(rng, 3);
  const Tensor3 p = synthesize(f);
  const MatchingDistanceBound zero = matching_distance_bound(p, f, p, ErrorNorm::Frobenius, rng);
  EXPECT_EQ(zero.bound, 0.0);
  EXPECT_TRUE(zero.certified);

  const Tensor3 w = p + random_direction(rng, p.dims(), zero.threshold * 1.0001);
  const MatchingDistanceBound over = matching_distance_bound(p, f, w, ErrorNorm::Frobenius, rng);
  EXPECT_FALSE(over.certified);
  EXPECT_GT(over.bound, 0.0);

  const MatchingDistanceBound est = matching_distance_bound(p, f, w, ErrorNorm::SpEstimate, rng);
  EXPECT_FALSE(est.sound);
  EXPECT_LE(est.error_norm, over.error_norm + 1e-12);
}

TEST(MatchingBound, HoldsForCertifiedPairs) {
  SeededRng rng(11);
  for (int n = 0; n < 20; ++n) {
    const FactorTriple f = random_pencil_factors(rng, 3 + n % 3);
    const Tensor3 p = synthesize(f);
    const double threshold = matching_distance_bound(p, f, p, ErrorNorm::Frobenius, rng).threshold;
    const Tensor3 w = p + random_direction(rng, p.dims(), 0.5 * threshold);
    const MatchingDistanceBound b = matching_distance_bound(p, f, w, ErrorNorm::Frobenius, rng);
    ASSERT_TRUE(b.certified);
    const PencilDiagnosis dp = pencil_spectrum(p, rng), dw = pencil_spectrum(w, rng);
    EXPECT_LE(matching_distance(*dp.spectrum, *dw.spectrum), b.bound + 1e-9);
  }
}

TEST(BauerFike, ZeroError) {
  SeededRng rng(12);
  const FactorTriple f{rng.normal_matrix(3, 3), rng.normal_matrix(3, 3), rng.normal_matrix(4, 3)};
  const BauerFikeBound b = bauer_fike_sv_bound(f, Tensor3(3, 3, 4), SpecialCase::None, rng);
  EXPECT_EQ(b.bound, 0.0);
  EXPECT_NEAR(b.coefficient, std::sqrt(3.0), 1e-15);
  EXPECT_EQ(bauer_fike_sv_bound(f, Tensor3(3, 3, 4), SpecialCase::K2, rng).coefficient, 1.0);
}

TEST(BauerFike, SingularFactorThrows) {
  SeededRng rng(13);
  FactorTriple f{rng.normal_matrix(3, 3), rng.normal_matrix(3, 3), rng.normal_matrix(2, 3)};
  f.A.col(2) = f.A.col(0);
  EXPECT_THROW(bauer_fike_sv_bound(f, Tensor3(3, 3, 2), SpecialCase::None, rng), PreconditionError);
}

TEST(BauerFike, CounterexampleNeedsACoefficient) {
  const auto pair = fixtures::bauer_fike_pair();
  SeededRng rng(14);
  const Spectrum st = spectrum_from_columns(pair.t.C), sw = spectrum_from_columns(pair.w.C);
  EXPECT_NEAR(spectral_variation(st, sw), 1.0, 1e-15);
  const Tensor3 e = synthesize(pair.w) - synthesize(pair.t);
  const BauerFikeBound shared = bauer_fike_sv_bound(pair.t, e, SpecialCase::SharedFactor, rng, 50);
  EXPECT_LT(shared.bound, 1.0);
  EXPECT_GE(shared.transformed.unfolding_norms[2], 0.97);
  EXPECT_LT(shared.transformed.unfolding_norms[2], 1.0);
  const BauerFikeBound general = bauer_fike_sv_bound(pair.t, e, SpecialCase::None, rng, 50);
  EXPECT_GE(general.bound, 1.0);
}

TEST(BauerFike, SpectralVariationBoundedAt40dB) {
  SeededRng rng(15);
  for (int n = 0; n < 10; ++n) {
    const RandomRankR tr = random_rank_r(rng, {4, 4, 4}, 4);
    const FactorTriple fw = normalize_c_columns(tr.factors);
    const Tensor3 e = add_noise_at_snr(tr.tensor, rng, 40.0).noise;
    const BauerFikeBound b = bauer_fike_sv_bound(fw, e, SpecialCase::None, rng);
    // The exact-rank structured perturbation W = [[A, B, C + dC]] has a known spectrum.
    FactorTriple pert = fw;
    pert.C += 1e-3 * rng.normal_matrix(4, 4);
    const Tensor3 e2 = synthesize(pert) - synthesize(fw);
    const BauerFikeBound b2 = bauer_fike_sv_bound(fw, e2, SpecialCase::SharedFactor, rng);
    const double sv = spectral_variation(spectrum_from_columns(fw.C), spectrum_from_columns(pert.C));
    EXPECT_LE(sv, b2.bound_upper + 1e-12);
    EXPECT_GT(b.bound_upper, 0.0);
  }
}

TEST(RandomOrthogonalTest, IsOrthogonal) {
  SeededRng rng(16);
  for (Index k : {1, 2, 5, 9}) {
    const Matrix q = random_orthogonal(rng, k);
    EXPECT_LT((q.transpose() * q - Matrix::Identity(k, k)).norm(), 1e-12);
  }
}

TEST(Pairing, SmallCases) {
  Matrix e = Matrix::Zero(4, 4);
  e(0, 1) = e(1, 0) = 1.0;
  e(2, 3) = e(3, 2) = 1.0;
  e(0, 2) = e(2, 0) = 1.5;
  e(1, 3) = e(3, 1) = 0.1;
  // {(0,1),(2,3)} gives 2, {(0,2),(1,3)} gives 2.26.
  const auto p = optimal_pairing(e);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], std::make_pair(0, 2));
  EXPECT_EQ(p[1], std::make_pair(1, 3));
  EXPECT_EQ(optimal_pairing(Matrix::Ones(3, 3)).size(), 1u);
}

namespace {

// Oracle: best sum of squares over all maximum matchings, allowing one unmatched slice for odd K.
double best_pairing_value(const Matrix& e, unsigned used, int skips) {
  const int k = static_cast<int>(e.rows());
  int i = 0;
  while (i < k && (used >> i & 1u)) ++i;
  if (i == k) return 0.0;
  double b = skips > 0 ? best_pairing_value(e, used | 1u << i, skips - 1) : -1.0;
  for (int j = i + 1; j < k; ++j)
    if (!(used >> j & 1u)) b = std::max(b, e(i, j) * e(i, j) + best_pairing_value(e, used | 1u << i | 1u << j, skips));
  return b;
}

}  // namespace

TEST(Pairing, OptimalAgainstBruteForce) {
  SeededRng rng(17);
  for (int k : {2, 3, 5, 8, 11, 12, 14}) {
    Matrix e = rng.normal_matrix(k, k).cwiseAbs();
    e = (e + e.transpose()).eval();
    const auto p = optimal_pairing(e);
    EXPECT_EQ(static_cast<int>(p.size()), k / 2);
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    double value = 0.0;
    for (auto [i, j] : p) {
      EXPECT_FALSE(seen[i]);
      EXPECT_FALSE(seen[j]);
      seen[i] = seen[j] = true;
      value += e(i, j) * e(i, j);
    }
    EXPECT_NEAR(value, best_pairing_value(e, 0u, k % 2), 1e-12) << "K=" << k;
  }
}

TEST(MultiPencil, K2ReducesToSinglePencil) {
  SeededRng rng(18);
  const Tensor3 p = synthesize(random_pencil_factors(rng, 4));
  SeededRng r1(19);
  BoundOptions opts;
  opts.n_unitaries = 0;
  const BoundReport rep = multi_pencil_epsilon(p, r1, opts);
  SeededRng r2(20);
  const double direct = pencil_existence_epsilon(p, r2).epsilon;
  ASSERT_EQ(rep.pairing.size(), 1u);
  EXPECT_EQ(rep.pairing[0], std::make_pair(1, 2));
  EXPECT_NEAR(rep.epsilon, direct, 1e-9 * direct);
  EXPECT_NEAR(rep.existence_radius, rep.epsilon / 2, 1e-15);
  EXPECT_EQ(rep.verdict, Verdict::Certified);
}

TEST(MultiPencil, SingularMixExampleIsInconclusive) {
  SeededRng rng(21);
  BoundOptions opts;
  opts.n_unitaries = 10;
  const BoundReport rep = multi_pencil_epsilon(fixtures::singular_mix_tensor(), rng, opts);
  EXPECT_EQ(rep.epsilon, 0.0);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
}

TEST(MultiPencil, ReportInvariants) {
  SeededRng rng(22);
  const Tensor3 t = random_rank_r(rng, {5, 5, 5}, 5).tensor;
  BoundOptions opts;
  opts.n_unitaries = 5;
  const BoundReport rep = multi_pencil_epsilon(t, rng, opts);
  EXPECT_NEAR(rep.epsilon, Eigen::Map<const Vector>(rep.epsilon_vector.data(), 2).norm(), 1e-12);
  EXPECT_EQ(rep.best_so_far.size(), 6u);
  EXPECT_LT((rep.unitary.transpose() * rep.unitary - Matrix::Identity(5, 5)).norm(), 1e-12);
  for (auto [i, j] : rep.pairing) {
    EXPECT_GE(i, 1);
    EXPECT_LE(j, 5);
  }
  EXPECT_THROW(multi_pencil_epsilon(Tensor3(3, 3, 1), rng, opts), ArgumentError);
  const auto json = nlohmann::json::parse(report_to_json(rep));
  EXPECT_EQ(json["schema_version"], kSchemaVersion);
  EXPECT_DOUBLE_EQ(json["epsilon"].get<double>(), rep.epsilon);
}

TEST(MultiPencil, MoreUnitariesNeverHurt) {
  SeededRng gen(23);
  const Tensor3 t = random_rank_r(gen, {4, 4, 4}, 4).tensor;
  double prev = 0.0;
  for (int m : {1, 3, 10, 30}) {
    SeededRng rng(99);
    BoundOptions opts;
    opts.n_unitaries = m;
    const BoundReport rep = multi_pencil_epsilon(t, rng, opts);
    EXPECT_GE(rep.epsilon, prev);
    prev = rep.epsilon;
    for (std::size_t i = 1; i < rep.best_so_far.size(); ++i) EXPECT_GE(rep.best_so_far[i], rep.best_so_far[i - 1]);
  }
}

TEST(MultiPencil, ReorderNeverHurts) {
  SeededRng gen(24);
  for (int n = 0; n < 5; ++n) {
    const Tensor3 t = random_rank_r(gen, {6, 6, 6}, 6).tensor;
    BoundOptions a, b;
    a.n_unitaries = b.n_unitaries = 4;
    b.reorder = true;
    SeededRng r1(7 + n), r2(7 + n);
    EXPECT_GE(multi_pencil_epsilon(t, r2, b).epsilon, multi_pencil_epsilon(t, r1, a).epsilon - 1e-12);
  }
}

TEST(MultiPencil, RepeatedColumnMakesEverySubpencilDefective) {
  SeededRng rng(25);
  FactorTriple f{rng.normal_matrix(4, 4), rng.normal_matrix(4, 4), rng.normal_matrix(4, 4)};
  f.C.col(3) = f.C.col(1);
  const Tensor3 t = synthesize(f);
  BoundOptions opts;
  opts.n_unitaries = 5;
  const BoundReport rep = multi_pencil_epsilon(t, rng, opts);
  EXPECT_EQ(rep.epsilon, 0.0);
  for (const auto& pp : rep.per_pencil) EXPECT_EQ(pp.epsilon, 0.0);
}

TEST(Certify, AlreadyCompressedMatchesMultiPencil) {
  SeededRng gen(26);
  const Tensor3 t = random_rank_r(gen, {4, 4, 3}, 4).tensor;
  SeededRng r1(5), r2(5);
  EXPECT_EQ(certify_neighborhood(t, 4, r1).epsilon, multi_pencil_epsilon(t, r2).epsilon);
}

TEST(Certify, EpsilonOfLargeTensorEqualsCoreEpsilon) {
  SeededRng gen(27);
  const Tensor3 t = random_rank_r(gen, {10, 10, 10}, 4).tensor;
  const Compression c = mlsvd_truncate(t, {4, 4, 4});
  SeededRng r1(3), r2(3);
  BoundOptions opts;
  opts.n_unitaries = 3;
  const BoundReport pipeline = certify_neighborhood(t, 4, r1, opts);
  const BoundReport direct = multi_pencil_epsilon(c.core, r2, opts);
  EXPECT_NEAR(pipeline.epsilon, direct.epsilon, 1e-9);
  EXPECT_EQ(pipeline.multilinear_rank[2], 4);
}

TEST(Certify, InvariantUnderOrthogonalEmbedding) {
  SeededRng gen(28);
  const Tensor3 p = synthesize(random_pencil_factors(gen, 3));
  Tensor3 big = p;
  for (int m = 1; m <= 3; ++m) {
    const Index n = m == 3 ? 4 : 7;
    big = modal_product(big, random_orthogonal(gen, n).leftCols(p.dim(m)), m);
  }
  SeededRng r1(4), r2(4);
  BoundOptions opts;
  opts.n_unitaries = 0;
  EXPECT_NEAR(certify_neighborhood(big, 3, r1, opts).epsilon, multi_pencil_epsilon(p, r2, opts).epsilon, 1e-9);
}

TEST(Certify, RankViolationThrows) {
  SeededRng rng(29);
  EXPECT_THROW(certify_neighborhood(random_normal_tensor(rng, {6, 6, 6}), 3, rng), PreconditionError);
}

TEST(Measured, ExactRankIsCertified) {
  SeededRng rng(30);
  const Tensor3 t = random_rank_r(rng, {10, 10, 10}, 4).tensor;
  MeasuredOptions opts;
  opts.als.restarts = 3;
  const MeasuredCertificate c = mlsvd_existence_check(t, 4, rng, opts);
  EXPECT_EQ(c.verdict, Verdict::Certified);
  EXPECT_LT(c.fit_error, 1e-6);
  EXPECT_NEAR(c.fit_error, std::hypot(c.mlsvd_error, c.core_fit_error), 1e-15);
  const auto json = nlohmann::json::parse(certificate_to_json(c));
  EXPECT_EQ(json["verdict"], "Certified");
}

TEST(Measured, WhiteNoiseIsInconclusive) {
  SeededRng rng(31);
  for (int n = 0; n < 5; ++n) {
    const MeasuredCertificate c = mlsvd_existence_check(random_normal_tensor(rng, {8, 8, 8}), 4, rng);
    EXPECT_EQ(c.verdict, Verdict::Inconclusive);
    EXPECT_LE(c.slack, 0.0);
  }
}

TEST(Measured, VerdictMatchesStrictInequality) {
  SeededRng rng(32);
  for (double snr : {-10.0, 0.0, 10.0, 30.0}) {
    const Tensor3 t = random_rank_r(rng, {6, 6, 6}, 3).tensor;
    const Tensor3 m = add_noise_at_snr(t, rng, snr).noisy;
    const MeasuredCertificate c = mlsvd_existence_check(m, 3, rng);
    EXPECT_EQ(c.verdict == Verdict::Certified, c.fit_error < c.epsilon - c.mlsvd_error);
  }
}
