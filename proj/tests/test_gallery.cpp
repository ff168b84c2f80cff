#include <random>

#include <gtest/gtest.h>

#include "nepbe/gallery.hpp"
#include "nepbe/manifold.hpp"
#include "support.hpp"

using namespace nepbe;
using namespace testing_support;

TEST(Gallery, BeamA0SmallCase) {
  RealMatrix expect(3, 3);
  expect << -2, 1, 0, 1, -2, -1, 0, -3, 3;
  EXPECT_EQ(Matrix(beam_a0(3)), Matrix(expect.cast<Scalar>()));
}

TEST(Gallery, BeamTermsAndFunctions) {
  const GalleryProblem g = build_beam(50);
  ASSERT_EQ(g.nep.k(), 3);
  const Scalar z(0.7, -0.2);
  const RowVector f = g.nep.function_values(z);
  EXPECT_EQ(f(0), -z);
  EXPECT_EQ(f(1), Scalar(1.0));
  EXPECT_LT(std::abs(f(2) - std::exp(-z)), 1e-15);
  EXPECT_EQ(g.specs()[0].kind, StructureKind::scaled_identity);
  EXPECT_EQ(g.specs()[1].kind, StructureKind::sparsity);
  ASSERT_EQ(g.specs()[2].pattern.size(), 1u);
  EXPECT_EQ(g.specs()[2].pattern[0], std::make_pair(Index(49), Index(49)));
}

TEST(Gallery, DeterministicInSeed) {
  for (const char* name : {"random", "random-symmetric", "random-sparse", "quadratic"}) {
    const GalleryProblem a = build_gallery(name, 12, 5);
    const GalleryProblem b = build_gallery(name, 12, 5);
    const GalleryProblem c = build_gallery(name, 12, 6);
    double diff_same = 0.0;
    double diff_other = 0.0;
    for (Index j = 0; j < a.nep.k(); ++j) {
      diff_same += (a.nep.coefficient(j).dense() - b.nep.coefficient(j).dense()).norm();
      diff_other += (a.nep.coefficient(j).dense() - c.nep.coefficient(j).dense()).norm();
    }
    EXPECT_EQ(diff_same, 0.0) << name;
    EXPECT_GT(diff_other, 0.0) << name;
  }
  EXPECT_THROW(build_gallery("nope", 4, 0), std::invalid_argument);
}

TEST(Gallery, CoefficientsLieOnTheirManifolds) {
  for (const char* name : {"beam", "random", "random-symmetric", "random-sparse", "quadratic"}) {
    const GalleryProblem g = build_gallery(name, 16, 1);
    for (Index j = 0; j < g.nep.k(); ++j) {
      const auto m = riemann::make_manifold(g.specs()[static_cast<std::size_t>(j)], 16);
      EXPECT_NO_THROW(m->from_coefficient(g.nep.coefficient(j))) << name << " term " << j;
    }
  }
}

TEST(Gallery, PerturbationHitsTargetNormAndKeepsStructure) {
  std::mt19937_64 rng(3);
  for (const char* name : {"beam", "random-symmetric", "random-sparse", "quadratic"}) {
    const GalleryProblem g = build_gallery(name, 20, 2);
    for (PerturbationLaw law : {PerturbationLaw::equal_share, PerturbationLaw::entrywise}) {
      const Perturbation p = perturb(g, 0.3, rng, law);
      EXPECT_NEAR(p.norm, 0.3, 1e-10) << name;
      double total = 0.0;
      for (Index j = 0; j < g.nep.k(); ++j) {
        const Matrix d = p.nep.coefficient(j).dense() - g.nep.coefficient(j).dense();
        total += d.squaredNorm();
        const auto m = riemann::make_manifold(g.specs()[static_cast<std::size_t>(j)], 20);
        EXPECT_NO_THROW(m->from_coefficient(p.nep.coefficient(j))) << name << " term " << j;
        if (law == PerturbationLaw::equal_share) {
          EXPECT_NEAR(d.norm(), 0.3 / std::sqrt(static_cast<double>(g.nep.k())), 1e-10) << name;
        }
      }
      EXPECT_NEAR(std::sqrt(total), 0.3, 1e-10) << name;
    }
  }
}

TEST(Gallery, ZeroMagnitudeLeavesProblemUnchanged) {
  std::mt19937_64 rng(4);
  const GalleryProblem g = build_quadratic_lowrank(10, 0, 2);
  const Perturbation p = perturb(g, 0.0, rng);
  EXPECT_LT(p.norm, 1e-13);
  for (Index j = 0; j < g.nep.k(); ++j) {
    EXPECT_LT((p.nep.coefficient(j).dense() - g.nep.coefficient(j).dense()).norm(), 1e-13);
  }
}

TEST(Gallery, UnstructuredPerturbationIsDense) {
  std::mt19937_64 rng(5);
  const GalleryProblem g = build_beam(10);
  const Perturbation p = perturb(g, 1e-3, rng, PerturbationLaw::equal_share, false);
  const Matrix d = p.nep.coefficient(2).dense() - g.nep.coefficient(2).dense();
  EXPECT_GT((d.array().abs() > 0.0).count(), 50);
}

TEST(Gallery, EnsembleMembersAreDeterministicAndInRange) {
  const GalleryProblem g = build_random_split(8, 0);
  EnsembleOptions eo;
  eo.count = 10;
  eo.structured = false;
  const double fn = g.nep.coefficient_norm();
  for (int i = 0; i < 10; ++i) {
    const Perturbation a = ensemble_member(g, eo, i);
    const Perturbation b = ensemble_member(g, eo, i);
    EXPECT_EQ(a.norm, b.norm);
    EXPECT_GE(a.norm, eo.lo * fn * (1 - 1e-12));
    EXPECT_LE(a.norm, eo.hi * fn * (1 + 1e-12));
  }
  EXPECT_NE(ensemble_member(g, eo, 0).norm, ensemble_member(g, eo, 1).norm);
}
