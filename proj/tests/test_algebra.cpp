#include "doctest.h"

#include "corrlab/algebra.hpp"

using namespace corrlab;

namespace {

// independent commutant basis through the generic intertwiner solver
std::vector<Mat> commutant_brute(const Representation& rep) {
  std::vector<std::pair<Mat, Mat>> pairs;
  for (const auto& g : rep.images) pairs.emplace_back(g, g);
  return solve_intertwiners(pairs);
}

Mat span_matrix(const std::vector<Mat>& ops) {
  Mat m(ops.empty() ? 0 : ops[0].size(), static_cast<int>(ops.size()));
  for (size_t k = 0; k < ops.size(); ++k) m.col(static_cast<int>(k)) = vec(ops[k]);
  return m;
}

}  // namespace

TEST_SUITE("algebra") {
  TEST_CASE("generator indexing and matrix unit relations") {
    MultiMatrixAlgebra a{{2, 3}};
    CHECK(a.dim() == 13);
    CHECK(a.canonical_dim() == 5);
    for (int g = 0; g < a.dim(); ++g) {
      auto gi = a.gen_index(g);
      CHECK(a.flat_index(gi.block, gi.p, gi.q) == g);
    }
    auto e01 = AlgebraElement::generator(a, a.flat_index(0, 0, 1));
    auto e10 = AlgebraElement::generator(a, a.flat_index(0, 1, 0));
    auto e00 = AlgebraElement::generator(a, a.flat_index(0, 0, 0));
    CHECK((e01 * e10 - e00).norm() == doctest::Approx(0.0));
    CHECK((e10 * e01).block[0](1, 1) == cplx(1.0));
    auto f00 = AlgebraElement::generator(a, a.flat_index(1, 0, 0));
    CHECK((e01 * f00).norm() == doctest::Approx(0.0));
    CHECK((e01.adjoint() - e10).norm() == doctest::Approx(0.0));

    auto x = AlgebraElement::from_coords(a, e01.coords());
    CHECK((x - e01).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("canonical representation layout") {
    MultiMatrixAlgebra a{{2, 3}};
    auto rep = Representation::canonical(a, {1, 2});
    CHECK(rep.space_dim == 8);
    CHECK(rep.hom_defect() == doctest::Approx(0.0));
    CHECK(rep.faithful());

    Mat img = rep.apply_gen(a.flat_index(0, 0, 1));
    CHECK(img(0, 1) == cplx(1.0));
    CHECK(img.cwiseAbs().sum() == doctest::Approx(1.0));

    // second block with multiplicity two, columns ordered (p, r) with p major
    Mat img2 = rep.apply_gen(a.flat_index(1, 0, 1));
    CHECK(img2(2, 4) == cplx(1.0));
    CHECK(img2(3, 5) == cplx(1.0));
    CHECK(img2.cwiseAbs().sum() == doctest::Approx(2.0));

    auto partial = Representation::canonical(a, {1, 0});
    CHECK(partial.space_dim == 2);
    CHECK(!partial.faithful());
    CHECK(partial.hom_defect() == doctest::Approx(0.0));
  }

  TEST_CASE("from_images validates and detects multiplicities") {
    MultiMatrixAlgebra a{{2, 3}};
    auto rep = Representation::canonical(a, {1, 2});
    Rng rng(11);
    Mat u = rng.unitary(rep.space_dim);
    std::vector<Mat> imgs;
    for (const auto& g : rep.images) imgs.push_back(u * g * u.adjoint());
    auto back = Representation::from_images(a, imgs, {});
    CHECK(back.multiplicities == std::vector<int>{1, 2});

    imgs[3](0, 0) += 0.5;
    CHECK_THROWS_AS(Representation::from_images(a, imgs, {}), Error);
    try {
      Representation::from_images(a, imgs, {});
    } catch (const Error& e) {
      CHECK(e.code() == Err::NotHomomorphism);
    }
  }

  TEST_CASE("commutant structure against brute force") {
    MultiMatrixAlgebra a{{2, 3}};
    Rng rng(5);
    auto rep0 = Representation::canonical(a, {1, 2});
    Mat u = rng.unitary(rep0.space_dim);
    std::vector<Mat> imgs;
    for (const auto& g : rep0.images) imgs.push_back(u * g * u.adjoint());
    auto rep = Representation::from_images(a, imgs, {});

    auto info = commutant(rep);
    CHECK(info.algebra.blocks == std::vector<int>{1, 2});
    CHECK(info.rep.multiplicities == std::vector<int>{2, 3});
    CHECK(info.rep.space_dim == rep.space_dim);
    CHECK(info.rep.hom_defect() <= 1e-10);

    for (const auto& c : info.rep.images)
      for (const auto& g : rep.images)
        CHECK(op_norm(c * g - g * c) <= 1e-10);

    auto brute = commutant_brute(rep);
    CHECK(static_cast<int>(brute.size()) == 5);  // 1^2 + 2^2
    CHECK(info.algebra.dim() == 5);
    CHECK(span_distance(span_matrix(brute), span_matrix(info.rep.images)) <= 1e-8);
  }

  TEST_CASE("commutant with a vanishing multiplicity") {
    MultiMatrixAlgebra a{{2, 3}};
    auto rep = Representation::canonical(a, {2, 0});
    auto info = commutant(rep);
    CHECK(info.algebra.blocks == std::vector<int>{2});
    CHECK(info.source_block == std::vector<int>{0});
    CHECK(info.rep.multiplicities == std::vector<int>{2});
    auto brute = commutant_brute(rep);
    CHECK(brute.size() == 4);
  }

  TEST_CASE("abstract coordinates invert the commutant inclusion") {
    MultiMatrixAlgebra a{{2, 2, 1}};
    Rng rng(17);
    auto rep0 = Representation::canonical(a, {1, 2, 3});
    Mat u = rng.unitary(rep0.space_dim);
    std::vector<Mat> imgs;
    for (const auto& g : rep0.images) imgs.push_back(u * g * u.adjoint());
    auto rep = Representation::from_images(a, imgs, {});
    auto info = commutant(rep);

    Vec c = rng.gauss_vec(info.algebra.dim());
    auto x = AlgebraElement::from_coords(info.algebra, c);
    Mat op = info.rep.apply(x);
    auto [back, residual] = abstract_coords(info.rep, op);
    CHECK(residual <= 1e-10);
    CHECK((back - x).norm() <= 1e-10);

    // something outside the commutant leaves a residual
    auto [junk, bad] = abstract_coords(info.rep, rng.ginibre(rep.space_dim, rep.space_dim));
    (void)junk;
    CHECK(bad > 1e-3);
  }

  TEST_CASE("restriction to an invariant subspace") {
    MultiMatrixAlgebra a{{2}};
    auto rep = Representation::canonical(a, {2});
    // first copy inside the multiplicity space, rows ordered (p, r)
    Mat iso = Mat::Zero(4, 2);
    iso(0, 0) = 1.0;
    iso(2, 1) = 1.0;
    auto sub = restrict_representation(rep, iso);
    CHECK(sub.multiplicities == std::vector<int>{1});

    Mat bad = Mat::Zero(4, 1);
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(restrict_representation(rep, bad), Error);
  }

  TEST_CASE("direct sums add multiplicities") {
    MultiMatrixAlgebra a{{2, 1}};
    auto r1 = Representation::canonical(a, {1, 0});
    auto r2 = Representation::canonical(a, {0, 2});
    auto sum = direct_sum(r1, r2);
    CHECK(sum.multiplicities == std::vector<int>{1, 2});
    CHECK(sum.space_dim == 4);
    CHECK(sum.hom_defect() == doctest::Approx(0.0));
  }

  TEST_CASE("random automorphisms are unital homomorphisms") {
    MultiMatrixAlgebra a{{2, 2, 3}};
    Rng rng(23);
    for (int t = 0; t < 5; ++t) {
      auto alpha = random_automorphism(a, rng);
      CHECK(alpha.hom_defect() <= 1e-12);
      CHECK(alpha.is_injective());
      CHECK(alpha.unit_norm() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("random cp maps are completely positive contractions") {
    MultiMatrixAlgebra a{{2, 3}};
    Rng rng(29);
    for (int t = 0; t < 5; ++t) {
      auto theta = random_cp_map(a, rng);
      CHECK(theta.choi_min_eigenvalue() >= -1e-10);
      CHECK(theta.unit_norm() <= 1.0);
      // positivity survives on a random positive element
      Vec c = rng.gauss_vec(a.dim());
      auto x = AlgebraElement::from_coords(a, c);
      auto pos = x.adjoint() * x;
      auto img = theta.apply(pos);
      Eigen::SelfAdjointEigenSolver<Mat> es(img.block_diag());
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }

  TEST_CASE("composition of maps") {
    MultiMatrixAlgebra a{{2, 2}};
    Rng rng(31);
    auto alpha = random_automorphism(a, rng);
    auto beta = random_automorphism(a, rng);
    auto both = alpha.compose(beta);
    CHECK(both.hom_defect() <= 1e-12);
    Vec c = rng.gauss_vec(a.dim());
    auto x = AlgebraElement::from_coords(a, c);
    CHECK((both.apply(x) - alpha.apply(beta.apply(x))).norm() <= 1e-12);
  }
}
