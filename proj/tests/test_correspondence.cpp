#include "doctest.h"

#include "corrlab/correspondence.hpp"

using namespace corrlab;

namespace {

IMat imat2(int a, int b, int c, int d) {
  IMat m(2, 2);
  m << a, b, c, d;
  return m;
}

AlgebraMap trace_state_map(const MultiMatrixAlgebra& a) {
  // x maps to the normalized trace times the identity
  double total = a.canonical_dim();
  AlgebraMap map{a, a, {}};
  for (int g = 0; g < a.dim(); ++g) {
    auto gi = a.gen_index(g);
    AlgebraElement img = AlgebraElement::zero(a);
    if (gi.p == gi.q) img = AlgebraElement::identity(a) * cplx(1.0 / total);
    map.images.push_back(img);
  }
  return map;
}

AlgebraMap kraus_map(const MultiMatrixAlgebra& a, const std::vector<AlgebraElement>& ops) {
  AlgebraMap map{a, a, {}};
  for (int g = 0; g < a.dim(); ++g) {
    AlgebraElement img = AlgebraElement::zero(a);
    auto x = AlgebraElement::generator(a, g);
    for (const auto& k : ops) img = img + k * x * k.adjoint();
    map.images.push_back(img);
  }
  return map;
}

}  // namespace

TEST_SUITE("correspondence") {
  TEST_CASE("identity correspondence satisfies the bimodule laws") {
    MultiMatrixAlgebra a{{2}};
    auto e = identity_correspondence(a);
    CHECK(e.dim == 4);
    auto report = e.validate();
    CHECK(report.worst() <= 1e-12);
    CHECK(report.definite);
    IMat mm = multiplicity_matrix(e);
    CHECK(mm(0, 0) == 1);

    MultiMatrixAlgebra two{{2, 3}};
    auto e2 = identity_correspondence(two);
    CHECK(e2.validate().worst() <= 1e-12);
    IMat mm2 = multiplicity_matrix(e2);
    CHECK(mm2 == imat2(1, 0, 0, 1));
  }

  TEST_CASE("quiver correspondences expose their count matrix") {
    IMat c = imat2(0, 1, 0, 0);
    auto e = quiver_correspondence(c);
    CHECK(e.dim == 1);
    CHECK(e.validate().worst() <= 1e-14);
    CHECK(multiplicity_matrix(e) == c);

    auto sq = tensor(e, e);
    CHECK(sq.product.dim == 0);  // no composable paths

    IMat c2 = imat2(1, 1, 0, 1);
    auto f = quiver_correspondence(c2);
    auto ff = tensor(f, f);
    CHECK(ff.product.validate().worst() <= 1e-10);
    IMat expect = imat2(1, 2, 0, 1);  // matrix square of the counts
    CHECK(multiplicity_matrix(ff.product) == expect);
  }

  TEST_CASE("tensoring with the identity changes nothing") {
    IMat c2 = imat2(1, 1, 0, 1);
    auto f = quiver_correspondence(c2);
    auto unit = identity_correspondence(f.left_alg);
    auto prod = tensor(unit, f);
    CHECK(prod.product.dim == f.dim);
    auto iso = find_isomorphism(prod.product, f, false);
    REQUIRE(iso.has_value());
    CHECK(iso->defect <= 1e-10);
  }

  TEST_CASE("gns module of the trace state") {
    MultiMatrixAlgebra a{{2}};
    auto theta = trace_state_map(a);
    CHECK(theta.choi_min_eigenvalue() >= -1e-14);
    auto e = gns_correspondence(theta);
    // the pairing never degenerates, all sixteen elementary tensors survive
    CHECK(e.dim == 16);
    CHECK(e.validate().worst() <= 1e-10);
    IMat mm = multiplicity_matrix(e);
    CHECK(mm(0, 0) == 4);
  }

  TEST_CASE("gns module of an invertible rank-one kraus map collapses") {
    MultiMatrixAlgebra a{{2}};
    AlgebraElement k = AlgebraElement::zero(a);
    k.block[0] << cplx(1.0, 0.3), cplx(0.2, -0.1), cplx(0.0, 0.5), cplx(1.4, 0.0);
    auto theta = kraus_map(a, {k});
    auto e = gns_correspondence(theta);
    CHECK(e.dim == 4);
    CHECK(e.validate().worst() <= 1e-10);
    auto iso = find_isomorphism(e, identity_correspondence(a), false);
    REQUIRE(iso.has_value());
    CHECK(iso->defect <= 1e-9);
  }

  TEST_CASE("gns module of a random cp map on a two block algebra") {
    MultiMatrixAlgebra a{{2, 1}};
    Rng rng(41);
    auto theta = random_cp_map(a, rng);
    auto e = gns_correspondence(theta);
    CHECK(e.validate().worst() <= 1e-9);
    CHECK(e.dim <= a.dim() * a.dim());
    multiplicity_matrix(e);  // integrality must hold
  }

  TEST_CASE("twisted left action by an inner automorphism is equivalent to none") {
    MultiMatrixAlgebra a{{2}};
    Rng rng(43);
    Mat u = rng.unitary(2);
    AlgebraMap alpha{a, a, {}};
    for (int g = 0; g < a.dim(); ++g) {
      auto x = AlgebraElement::generator(a, g);
      AlgebraElement img = AlgebraElement::zero(a);
      img.block[0] = u * x.block[0] * u.adjoint();
      alpha.images.push_back(img);
    }
    auto e = endomorphism_correspondence(alpha);
    CHECK(e.validate().worst() <= 1e-12);
    auto iso = find_isomorphism(e, identity_correspondence(a), false);
    REQUIRE(iso.has_value());
    CHECK(iso->defect <= 1e-9);
  }

  TEST_CASE("block swap needs the flexible matching") {
    MultiMatrixAlgebra a{{1, 1}};
    std::vector<int> swap{1, 0};
    auto alpha = permutation_automorphism(a, swap);
    auto e = endomorphism_correspondence(alpha);
    CHECK(multiplicity_matrix(e) == imat2(0, 1, 1, 0));

    auto strict = find_isomorphism(e, identity_correspondence(a), false);
    CHECK(!strict.has_value());
    auto flex = find_isomorphism(e, identity_correspondence(a), true);
    REQUIRE(flex.has_value());
    CHECK(flex->defect <= 1e-10);
    CHECK((flex->left_perm != std::vector<int>{0, 1} || flex->right_perm != std::vector<int>{0, 1}));
  }

  TEST_CASE("flexible matching relabels diagonal corners") {
    auto e = quiver_correspondence(imat2(1, 0, 0, 0));
    auto f = quiver_correspondence(imat2(0, 0, 0, 1));
    CHECK(!find_isomorphism(e, f, false).has_value());
    auto flex = find_isomorphism(e, f, true);
    REQUIRE(flex.has_value());
    CHECK(flex->defect <= 1e-12);
  }

  TEST_CASE("direct sums add multiplicities and stay valid") {
    auto e = quiver_correspondence(imat2(1, 0, 0, 0));
    auto f = quiver_correspondence(imat2(0, 1, 0, 1));
    auto s = direct_sum(e, f);
    CHECK(s.dim == 3);
    CHECK(s.validate().worst() <= 1e-13);
    CHECK(multiplicity_matrix(s) == imat2(1, 1, 0, 1));
  }

  TEST_CASE("a degenerate gram is flagged") {
    MultiMatrixAlgebra a{{1}};
    Correspondence e;
    e.left_alg = a;
    e.right_alg = a;
    e.dim = 2;
    e.left_action = {Mat::Identity(2, 2)};
    e.right_action = {Mat::Identity(2, 2)};
    auto one = AlgebraElement::identity(a);
    e.gram = {{one, one}, {one, one}};
    auto report = e.validate();
    CHECK(!report.definite);
    CHECK(report.kernel_dim == 1);
    CHECK_THROWS_AS(e.check(), Error);
  }

  TEST_CASE("localization of an arrow module") {
    auto e = quiver_correspondence(imat2(0, 1, 0, 0));
    auto sigma = Representation::canonical(e.right_alg, {2, 3});
    auto loc = localize(e, sigma);
    CHECK(loc.dim == 3);  // one arrow into the three dimensional fiber
    CHECK(loc.left.multiplicities == std::vector<int>{3, 0});

    // inserting a vector implements the module inner product exactly
    Rng rng(47);
    Vec xi = rng.gauss_vec(1), eta = rng.gauss_vec(1);
    Mat lhs = loc.insert(xi).adjoint() * loc.insert(eta);
    Mat rhs = sigma.apply(e.inner(xi, eta));
    CHECK(op_norm(lhs - rhs) <= 1e-12);
  }

  TEST_CASE("localizing the identity module reproduces the base space") {
    MultiMatrixAlgebra a{{2, 1}};
    auto e = identity_correspondence(a);
    auto sigma = Representation::canonical(a, {1, 2});
    auto loc = localize(e, sigma);
    CHECK(loc.dim == sigma.space_dim);
    CHECK(loc.left.multiplicities == sigma.multiplicities);

    Rng rng(53);
    Vec xi = rng.gauss_vec(e.dim), eta = rng.gauss_vec(e.dim);
    Mat lhs = loc.insert(xi).adjoint() * loc.insert(eta);
    Mat rhs = sigma.apply(e.inner(xi, eta));
    CHECK(op_norm(lhs - rhs) <= 1e-10);

    // left action by a descends against the inserted vectors covariantly
    auto x = AlgebraElement::from_coords(a, rng.gauss_vec(a.dim()));
    Mat left = loc.left.apply(x);
    Mat moved = loc.insert(e.left_apply(x) * xi);
    CHECK(op_norm(left * loc.insert(xi) - moved) <= 1e-9);
  }

  TEST_CASE("localized maps respect the null directions") {
    auto e = quiver_correspondence(imat2(1, 1, 0, 1));
    auto sigma = Representation::canonical(e.right_alg, {2, 1});
    auto loc = localize(e, sigma);
    // the identity coordinate map with a right-commuting operator descends
    Mat s = sigma.apply(AlgebraElement::from_coords(
        e.right_alg, Vec::Constant(e.right_alg.dim(), cplx(0.7, 0.1))));
    CHECK(localized_map_defect(loc, loc, Mat::Identity(e.dim, e.dim), s) <= 1e-12);
  }

  TEST_CASE("zero correspondence edge cases") {
    MultiMatrixAlgebra a{{2}};
    auto z = zero_correspondence(a, a);
    CHECK(z.validate().worst() == 0.0);
    CHECK(multiplicity_matrix(z)(0, 0) == 0);
    auto iso = find_isomorphism(z, zero_correspondence(a, a), false);
    REQUIRE(iso.has_value());
    CHECK(iso->defect == 0.0);
    auto loc = localize(z, Representation::canonical(a, {2}));
    CHECK(loc.dim == 0);
  }
}
