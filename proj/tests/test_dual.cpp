#include "doctest.h"

#include "corrlab/dual.hpp"

using namespace corrlab;

namespace {

IMat imat2(int a, int b, int c, int d) {
  IMat m(2, 2);
  m << a, b, c, d;
  return m;
}

AlgebraMap trace_state_map(const MultiMatrixAlgebra& a) {
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

}  // namespace

TEST_SUITE("dual") {
  TEST_CASE("arrow module dualizes to the transposed counts") {
    IMat c = imat2(1, 2, 0, 1);
    auto e = quiver_correspondence(c);
    auto sigma = canonical_faithful(e.left_alg);
    auto tau = canonical_faithful(e.right_alg);
    auto d = dual(e, sigma, tau);
    CHECK(d.corr.dim == 4);
    CHECK(d.residual <= 1e-10);
    CHECK(d.corr.validate().worst() <= 1e-10);
    CHECK(multiplicity_matrix(d.corr) == IMat(c.transpose()));
  }

  TEST_CASE("dual dimension counts corners against both multiplicities") {
    IMat c = imat2(1, 2, 0, 1);
    auto e = quiver_correspondence(c);
    auto sigma = Representation::canonical(e.left_alg, {2, 1});
    auto tau = Representation::canonical(e.right_alg, {1, 3});
    auto d = dual(e, sigma, tau);
    // 1*2*1 + 2*2*3 + 1*1*3
    CHECK(d.corr.dim == 17);
    CHECK(d.corr.validate().worst() <= 1e-9);
    CHECK(multiplicity_matrix(d.corr) == IMat(c.transpose()));
  }

  TEST_CASE("dual of the identity module is the space of self intertwiners") {
    MultiMatrixAlgebra a{{2, 1}};
    auto e = identity_correspondence(a);
    auto sigma = canonical_faithful(a);
    auto d = dual(e, sigma, sigma);
    CHECK(d.corr.dim == 2);  // one scalar per block
    IMat id2 = IMat::Identity(2, 2);
    CHECK(multiplicity_matrix(d.corr) == id2);
  }

  TEST_CASE("duality round trip on an arrow module") {
    auto e = quiver_correspondence(imat2(1, 1, 0, 1));
    auto sigma = canonical_faithful(e.left_alg);
    auto rep = verify_duality(e, sigma, sigma);
    CHECK(rep.dual_dim == rep.expected_dual_dim);
    CHECK(rep.double_dual_dim == rep.module_dim);
    CHECK(rep.psi_rank == rep.module_dim);
    CHECK(rep.worst() <= 1e-9);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("duality round trip with amplified representations") {
    auto e = quiver_correspondence(imat2(0, 1, 1, 1));
    auto sigma = Representation::canonical(e.left_alg, {2, 1});
    auto tau = Representation::canonical(e.right_alg, {1, 2});
    auto rep = verify_duality(e, sigma, tau);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("duality round trip on the identity module") {
    MultiMatrixAlgebra a{{2, 1}};
    auto e = identity_correspondence(a);
    auto sigma = canonical_faithful(a);
    auto tau = Representation::canonical(a, {2, 1});
    auto rep = verify_duality(e, sigma, tau);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("duality round trip on a state module") {
    MultiMatrixAlgebra a{{2}};
    auto e = gns_correspondence(trace_state_map(a));
    auto sigma = canonical_faithful(a);
    auto rep = verify_duality(e, sigma, sigma);
    CHECK(rep.module_dim == 16);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("duality round trip on a twisted module") {
    MultiMatrixAlgebra a{{1, 1}};
    auto alpha = permutation_automorphism(a, {1, 0});
    auto e = endomorphism_correspondence(alpha);
    auto sigma = Representation::canonical(a, {2, 1});
    auto rep = verify_duality(e, sigma, sigma);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("dual elements span the induced space") {
    auto e = quiver_correspondence(imat2(1, 1, 0, 1));
    auto sigma = canonical_faithful(e.left_alg);
    auto rep = verify_span(e, sigma, sigma);
    CHECK(rep.induced_dim == 3);
    CHECK(rep.pass());

    auto tau = Representation::canonical(e.right_alg, {1, 2});
    auto rep2 = verify_span(e, sigma, tau);
    CHECK(rep2.pass());
  }

  TEST_CASE("dual of a sum splits") {
    auto e1 = quiver_correspondence(imat2(1, 0, 0, 1));
    auto e2 = quiver_correspondence(imat2(0, 1, 1, 0));
    auto sigma = Representation::canonical(e1.left_alg, {2, 1});
    auto rep = verify_dual_sum(e1, e2, sigma, sigma);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("dual of a tensor is the reversed tensor of duals") {
    auto e = quiver_correspondence(imat2(1, 1, 0, 1));
    auto f = quiver_correspondence(imat2(0, 1, 1, 0));
    auto sigma = canonical_faithful(e.left_alg);
    auto rep = verify_dual_tensor(e, f, sigma, sigma, sigma);
    CHECK(rep.lhs_dim == rep.rhs_dim);
    CHECK(rep.worst() <= 1e-9);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("tensor duality with amplified representations") {
    auto e = quiver_correspondence(imat2(1, 1, 0, 1));
    auto f = quiver_correspondence(imat2(1, 0, 1, 1));
    auto sigma = Representation::canonical(e.left_alg, {2, 1});
    auto tau = Representation::canonical(e.left_alg, {1, 2});
    auto pi = Representation::canonical(e.left_alg, {1, 1});
    auto rep = verify_dual_tensor(e, f, sigma, tau, pi);
    CHECK(rep.pass(1e-8));
  }

  TEST_CASE("tensor duality over a matrix block algebra") {
    MultiMatrixAlgebra a{{2}};
    auto e = identity_correspondence(a);
    auto f = gns_correspondence(trace_state_map(a));
    auto sigma = canonical_faithful(a);
    auto rep = verify_dual_tensor(e, f, sigma, sigma, sigma);
    CHECK(rep.pass(1e-7));
  }
}
