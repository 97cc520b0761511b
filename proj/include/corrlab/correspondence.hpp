#pragma once

#include <optional>

#include "corrlab/algebra.hpp"

namespace corrlab {

// Finite dimensional bimodule over a pair of multi-matrix algebras, carrying
// a right-algebra valued inner product, conjugate linear in the first slot.
// Coordinates live in C^dim; actions are stored per generator. The right
// action composes contravariantly: acting by b1 b2 means acting by b2 after
// b1 in operator order R(b2) R(b1).
struct CorrespondenceReport {
  double left_hom = 0;      // left action algebra laws
  double right_hom = 0;     // right action algebra laws
  double commute = 0;       // left and right actions commute
  double star = 0;          // gram adjoint symmetry
  double right_linear = 0;  // <x, y.b> = <x, y> b
  double left_adjoint = 0;  // <a.x, y> = <x, a*.y>
  double psd_violation = 0; // negative part of the gram spectrum
  bool definite = true;
  int kernel_dim = 0;
  double worst() const;
};

struct Correspondence {
  MultiMatrixAlgebra left_alg, right_alg;
  int dim = 0;
  std::vector<Mat> left_action;   // one per left generator
  std::vector<Mat> right_action;  // one per right generator
  std::vector<std::vector<AlgebraElement>> gram;

  Mat left_apply(const AlgebraElement& a) const;
  Mat right_apply(const AlgebraElement& b) const;
  AlgebraElement inner(const Vec& x, const Vec& y) const;

  CorrespondenceReport validate(const Tolerance& tol = {}) const;
  void check(const Tolerance& tol = {}) const;  // throws on a bad report
};

Correspondence zero_correspondence(const MultiMatrixAlgebra& left,
                                   const MultiMatrixAlgebra& right);

// The algebra over itself: a.x.b = axb, <x,y> = x*y.
Correspondence identity_correspondence(const MultiMatrixAlgebra& a);

// Same module with the left action twisted through a unital *-endomorphism.
Correspondence endomorphism_correspondence(const AlgebraMap& alpha);

// Bimodule generated by elementary tensors a (x) b over a completely
// positive map, <a (x) b, c (x) d> = b* theta(a*c) d, degenerate vectors
// quotiented away. Throws NotCompletelyPositive when theta is not CP.
Correspondence gns_correspondence(const AlgebraMap& theta, const Tolerance& tol = {});

// Arrow module over the abelian algebra C^n: basis elements are arrows,
// counts[i][j] of them supported on source i and target j.
Correspondence quiver_correspondence(const IMat& counts);

Correspondence direct_sum(const Correspondence& a, const Correspondence& b);

// Interior tensor product over the shared middle algebra, with the maps
// between algebraic and quotient coordinates.
struct TensorProduct {
  Correspondence product;
  Mat quotient_map;  // dim x (dimE * dimF)
  Mat lift;          // (dimE * dimF) x dim, isometry onto the complement of the kernel
  Vec simple(const Vec& x, const Vec& y) const;  // class of x (x) y
};
TensorProduct tensor(const Correspondence& e, const Correspondence& f,
                     const Tolerance& tol = {});

// Block ranks: entry (i, j) counts copies of the elementary corner bimodule.
IMat multiplicity_matrix(const Correspondence& e, const Tolerance& tol = {});

// Coordinate isomorphism between two correspondences over the same algebras.
// Strict mode matches blocks as labelled; flexible mode also relabels equal
// size blocks on either side, reporting the permutations used.
struct CorrespondenceIso {
  Mat map;
  std::vector<int> left_perm, right_perm;
  double defect = 0;
};
std::optional<CorrespondenceIso> find_isomorphism(const Correspondence& e,
                                                  const Correspondence& f, bool flexible,
                                                  const Tolerance& tol = {});

// Gram matrix of the algebraic generators of E (x) H for a representation of
// the right algebra on H, indexed basis-major.
Mat localized_gram(const Correspondence& e, const Representation& rep);

// E (x) H with the degenerate directions removed; qmap carries algebraic
// coordinates to the localized space, pinv is its right inverse.
struct Localization {
  int corr_dim = 0, base_dim = 0, dim = 0;
  Mat qmap;    // dim x (corr_dim * base_dim)
  Mat pinv;    // (corr_dim * base_dim) x dim
  Mat kernel;  // null directions of the localized gram
  Representation left;  // induced representation of the left algebra

  Mat insert(const Vec& xi) const;              // h -> xi (x) h
  Mat op(const Mat& x_map, const Mat& s) const; // x_map (x) s within this space
};
Localization localize(const Correspondence& e, const Representation& sigma,
                      const Tolerance& tol = {});

// x_map (x) s as a map between two localized spaces, and the amount by which
// it fails to respect the null directions.
Mat localized_map(const Localization& to, const Localization& from, const Mat& x_map,
                  const Mat& s);
double localized_map_defect(const Localization& to, const Localization& from,
                            const Mat& x_map, const Mat& s);

}  // namespace corrlab
