#pragma once

#include <optional>
#include <string>

#include "corrlab/correspondence.hpp"
#include "corrlab/dual.hpp"

namespace corrlab {

// Bimodule implementing a strong Morita equivalence of two multi matrix
// algebras: a bijection of blocks realized by rectangular matrix modules,
// carrying inner products valued in both algebras. The module coordinates
// live in x, whose stored gram is the right algebra valued inner product;
// the left algebra valued one is conjugate linear in its second slot and
// satisfies the associativity law <a,b>_left c = a <b,c>_right.
struct BimoduleReport {
  double compatibility = 0;  // <a,b>_left c vs a <b,c>_right on basis triples
  double left_star = 0;      // <a,b>_left* vs <b,a>_left
  double left_module = 0;    // <m a, b>_left vs m <a,b>_left
  bool left_full = false;    // left gram coordinates span the left algebra
  bool right_full = false;   // right gram coordinates span the right algebra
  double worst() const { return std::max({compatibility, left_star, left_module}); }
  bool pass(double tol) const { return left_full && right_full && worst() <= tol; }
};

struct EquivalenceBimodule {
  MultiMatrixAlgebra left, right;
  std::vector<int> block_bijection;  // left block i pairs with right block_bijection[i]
  Correspondence x;                  // module carrying the right valued inner product
  std::vector<std::vector<AlgebraElement>> left_gram;  // left valued inner product

  AlgebraElement left_inner(const Vec& a, const Vec& b) const;
  BimoduleReport validate(const Tolerance& tol = {}) const;
};

// The rectangular block module for a pairing of blocks: block i of the left
// algebra meets block bijection[i] of the right algebra in the space of
// matrices between them, with <a,b>_right = a* b and <a,b>_left = a b*.
// Throws BlockCountMismatch unless bijection is a permutation matching the
// block counts; the construction is exact, and its invariants are verified.
EquivalenceBimodule standard_equivalence(const MultiMatrixAlgebra& m,
                                         const MultiMatrixAlgebra& n,
                                         const std::vector<int>& bijection);

// Witness that two correspondences, each over its own algebra, are Morita
// equivalent: a bimodule x and a label preserving isomorphism between
// e (x) x and x (x) f.
struct MoritaWitness {
  EquivalenceBimodule x;
  CorrespondenceIso iso;
  std::vector<int> bijection;
};

// Searches block bijections whose relabeling conjugates the two multiplicity
// matrices; on a match the standard bimodule is built and the tensor
// isomorphism is constructed and revalidated, accepted below a pinned gate.
// Returns absence when no bijection works.
std::optional<MoritaWitness> are_morita_equivalent(const Correspondence& e,
                                                   const Correspondence& f,
                                                   const Tolerance& tol = {});

// Three formulations of sameness for a pair of correspondences, each
// evaluated constructively, with the connecting identifications measured:
// a common source with two faithful representations presenting both inputs
// through duals, an equivalence bimodule intertwining the tensor products,
// and an isomorphism of duals taken at matched faithful representations.
struct DiffdualsReport {
  bool cond_shared_source = false;  // one module, two representations, both duals
  bool cond_bimodule = false;       // equivalence bimodule with e(x)x ~= x(x)f
  bool cond_dual_iso = false;       // duals isomorphic at matched representations
  std::vector<int> bijection;       // block pairing located by the search
  double dual_iso_defect = -1;      // witness isomorphism between the two duals
  double double_dual_defect = -1;   // first input against its double dual
  double twisted_dual_defect = -1;  // second input against the dual at the carried
                                    // over representation of the shared source
  double bimodule_defect = -1;      // tensor isomorphism through the bimodule and
                                    // its identification with a dual of the identity
  double induced_defect = -1;       // duals compared at the bimodule induced
                                    // multiplicities
  std::string obstruction;          // set when the conditions fail

  bool consistent() const {
    return cond_shared_source == cond_bimodule && cond_bimodule == cond_dual_iso;
  }
  double worst() const;  // largest defect that was measured
  bool pass(double tol) const {
    return consistent() && (!cond_bimodule || worst() <= tol);
  }
};

DiffdualsReport verify_diffduals(const Correspondence& e, const Correspondence& f,
                                 const Tolerance& tol = {});

}  // namespace corrlab
