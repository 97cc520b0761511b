#pragma once

#include <map>
#include <memory>
#include <string>

#include "corrlab/dual.hpp"

namespace corrlab {

// Direct sum of tensor powers of a correspondence over its own base algebra,
// cut at a fixed depth. Summand 0 is the algebra itself, summand n+1 is built
// from summand n by tensoring once more on the left; the quotient data of
// every step is kept so module coordinates transport across levels.
struct FockSpace {
  Correspondence base;
  int depth = 0;
  std::vector<Correspondence> summands;  // depth + 1 entries
  std::vector<TensorProduct> steps;      // steps[n]: base (x) summands[n] -> summands[n+1]
  std::vector<int> offsets;              // module coordinate offset per summand
  int total_dim = 0;
  Mat base_embed;  // base coordinates onto summand 1, invertible for a definite base
  // appends[n]: summand n (x) base -> summand n + 1, adjoining the new letter
  // at the inner end; creations adjoin at the outer end, so the two commute
  std::vector<Mat> appends;

  int level_dim(int j) const { return summands[j].dim; }
};
using FockPtr = std::shared_ptr<const FockSpace>;

FockPtr fock(const Correspondence& e, int depth, const Tolerance& tol = {});

// Word in the creation generators followed by one algebra generator: the
// operator T(e_{w[0]}) T(e_{w[1]}) ... T(e_{w[d-1]}) phi(gen). The word reads
// left to right in operator order, so w[0] ends up as the outermost tensor
// factor.
struct Monomial {
  std::vector<int> word;
  int gen = 0;
  bool operator<(const Monomial& o) const {
    return word != o.word ? word < o.word : gen < o.gen;
  }
};

// Polynomial element of the truncated tensor algebra, kept both as a formal
// combination of monomials and as the matrix it realizes on the Fock module
// coordinates. The matrix is block lower triangular in the level grading:
// creations raise the level by one, algebra coefficients preserve it.
struct HardyElement {
  FockPtr fock;
  std::map<Monomial, cplx> coefficients;
  Mat realized;

  int degree() const;
  HardyElement operator+(const HardyElement& o) const;
  HardyElement operator-(const HardyElement& o) const;
  HardyElement operator*(const HardyElement& o) const;  // DegreeExceedsDepth on overflow
  HardyElement operator*(cplx s) const;
};

HardyElement hardy_zero(const FockPtr& f);
HardyElement creation(const FockPtr& f, const Vec& xi);
HardyElement ambient(const FockPtr& f, const AlgebraElement& a);

// Module matrix assembled from the monomials alone, bypassing the cached
// realized matrix.
Mat realize_monomials(const FockPtr& f, const std::map<Monomial, cplx>& coeffs);

// The Fock module localized level by level through a representation of the
// base algebra, together with the transported operators.
struct InducedSpace {
  FockPtr fock;
  Representation sigma;
  std::vector<Localization> levels;
  std::vector<int> offsets;
  int total_dim = 0;

  Mat embed(int j) const;    // level space into the direct sum
  Mat vacuum() const;        // level 0 onto the representation space, unitary
  Mat transport(const Mat& module_mat) const;  // module matrix to the induced operator
  Mat realize(const HardyElement& x) const { return transport(x.realized); }
  Mat creation_block(int j, const Vec& xi) const;  // level j -> j + 1
  Mat creation_op(const Vec& xi) const;
  Mat ambient_op(const AlgebraElement& a) const;
  // Level j -> j + 1 by inserting an intertwiner t : H -> level 1 at the slot
  // next to H; commutes with creations, which insert at the outer slot.
  Mat rins_block(int j, const Mat& t) const;
};

InducedSpace induce(const FockPtr& f, const Representation& sigma,
                    const Tolerance& tol = {});

// Applies the representation of the truncated tensor algebra determined by a
// strictly contractive element of the dual module: a creation becomes
// h -> eta^*(xi (x) h) on the representation space, algebra coefficients go
// through sigma. Throws NormTooLarge at or above norm one and
// FailedCondition when eta fails to intertwine.
Mat evaluate(const HardyElement& x, const Mat& eta, const Localization& loc,
             const Representation& sigma, const Tolerance& tol = {});

// Level pairing between the induced space of the base and the induced space
// of its dual at the same representation: a block diagonal unitary built level
// by level from the dual intertwiner basis. Conjugating dual side operators by
// the pairing carries them into the commutant of the base side.
struct CommutantFrame {
  DualCorrespondence df;
  FockPtr fe;                 // truncated levels of the base
  FockPtr fd;                 // truncated levels of the dual
  InducedSpace prim;          // base levels through the representation
  InducedSpace dset;          // dual levels through the commutant action
  Mat ub;                     // dual level coordinates into the base side
  double unitary_defect = 0;  // worst per level unitarity defect of the pairing
  double recursion_defect = 0;  // pairing consistency with dual creations
};

CommutantFrame commutant_frame(const Correspondence& e, const Representation& sigma,
                               int depth, const Tolerance& tol = {});

// Conjugates the induced algebra of the dual module by the level pairing
// unitary and measures commutation against the induced algebra of the base,
// along with the mutual commutant identifications at matching dimensions.
struct CommutantReport {
  int depth = 0;
  std::vector<int> level_dims;       // induced level dimensions, base side
  std::vector<int> dual_level_dims;  // dual side, must match entrywise
  double unitary_defect = 0;         // worst level pairing unitarity defect
  double recursion_defect = 0;       // pairing consistency with dual creations
  std::vector<std::string> pair_labels;
  std::vector<std::vector<double>> pair_level_defects;  // per pair, per input level
  double commutation_defect = 0;  // worst interior entry of the table
  int primal_span_dim = 0;        // word span of the base side
  int dual_span_dim = 0;          // conjugated word span of the dual side
  int primal_commutant_dim = 0;   // solutions commuting with the base side
  int dual_commutant_dim = 0;     // solutions commuting with the conjugated dual side
  double commutant_span_distance = 0;    // base commutant vs dual word span
  double bicommutant_span_distance = 0;  // dual commutant vs base word span
  bool pass(double tol_defect = 1e-9, double tol_span = 1e-6) const;
};

CommutantReport verify_commutant(const Correspondence& e, const Representation& sigma,
                                 int depth, const Tolerance& tol = {});

}  // namespace corrlab
