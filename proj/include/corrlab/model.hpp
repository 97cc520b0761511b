#pragma once

#include "corrlab/dilation.hpp"

namespace corrlab {

// Contraction between truncated induced product spaces over two coefficient
// representations. It commutes with the coefficient action everywhere and
// with creations on interior levels, so it is determined by its per degree
// symbol; the matrix and the symbol are both kept, with the degrees certified
// exact by the truncation recorded.
struct CharacteristicFunction {
  Correspondence e;
  int depth = 0;
  Representation tau1;      // coefficient action on the source fiber
  Representation tau2;      // coefficient action on the target fiber
  InducedSpace ind1;        // truncated product levels over tau1
  InducedSpace ind2;        // truncated product levels over tau2
  Mat theta;                // ind2 total by ind1 total
  std::vector<Mat> symbol;  // symbol[n]: source fiber into level n of ind2
  int exact_degree = 0;     // symbol certified through this degree

  // Matrix rebuilt from the symbol alone by sliding each degree across the
  // levels; blocks beyond the stored symbol stay zero.
  Mat rebuild() const;
};

struct CharFnReport {
  double norm = 0;
  double covariance_defect = 0;   // coefficient action commutation
  double analyticity_defect = 0;  // creation commutation
  double contractive_margin = 0;  // one minus the top singular value of symbol[0]
  double closure_gap = 0;         // defect span with and without the zero level
  double symbol_defect = 0;       // matrix vs rebuild on certified blocks
  double inner_defect = 0;        // isometry defect on certified columns
  bool inner = false;
  bool pass(const Tolerance& tol = {}) const;
};

CharFnReport check_charfn(const CharacteristicFunction& th, const Tolerance& tol = {});

// Builds the characteristic function of a completely non coisometric pair
// from its dilation: the word map out of the defect range, projected onto the
// span generated by the dilated kernel and pulled back through the kernel
// identification. Throws NotCNC when the classification rejects the pair.
CharacteristicFunction characteristic_of(const CovariantPair& p, int k,
                                         const Tolerance& tol = {});

// Model data built from a characteristic function: the target levels summed
// with the defect range, the isometric pair on that sum, and the compression
// to the orthogonal complement of the graph subspace.
struct ModelSpaces {
  CharacteristicFunction source;
  PsdRoot defect;      // of I - Theta* Theta on the source levels
  int total_dim = 0;   // target levels plus defect rank
  Mat graph;           // columns spanning the pairs (Theta x, defect x)
  Mat hbasis;          // orthonormal basis of the model subspace
  Representation rho;  // coefficient action on the sum
  CovariantPair pair;  // compression to the model subspace
  double s_respect = 0;  // kernel respect of the defect shift

  Mat v_op(const Vec& xi) const;  // creation on the target levels joined with
                                  // the defect shift
  Mat rho_op(const AlgebraElement& a) const;
};

ModelSpaces model_of(const CharacteristicFunction& th, const Tolerance& tol = {});

// Equivalence search between a pair and the model of its characteristic
// function. The truncated model can carry extra directions, so the witness
// is an isometry of the source into the model, unitary when the dimensions
// agree.
struct ModelRoundTrip {
  int dim_source = 0;
  int dim_model = 0;
  Mat g;  // isometry of the source space into the model space
  double unitary_defect = 0;
  double sigma_defect = 0;
  double t_defect = 0;
  bool found = false;
  double worst() const { return std::max({unitary_defect, sigma_defect, t_defect}); }
  bool pass(double tol = 1e-7) const { return found && worst() <= tol; }
};

ModelRoundTrip roundtrip_model(const CovariantPair& p, int k, const Tolerance& tol = {});

// Coincidence search between a characteristic function and the one rebuilt
// from its model pair: fiber unitaries intertwining the coefficient actions
// that carry one symbol onto the other, degree by degree.
struct CharRoundTrip {
  Mat w1;  // isometry of the source fiber into the rebuilt source fiber
  Mat w2;  // isometry of the target fiber into the rebuilt target fiber
  int degrees = 0;  // symbol degrees compared
  double w1_unitary = 0;
  double w2_unitary = 0;
  double intertwine_defect = 0;
  double coincidence_defect = 0;
  bool found = false;
  double worst() const {
    return std::max({w1_unitary, w2_unitary, intertwine_defect, coincidence_defect});
  }
  bool pass(double tol = 1e-7) const { return found && worst() <= tol; }
};

CharRoundTrip roundtrip_char(const CharacteristicFunction& th, const Tolerance& tol = {});

// Conjugates the two by two block carrying the characteristic function into
// the dual picture of the summed coefficient action and expresses it in the
// truncated generators over the dual module. When the summed action fails to
// be faithful it is padded by one canonical copy of each missing block.
struct CommutantEmbedding {
  HardyElement hat;
  bool augmented = false;
  double residual = 0;  // least squares defect of the conjugate expression
  double inner_projection_defect = -1;  // adjoint square vs the source fiber
                                        // projection, set for an inner source
};

CommutantEmbedding commutant_embedding(const CharacteristicFunction& th,
                                       const Tolerance& tol = {});

}  // namespace corrlab
