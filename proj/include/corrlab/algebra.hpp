#pragma once

#include "corrlab/numerics.hpp"

namespace corrlab {

// Finite dimensional von Neumann algebra in Wedderburn form, a direct sum of
// full matrix blocks. Generators are the matrix units, indexed block-major
// and row-major inside a block.
struct MultiMatrixAlgebra {
  std::vector<int> blocks;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int dim() const;            // sum n_i^2, also the generator count
  int canonical_dim() const;  // sum n_i

  struct GenIndex {
    int block, p, q;
  };
  GenIndex gen_index(int flat) const;
  int flat_index(int block, int p, int q) const;
  int block_offset(int block) const;  // flat index of e^{(block)}_{00}

  bool operator==(const MultiMatrixAlgebra& o) const { return blocks == o.blocks; }
  bool operator!=(const MultiMatrixAlgebra& o) const { return !(*this == o); }

  void validate() const;  // every block size >= 1
};

struct AlgebraElement {
  MultiMatrixAlgebra algebra;
  std::vector<Mat> block;

  static AlgebraElement zero(const MultiMatrixAlgebra& a);
  static AlgebraElement identity(const MultiMatrixAlgebra& a);
  static AlgebraElement generator(const MultiMatrixAlgebra& a, int flat);
  static AlgebraElement central_projection(const MultiMatrixAlgebra& a, int blk);
  static AlgebraElement from_coords(const MultiMatrixAlgebra& a, const Vec& coords);

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator*(const AlgebraElement& o) const;
  AlgebraElement operator*(cplx s) const;
  AlgebraElement adjoint() const;

  Mat block_diag() const;  // image in the canonical multiplicity-one representation
  double norm() const;     // operator norm there
  Vec coords() const;      // coefficients over the matrix units
  bool is_zero(double tol) const;
};

std::vector<AlgebraElement> standard_generators(const MultiMatrixAlgebra& a);

// Linear map between algebras, stored on the matrix units.
struct AlgebraMap {
  MultiMatrixAlgebra domain, codomain;
  std::vector<AlgebraElement> images;

  static AlgebraMap identity(const MultiMatrixAlgebra& a);
  AlgebraElement apply(const AlgebraElement& x) const;
  AlgebraMap compose(const AlgebraMap& inner) const;  // this after inner

  double hom_defect() const;           // *-homomorphism laws on generators
  bool is_injective(const Tolerance& tol = {}) const;
  double choi_min_eigenvalue() const;  // min over per-block Choi matrices
  double unit_norm() const;            // ||map(1)||
};

// Unital normal *-representation. Block i acts with multiplicity m_i >= 0.
struct Representation {
  MultiMatrixAlgebra algebra;
  int space_dim = 0;
  std::vector<int> multiplicities;
  std::vector<Mat> images;

  static Representation canonical(const MultiMatrixAlgebra& a, const std::vector<int>& mults);
  // Validates the *-representation laws and detects multiplicities.
  static Representation from_images(const MultiMatrixAlgebra& a, std::vector<Mat> images,
                                    const Tolerance& tol = {});

  Mat apply(const AlgebraElement& x) const;
  const Mat& apply_gen(int flat) const { return images[flat]; }
  bool faithful() const;
  double hom_defect() const;
  Mat central_projection(int blk) const;
};

Representation direct_sum(const Representation& a, const Representation& b);

// Canonical representation with every multiplicity one.
Representation canonical_faithful(const MultiMatrixAlgebra& a);

// Restriction to an invariant subspace given by an isometry (columns
// orthonormal). Throws NotInvariant if the subspace moves.
Representation restrict_representation(const Representation& rep, const Mat& isometry,
                                       const Tolerance& tol = {});

// Orthonormal frames turning rep into the canonical form. frames[k] has
// shape space_dim x (n_i * m_i) for the k-th surviving block i, columns
// ordered (p, r) with p major; frame columns are sigma(e_{p0}) v_r for an
// orthonormal basis v_r of range sigma(e_00).
struct IsotypicDecomposition {
  std::vector<int> source_block;
  std::vector<Mat> frames;
  Mat unitary;  // all frames side by side, square iff rep is unital
};
IsotypicDecomposition isotypic_decomposition(const Representation& rep,
                                             const Tolerance& tol = {});

struct CommutantInfo {
  MultiMatrixAlgebra algebra;     // blocks are the surviving multiplicities
  Representation rep;             // inclusion of the commutant into B(H)
  std::vector<int> source_block;  // commutant block -> original block
};
CommutantInfo commutant(const Representation& rep, const Tolerance& tol = {});

// Least squares expression of x in the image of rep; returns the element and
// the residual norm.
std::pair<AlgebraElement, double> abstract_coords(const Representation& rep, const Mat& x);

// Reads an element back from its canonical multiplicity-one image. The input
// must be block diagonal; off-block leakage is reported if requested.
AlgebraElement element_from_canonical(const MultiMatrixAlgebra& a, const Mat& m,
                                      double* offblock_defect = nullptr);

// Automorphism permuting equal size blocks according to perm (block i of the
// input lands in block perm[i]).
AlgebraMap permutation_automorphism(const MultiMatrixAlgebra& a, const std::vector<int>& perm);

AlgebraMap random_automorphism(const MultiMatrixAlgebra& a, Rng& rng);
// Random normal CP contraction built from Kraus operators between blocks.
AlgebraMap random_cp_map(const MultiMatrixAlgebra& a, Rng& rng);

}  // namespace corrlab
