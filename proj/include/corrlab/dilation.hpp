#pragma once

#include "corrlab/fock.hpp"

namespace corrlab {

// Completely contractive covariant action of a correspondence on a
// representation space, packaged as the single contraction from the localized
// module that intertwines the two actions.
struct CovariantPair {
  Correspondence e;
  Representation sigma;
  Localization loc;  // E (x) H
  Mat ttilde;        // E (x) H -> H

  Mat op(const Vec& xi) const;  // the action of one module element on H
  double covariance_defect() const;
  void check(const Tolerance& tol = {}) const;
};

CovariantPair covariant_pair(const Correspondence& e, const Representation& sigma,
                             const Mat& ttilde, const Tolerance& tol = {});

// The pair whose action contraction is the scaled adjoint of a dual module
// element; strict contractivity of the scaling is required.
CovariantPair pair_from_eta(const Correspondence& e, const Representation& sigma,
                            const Mat& eta, double scale, const Tolerance& tol = {});

// Iterated action maps from the tensor power levels of an induced space over
// sigma down to the representation space; entry n sends a level n vector to
// the product of the actions of its letters.
std::vector<Mat> tilde_chain(const CovariantPair& p, const InducedSpace& ind);
Mat tilde_n(const CovariantPair& p, int n, const Tolerance& tol = {});

// A subspace of the dilation space on which the algebra acts and from which
// the dilation words reach orthogonally, together with the word map from the
// tensor levels over the restricted action onto the subspace it generates.
struct WanderingSpace {
  Mat basis;           // orthonormal columns inside the dilation space
  Representation rep;  // restriction of the ambient action to the subspace
  InducedSpace ind;    // tensor levels over the restriction
  Mat w;               // word map, levels of ind into the dilation space
  std::vector<double> level_defect;  // isometry defect per level
  double worst_defect = 0;
};

// Minimal isometric dilation of a covariant pair, graded as the
// representation space followed by tensor powers against the defect range.
struct DilationData {
  CovariantPair source;
  int depth = 0;
  Mat delta;            // defect square root on E (x) H
  Mat delta_star;       // defect square root on H
  Mat dbasis;           // orthonormal basis of the defect range
  Mat dstar_basis;      // orthonormal basis of the adjoint defect range
  Representation rho;   // left action restricted to the defect range
  InducedSpace tail;    // defect range tensored up the levels
  Mat vac0;             // unitary from the tail ground level onto the defect range
  std::vector<int> offsets;  // grading of the dilation space
  int total_dim = 0;
  Representation pi;    // ambient action on the dilation space
  Mat q0;               // basis of the joint kernel of the dilated adjoints
  Mat u;                // intertwining unitary from that kernel onto the
                        // adjoint defect range
  WanderingSpace wd, wq0;
  Mat qinf;             // projection onto the range generated from q0

  Mat embed_h() const;
  Mat embed_level(int j) const;  // tail level j into the dilation space
  Mat v(const Vec& xi) const;
  Mat pi_op(const AlgebraElement& a) const;
};

// Throws NotWandering when the subspace fails invariance or the words from it
// fail orthogonality to it.
WanderingSpace wandering_unitary(const DilationData& d, const Mat& msub,
                                 const Tolerance& tol = {});

// Fills q0 and u; throws MultiplicityMismatch when the kernel and the adjoint
// defect range disagree as representations, which signals a truncation cut
// too shallow for the instance.
void compute_q0_and_u(DilationData& d, const Tolerance& tol = {});

// When shuffle is given, the internal defect bases are rotated by random
// unitaries; the result must stay unitarily equivalent over the fixed copy of
// the representation space.
DilationData dilate(const CovariantPair& p, int k, const Tolerance& tol = {},
                    Rng* shuffle = nullptr);

struct DilationReport {
  double isometry_defect = 0;    // dilated inner products on interior levels
  double covariance_defect = 0;  // algebra covariance of the dilated action
  double compression_defect = 0; // corner of the dilation recovers the pair
  double q0_defect = 0;          // kernel equations for q0
  double q0_invariance = 0;      // ambient action keeps q0
  double u_defect = 0;           // unitarity and intertwining of u
  double d_wandering = 0;        // defect range word orthogonality
  int minimality_gap = 0;        // codimension of the reachable span
  double worst() const {
    return std::max({isometry_defect, covariance_defect, compression_defect, q0_defect,
                     q0_invariance, u_defect, d_wandering});
  }
  bool pass(double tol) const { return worst() <= tol && minimality_gap == 0; }
};

DilationReport verify_dilation(const DilationData& d, const Tolerance& tol = {});

// Unitary between two dilation spaces fixing the representation space and
// carrying one dilated action onto the other; built on the reachable spans.
struct EquivalenceReport {
  Mat g;
  double unitary_defect = 0;
  double anchor_defect = 0;  // restriction to the representation space
  double v_defect = 0;
  double pi_defect = 0;
  bool pass(double tol) const {
    return std::max({unitary_defect, anchor_defect, v_defect, pi_defect}) <= tol;
  }
};

EquivalenceReport dilation_equivalence(const DilationData& a, const DilationData& b,
                                       const Tolerance& tol = {});

enum class PairClass { CDotZero, NonCoisometric, Neither, Inconclusive };
const char* pair_class_name(PairClass c);

// Decay of the iterated action norms against the span generated by the two
// wandering subspaces; the decay label wins when both certificates hold.
struct Classification {
  PairClass label = PairClass::Inconclusive;
  std::vector<double> decay;  // norms of the iterated action maps
  double base_norm = 0;       // norm of the single step contraction
  bool decay_certified = false;
  bool span_full = false;
  int span_rank = 0;
  int span_total = 0;
};

Classification classify(const CovariantPair& p, int k, const Tolerance& tol = {});

}  // namespace corrlab
