#pragma once

#include "corrlab/correspondence.hpp"

namespace corrlab {

// Intertwiner dual of a correspondence E over (M, N) with respect to a pair
// of representations, sigma of M on H and tau of N on K. Elements are the
// operators T: H -> E (x) K satisfying T sigma(a) = (a . ) T; they form a
// correspondence over the commutants, the commutant of tau acting on the
// left and the commutant of sigma carrying the inner product T* S.
struct DualCorrespondence {
  Correspondence corr;  // over (commutant of tau, commutant of sigma)
  Representation sigma, tau;
  Localization loc;        // E (x) K
  CommutantInfo left_comm, right_comm;
  std::vector<Mat> basis;  // orthonormal intertwiners, loc.dim x dim H
  double residual = 0;     // worst structural residual met while building

  Mat realize(const Vec& coords) const;
};

DualCorrespondence dual(const Correspondence& e, const Representation& sigma,
                        const Representation& tau, const Tolerance& tol = {});

// The canonical pairing of E with its double dual. psi sends xi to the
// adjoint of eta (x) h -> (insert xi)* eta h; the theorem says psi is a
// bijective bimodule map matching inner products through tau.
struct DualityReport {
  int module_dim = 0;       // dim E
  int dual_dim = 0;         // dim of the dual
  int expected_dual_dim = 0;  // sum of corner counts times both multiplicities
  int double_dual_dim = 0;
  int psi_rank = 0;
  double intertwiner_defect = 0;  // psi images solve the double dual equations
  double covariance_defect = 0;   // psi(a xi b) = (1 (x) sigma(a)) psi(xi) tau(b)
  double inner_defect = 0;        // psi(xi)* psi(eta) = tau(<xi, eta>)
  double worst() const {
    return std::max({intertwiner_defect, covariance_defect, inner_defect});
  }
  bool pass(double tol) const {
    return dual_dim == expected_dual_dim && double_dual_dim == module_dim &&
           psi_rank == module_dim && worst() <= tol;
  }
};
DualityReport verify_duality(const Correspondence& e, const Representation& sigma,
                             const Representation& tau, const Tolerance& tol = {});

// Ranges of the dual elements fill the induced space.
struct SpanReport {
  int induced_dim = 0;
  int span_rank = 0;
  bool pass() const { return induced_dim == span_rank; }
};
SpanReport verify_span(const Correspondence& e, const Representation& sigma,
                       const Representation& tau, const Tolerance& tol = {});

// Dualizing a direct sum gives the direct sum of the duals.
struct DualSumReport {
  int sum_dual_dim = 0, part_dual_dims = 0;
  bool matched = false;
  double iso_defect = 0;
  bool pass(double tol) const {
    return matched && sum_dual_dim == part_dual_dims && iso_defect <= tol;
  }
};
DualSumReport verify_dual_sum(const Correspondence& e1, const Correspondence& e2,
                              const Representation& sigma, const Representation& tau,
                              const Tolerance& tol = {});

// Composing duals against a middle representation: X (x) Y -> (1 (x) X) Y
// identifies dual(F) (x) dual(E) with dual(E (x) F).
struct DualTensorReport {
  int lhs_dim = 0, rhs_dim = 0;
  int rank = 0;
  double assoc_defect = 0;       // structural unitary between the two bracketings
  double membership_defect = 0;  // images land in the dual of the tensor
  double bimodule_defect = 0;
  double inner_defect = 0;
  double worst() const {
    return std::max({assoc_defect, membership_defect, bimodule_defect, inner_defect});
  }
  bool pass(double tol) const {
    return lhs_dim == rhs_dim && rank == rhs_dim && worst() <= tol;
  }
};
DualTensorReport verify_dual_tensor(const Correspondence& e, const Correspondence& f,
                                    const Representation& sigma, const Representation& tau,
                                    const Representation& pi, const Tolerance& tol = {});

}  // namespace corrlab
