#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace corrlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using IMat = Eigen::MatrixXi;

// Shared cutoffs. eps_rank gates singular values, eps_eq gates equality
// defects, eps_psd gates eigenvalue clamping in psd_sqrt.
struct Tolerance {
  double eps_rank = 1e-9;
  double eps_eq = 1e-9;
  double eps_psd = 1e-10;
};

enum class Err {
  NotHermitian,
  NotPSD,
  ShapeMismatch,
  NotHomomorphism,
  NotInjective,
  NotCompletelyPositive,
  NotContractive,
  AlgebraMismatch,
  BlockCountMismatch,
  NonIntegralMultiplicity,
  NotFaithful,
  NotInvariant,
  NormTooLarge,
  DegreeExceedsDepth,
  NotWandering,
  MultiplicityMismatch,
  Inconclusive,
  NotCNC,
  IllDefinedS,
  ExpressionResidual,
  FailedCondition,
  BadConfig,
  UnknownSuite,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

const char* err_name(Err code);

double op_norm(const Mat& a);  // largest singular value
bool is_hermitian(const Mat& a, double tol);

// Hermitian square root with eigenvalues below eps_psd*||a|| clamped to zero.
// Throws NotHermitian / NotPSD.
Mat psd_sqrt(const Mat& a, const Tolerance& tol = {});

// Orthonormal basis (columns) of ker a; singular values below
// eps_rank * max(1, s_max) count as zero, so a matrix that is zero up to
// roundoff keeps its full kernel.
Mat null_space(const Mat& a, const Tolerance& tol = {});

int numerical_rank(const Mat& a, const Tolerance& tol = {});

// Orthonormal basis (columns) of the column span of a.
Mat range_basis(const Mat& a, const Tolerance& tol = {});

// All X with a_i X = X b_i for every pair (a_i, b_i), as an orthonormal
// family in the Frobenius inner product.
std::vector<Mat> solve_intertwiners(const std::vector<std::pair<Mat, Mat>>& pairs,
                                    const Tolerance& tol = {});

// Positive square root of a Hermitian matrix together with an orthonormal
// basis of the retained range and the square roots of the retained
// eigenvalues. The eigenvalue cut is absolute, for matrices whose natural
// scale is one; a relative cut would resurrect pure roundoff directions
// whenever the matrix vanishes exactly.
struct PsdRoot {
  Mat root;
  Mat basis;
  Eigen::VectorXd scale;
};
PsdRoot psd_root_basis(const Mat& gram, const Tolerance& tol = {});

Mat kron(const Mat& a, const Mat& b);
Vec vec(const Mat& a);  // column-major stacking
Mat unvec(const Vec& v, int rows);

// Operator norm distance between the orthogonal projections onto the column
// spans, i.e. the largest principal-angle sine.
double span_distance(const Mat& a, const Mat& b, const Tolerance& tol = {});

// Largest component of b outside the column span of a, for unit vectors of b.
double span_residual(const Mat& span_cols, const Mat& b, const Tolerance& tol = {});

// Single stream of randomness; every draw in a run flows through one engine.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}

  double real(double lo, double hi);
  int integer(int lo, int hi);  // inclusive bounds
  cplx gauss();
  Vec gauss_vec(int n);
  Mat ginibre(int rows, int cols);
  Mat unitary(int n);
  Mat hermitian(int n);
  // Nonzero random matrix rescaled to have operator norm exactly `norm`.
  Mat with_norm(int rows, int cols, double norm);
};

// Generic invertible element of an intertwiner solution space, unitarized by
// its polar factor; intertwining survives the polar step when the solution
// space is closed under the adjoint symmetry of the underlying family.
// Throws FailedCondition when no combination is invertible.
Mat unitary_intertwiner(const std::vector<Mat>& sols, Rng& rng);

}  // namespace corrlab
