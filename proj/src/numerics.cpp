#include "corrlab/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace corrlab {

const char* err_name(Err code) {
  switch (code) {
    case Err::NotHermitian: return "NotHermitian";
    case Err::NotPSD: return "NotPSD";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::NotHomomorphism: return "NotHomomorphism";
    case Err::NotInjective: return "NotInjective";
    case Err::NotCompletelyPositive: return "NotCompletelyPositive";
    case Err::NotContractive: return "NotContractive";
    case Err::AlgebraMismatch: return "AlgebraMismatch";
    case Err::BlockCountMismatch: return "BlockCountMismatch";
    case Err::NonIntegralMultiplicity: return "NonIntegralMultiplicity";
    case Err::NotFaithful: return "NotFaithful";
    case Err::NotInvariant: return "NotInvariant";
    case Err::NormTooLarge: return "NormTooLarge";
    case Err::DegreeExceedsDepth: return "DegreeExceedsDepth";
    case Err::NotWandering: return "NotWandering";
    case Err::MultiplicityMismatch: return "MultiplicityMismatch";
    case Err::Inconclusive: return "Inconclusive";
    case Err::NotCNC: return "NotCNC";
    case Err::IllDefinedS: return "IllDefinedS";
    case Err::ExpressionResidual: return "ExpressionResidual";
    case Err::FailedCondition: return "FailedCondition";
    case Err::BadConfig: return "BadConfig";
    case Err::UnknownSuite: return "UnknownSuite";
    case Err::ParseError: return "ParseError";
  }
  return "Unknown";
}

double op_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(a).singularValues()(0);
}

namespace {

// The divide and conquer decomposition occasionally emits non finite factors
// on structured inputs; fall back to the unconditionally stable one sided
// rotation method whenever that happens.
struct SvdParts {
  Eigen::VectorXd sv;
  Mat u, v;
};

SvdParts robust_svd(const Mat& a, unsigned options) {
  SvdParts r;
  {
    Eigen::BDCSVD<Mat> svd(a, options);
    r.sv = svd.singularValues();
    if (options & Eigen::ComputeFullV) r.v = svd.matrixV();
    if (options & Eigen::ComputeThinU) r.u = svd.matrixU();
  }
  if (!(r.sv.allFinite() && r.u.allFinite() && r.v.allFinite())) {
    Eigen::JacobiSVD<Mat> svd(a, options);
    r.sv = svd.singularValues();
    if (options & Eigen::ComputeFullV) r.v = svd.matrixV();
    if (options & Eigen::ComputeThinU) r.u = svd.matrixU();
  }
  return r;
}

}  // namespace

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol;
}

Mat psd_sqrt(const Mat& a, const Tolerance& tol) {
  if (a.rows() != a.cols()) throw Error(Err::ShapeMismatch, "psd_sqrt: square matrix required");
  if (a.rows() == 0) return a;
  double scale = a.norm();
  if (!is_hermitian(a, tol.eps_eq * std::max(1.0, scale)))
    throw Error(Err::NotHermitian, "psd_sqrt: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  Eigen::VectorXd lam = es.eigenvalues();
  double lmax = std::max(lam.cwiseAbs().maxCoeff(), 0.0);
  double cut = tol.eps_psd * lmax;
  if (lam.minCoeff() < -cut - 10 * tol.eps_psd)
    throw Error(Err::NotPSD, "psd_sqrt: eigenvalue " + std::to_string(lam.minCoeff()) + " below -eps_psd*||a||");
  Eigen::VectorXd root = lam.unaryExpr([cut](double x) { return x <= cut ? 0.0 : std::sqrt(x); });
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// The divide and conquer method can also return finite but inaccurate factor
// columns while reporting accurate singular values.  Callers that consume the
// factors therefore verify the factor properties themselves and redo the
// decomposition with the one sided rotation method when any of them fails.
// Both checks matter: a wrong direction shows up as a large image under the
// matrix, while a collapsed (near zero) column passes that test vacuously and
// is only caught by the loss of orthonormality.
bool ortho_ok(const Mat& q) {
  if (q.cols() == 0) return true;
  Mat g = q.adjoint() * q;
  g.diagonal().array() -= 1.0;
  return g.norm() <= 1e-8 * std::sqrt(double(q.cols()));
}

bool kernel_ok(const Mat& a, const Mat& kern, double cut) {
  if (kern.cols() == 0) return true;
  return (a * kern).norm() <= 10.0 * cut * std::sqrt(double(kern.cols()));
}

}  // namespace

Mat null_space(const Mat& a, const Tolerance& tol) {
  if (a.cols() == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
  SvdParts svd = robust_svd(a, Eigen::ComputeFullV);
  double cut = tol.eps_rank * std::max(1.0, svd.sv.size() ? svd.sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < svd.sv.size(); ++i)
    if (svd.sv(i) > cut) ++rank;
  Mat kern = svd.v.rightCols(a.cols() - rank);
  if (!kernel_ok(a, kern, cut) || !ortho_ok(kern)) {
    Eigen::JacobiSVD<Mat> jac(a, Eigen::ComputeFullV);
    const auto& jsv = jac.singularValues();
    cut = tol.eps_rank * std::max(1.0, jsv.size() ? jsv(0) : 0.0);
    rank = 0;
    for (int i = 0; i < jsv.size(); ++i)
      if (jsv(i) > cut) ++rank;
    kern = jac.matrixV().rightCols(a.cols() - rank);
  }
  return kern;
}

int numerical_rank(const Mat& a, const Tolerance& tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  SvdParts svd = robust_svd(a, 0);
  double cut = tol.eps_rank * std::max(1.0, svd.sv.size() ? svd.sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < svd.sv.size(); ++i)
    if (svd.sv(i) > cut) ++rank;
  return rank;
}

Mat range_basis(const Mat& a, const Tolerance& tol) {
  if (a.rows() == 0 || a.cols() == 0) return Mat(a.rows(), 0);
  SvdParts svd = robust_svd(a, Eigen::ComputeThinU);
  double cut = tol.eps_rank * std::max(1.0, svd.sv.size() ? svd.sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < svd.sv.size(); ++i)
    if (svd.sv(i) > cut) ++rank;
  Mat u = svd.u.leftCols(rank);
  double resid = (a - u * (u.adjoint() * a)).norm();
  if (resid > 10.0 * cut * std::sqrt(double(std::min(a.rows(), a.cols()))) ||
      !ortho_ok(u)) {
    Eigen::JacobiSVD<Mat> jac(a, Eigen::ComputeThinU);
    const auto& jsv = jac.singularValues();
    cut = tol.eps_rank * std::max(1.0, jsv.size() ? jsv(0) : 0.0);
    rank = 0;
    for (int i = 0; i < jsv.size(); ++i)
      if (jsv(i) > cut) ++rank;
    u = jac.matrixU().leftCols(rank);
  }
  return u;
}

std::vector<Mat> solve_intertwiners(const std::vector<std::pair<Mat, Mat>>& pairs,
                                    const Tolerance& tol) {
  if (pairs.empty()) throw Error(Err::BadConfig, "solve_intertwiners: no constraints");
  const int p = static_cast<int>(pairs.front().first.rows());
  const int q = static_cast<int>(pairs.front().second.rows());
  for (const auto& [a, b] : pairs) {
    if (a.rows() != p || a.cols() != p || b.rows() != q || b.cols() != q)
      throw Error(Err::ShapeMismatch, "solve_intertwiners: inconsistent pair shapes");
  }
  if (p == 0 || q == 0) return {};
  Mat c(static_cast<int>(pairs.size()) * p * q, p * q);
  Mat iq = Mat::Identity(q, q), ip = Mat::Identity(p, p);
  int row = 0;
  double scale = 1.0;
  for (const auto& [a, b] : pairs) {
    c.middleRows(row, p * q) = kron(iq, a) - kron(b.transpose(), ip);
    row += p * q;
    scale = std::max({scale, op_norm(a), op_norm(b)});
  }
  // Rank cut anchored to the constraint operators, not the difference matrix:
  // a system that is zero up to roundoff must yield the full solution space.
  SvdParts svd = robust_svd(c, Eigen::ComputeFullV);
  double cut = tol.eps_rank * scale;
  int rank = 0;
  for (int i = 0; i < svd.sv.size(); ++i)
    if (svd.sv(i) > cut) ++rank;
  Mat basis = svd.v.rightCols(p * q - rank);
  if (!kernel_ok(c, basis, cut) || !ortho_ok(basis)) {
    Eigen::JacobiSVD<Mat> jac(c, Eigen::ComputeFullV);
    const auto& jsv = jac.singularValues();
    rank = 0;
    for (int i = 0; i < jsv.size(); ++i)
      if (jsv(i) > cut) ++rank;
    basis = jac.matrixV().rightCols(p * q - rank);
  }
  std::vector<Mat> out;
  out.reserve(basis.cols());
  for (int j = 0; j < basis.cols(); ++j) out.push_back(unvec(basis.col(j), p));
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec vec(const Mat& a) { return Eigen::Map<const Vec>(a.data(), a.size()); }

Mat unvec(const Vec& v, int rows) {
  if (rows <= 0 || v.size() % rows != 0)
    throw Error(Err::ShapeMismatch, "unvec: size not divisible by rows");
  return Eigen::Map<const Mat>(v.data(), rows, v.size() / rows);
}

double span_distance(const Mat& a, const Mat& b, const Tolerance& tol) {
  if (a.rows() != b.rows()) throw Error(Err::ShapeMismatch, "span_distance: row mismatch");
  Mat qa = range_basis(a, tol), qb = range_basis(b, tol);
  return op_norm(qa * qa.adjoint() - qb * qb.adjoint());
}

double span_residual(const Mat& span_cols, const Mat& b, const Tolerance& tol) {
  if (b.cols() == 0) return 0.0;
  Mat q = range_basis(span_cols, tol);
  double worst = 0.0;
  for (int j = 0; j < b.cols(); ++j) {
    double n = b.col(j).norm();
    if (n <= tol.eps_rank) continue;
    worst = std::max(worst, (b.col(j) - q * (q.adjoint() * b.col(j))).norm() / n);
  }
  return worst;
}

double Rng::real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

int Rng::integer(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(eng);
}

cplx Rng::gauss() {
  std::normal_distribution<double> d(0.0, 1.0);
  double re = d(eng);
  double im = d(eng);
  return {re, im};
}

Vec Rng::gauss_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss();
  return v;
}

Mat Rng::ginibre(int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss();
  return m;
}

Mat Rng::unitary(int n) {
  Mat g = ginibre(n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix phases so the distribution is Haar.
  for (int j = 0; j < n; ++j) {
    cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : cplx(1, 0);
  }
  return q;
}

Mat Rng::hermitian(int n) {
  Mat g = ginibre(n, n);
  return 0.5 * (g + g.adjoint());
}

Mat Rng::with_norm(int rows, int cols, double norm) {
  Mat g = ginibre(rows, cols);
  double s = op_norm(g);
  while (s < 1e-12) {
    g = ginibre(rows, cols);
    s = op_norm(g);
  }
  return g * (norm / s);
}

PsdRoot psd_root_basis(const Mat& gram, const Tolerance& tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.adjoint()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  int n = static_cast<int>(gram.rows());
  if (n > 0 && lam.minCoeff() < -10 * tol.eps_psd)
    throw Error(Err::NotPSD,
                "psd_root_basis: negative eigenvalue " + std::to_string(lam.minCoeff()));
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (lam(i) > tol.eps_rank) keep.push_back(i);
  int m = static_cast<int>(keep.size());
  PsdRoot out;
  out.basis = Mat(n, m);
  out.scale = Eigen::VectorXd(m);
  for (int j = 0; j < m; ++j) {
    out.basis.col(j) = es.eigenvectors().col(keep[j]);
    out.scale(j) = std::sqrt(lam(keep[j]));
  }
  out.root = out.basis * out.scale.asDiagonal() * out.basis.adjoint();
  return out;
}

Mat unitary_intertwiner(const std::vector<Mat>& sols, Rng& rng) {
  if (sols.empty()) return Mat(0, 0);
  int rows = static_cast<int>(sols[0].rows());
  int cols = static_cast<int>(sols[0].cols());
  for (int attempt = 0; attempt < 8; ++attempt) {
    Mat x = Mat::Zero(rows, cols);
    for (const Mat& s : sols) x += rng.gauss() * s;
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) > 1e-8 * sv(0))
      return svd.matrixU() * svd.matrixV().adjoint();
  }
  throw Error(Err::FailedCondition, "no invertible intertwiner in the solution space");
}

}  // namespace corrlab
