#include "corrlab/correspondence.hpp"

#include <algorithm>

namespace corrlab {

double CorrespondenceReport::worst() const {
  return std::max({left_hom, right_hom, commute, star, right_linear, left_adjoint,
                   psd_violation});
}

Mat Correspondence::left_apply(const AlgebraElement& a) const {
  if (a.algebra != left_alg) throw Error(Err::AlgebraMismatch, "left action");
  Mat out = Mat::Zero(dim, dim);
  Vec c = a.coords();
  for (int g = 0; g < left_alg.dim(); ++g)
    if (c[g] != cplx(0)) out += c[g] * left_action[g];
  return out;
}

Mat Correspondence::right_apply(const AlgebraElement& b) const {
  if (b.algebra != right_alg) throw Error(Err::AlgebraMismatch, "right action");
  Mat out = Mat::Zero(dim, dim);
  Vec c = b.coords();
  for (int g = 0; g < right_alg.dim(); ++g)
    if (c[g] != cplx(0)) out += c[g] * right_action[g];
  return out;
}

AlgebraElement Correspondence::inner(const Vec& x, const Vec& y) const {
  if (x.size() != dim || y.size() != dim) throw Error(Err::ShapeMismatch, "inner product");
  AlgebraElement out = AlgebraElement::zero(right_alg);
  for (int i = 0; i < dim; ++i) {
    if (x[i] == cplx(0)) continue;
    for (int j = 0; j < dim; ++j) {
      cplx c = std::conj(x[i]) * y[j];
      if (c == cplx(0)) continue;
      out = out + gram[i][j] * c;
    }
  }
  return out;
}

Mat localized_gram(const Correspondence& e, const Representation& rep) {
  if (rep.algebra != e.right_alg) throw Error(Err::AlgebraMismatch, "localizing representation");
  int h = rep.space_dim;
  Mat b = Mat::Zero(e.dim * h, e.dim * h);
  for (int i = 0; i < e.dim; ++i)
    for (int j = 0; j < e.dim; ++j) b.block(i * h, j * h, h, h) = rep.apply(e.gram[i][j]);
  return b;
}

namespace {

// null directions of the module inner product, computed from the gram over a
// faithful representation of the right algebra
Mat gram_kernel(const Mat& balg, int d, int h, const Tolerance& tol) {
  Mat m(d * h * h, d);
  for (int k = 0; k < d; ++k) m.col(k) = vec(balg.middleCols(k * h, h));
  return null_space(m, tol);
}

Mat left_mult_matrix(const MultiMatrixAlgebra& a, const AlgebraElement& y) {
  Mat out(a.dim(), a.dim());
  for (int f = 0; f < a.dim(); ++f)
    out.col(f) = (y * AlgebraElement::generator(a, f)).coords();
  return out;
}

Mat right_mult_matrix(const MultiMatrixAlgebra& a, const AlgebraElement& y) {
  Mat out(a.dim(), a.dim());
  for (int f = 0; f < a.dim(); ++f)
    out.col(f) = (AlgebraElement::generator(a, f) * y).coords();
  return out;
}

// algebraic module together with its gram over the canonical faithful
// representation of the right algebra, prior to removing null directions
struct AlgebraicModule {
  MultiMatrixAlgebra left_alg, right_alg;
  int dim = 0;
  std::vector<Mat> left_action, right_action;
  Mat balg;
};

TensorProduct quotient_module(const AlgebraicModule& am, const Tolerance& tol) {
  int h = am.right_alg.canonical_dim();
  Mat kernel = gram_kernel(am.balg, am.dim, h, tol);
  Mat w = null_space(Mat(kernel.adjoint()), tol);
  int d = static_cast<int>(w.cols());

  TensorProduct tp;
  tp.quotient_map = w.adjoint();
  tp.lift = w;
  Correspondence& e = tp.product;
  e.left_alg = am.left_alg;
  e.right_alg = am.right_alg;
  e.dim = d;
  e.left_action.reserve(am.left_action.size());
  for (const auto& l : am.left_action) e.left_action.push_back(w.adjoint() * l * w);
  e.right_action.reserve(am.right_action.size());
  for (const auto& r : am.right_action) e.right_action.push_back(w.adjoint() * r * w);

  Mat wi = kron(w, Mat::Identity(h, h));
  Mat bq = wi.adjoint() * am.balg * wi;
  e.gram.assign(d, std::vector<AlgebraElement>());
  for (int i = 0; i < d; ++i) {
    e.gram[i].reserve(d);
    for (int j = 0; j < d; ++j)
      e.gram[i].push_back(element_from_canonical(am.right_alg, bq.block(i * h, j * h, h, h)));
  }
  return tp;
}

}  // namespace

CorrespondenceReport Correspondence::validate(const Tolerance& tol) const {
  CorrespondenceReport r;
  const auto& ml = left_alg;
  const auto& mr = right_alg;

  for (int g = 0; g < ml.dim(); ++g) {
    auto gi = ml.gen_index(g);
    for (int k = 0; k < ml.dim(); ++k) {
      auto ki = ml.gen_index(k);
      Mat prod = left_action[g] * left_action[k];
      if (gi.block == ki.block && gi.q == ki.p)
        prod -= left_action[ml.flat_index(gi.block, gi.p, ki.q)];
      r.left_hom = std::max(r.left_hom, op_norm(prod));
    }
  }
  Mat unit = Mat::Zero(dim, dim);
  for (int i = 0; i < ml.num_blocks(); ++i)
    for (int p = 0; p < ml.blocks[i]; ++p) unit += left_action[ml.flat_index(i, p, p)];
  r.left_hom = std::max(r.left_hom, op_norm(unit - Mat::Identity(dim, dim)));

  for (int g = 0; g < mr.dim(); ++g) {
    auto gi = mr.gen_index(g);
    for (int k = 0; k < mr.dim(); ++k) {
      auto ki = mr.gen_index(k);
      // acting by the product g k means acting with k after g
      Mat prod = right_action[k] * right_action[g];
      if (gi.block == ki.block && gi.q == ki.p)
        prod -= right_action[mr.flat_index(gi.block, gi.p, ki.q)];
      r.right_hom = std::max(r.right_hom, op_norm(prod));
    }
  }
  unit = Mat::Zero(dim, dim);
  for (int i = 0; i < mr.num_blocks(); ++i)
    for (int p = 0; p < mr.blocks[i]; ++p) unit += right_action[mr.flat_index(i, p, p)];
  r.right_hom = std::max(r.right_hom, op_norm(unit - Mat::Identity(dim, dim)));

  for (const auto& l : left_action)
    for (const auto& rr : right_action)
      r.commute = std::max(r.commute, op_norm(l * rr - rr * l));

  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      r.star = std::max(r.star, (gram[j][i] - gram[i][j].adjoint()).norm());

  Representation rho = canonical_faithful(mr);
  int h = rho.space_dim;
  Mat b = localized_gram(*this, rho);
  Mat idh = Mat::Identity(h, h);
  for (int g = 0; g < mr.dim(); ++g) {
    Mat lhs = b * kron(right_action[g], idh);
    Mat rhs = b * kron(Mat::Identity(dim, dim), rho.apply_gen(g));
    r.right_linear = std::max(r.right_linear, op_norm(lhs - rhs));
  }
  for (int g = 0; g < ml.dim(); ++g) {
    auto gi = ml.gen_index(g);
    int gstar = ml.flat_index(gi.block, gi.q, gi.p);
    Mat lhs = kron(left_action[g], idh).adjoint() * b;
    Mat rhs = b * kron(left_action[gstar], idh);
    r.left_adjoint = std::max(r.left_adjoint, op_norm(lhs - rhs));
  }

  if (dim > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es((b + b.adjoint()) / 2.0);
    r.psd_violation = std::max(0.0, -es.eigenvalues().minCoeff());
    Mat kernel = gram_kernel(b, dim, h, tol);
    r.kernel_dim = static_cast<int>(kernel.cols());
    r.definite = r.kernel_dim == 0;
  }
  return r;
}

void Correspondence::check(const Tolerance& tol) const {
  CorrespondenceReport r = validate(tol);
  if (!r.definite) throw Error(Err::NotPSD, "degenerate inner product");
  if (r.worst() > tol.eps_eq * std::max(1.0, static_cast<double>(dim)))
    throw Error(Err::FailedCondition, "bimodule laws fail, defect " + std::to_string(r.worst()));
}

Correspondence zero_correspondence(const MultiMatrixAlgebra& left,
                                   const MultiMatrixAlgebra& right) {
  left.validate();
  right.validate();
  Correspondence e;
  e.left_alg = left;
  e.right_alg = right;
  e.dim = 0;
  e.left_action.assign(left.dim(), Mat::Zero(0, 0));
  e.right_action.assign(right.dim(), Mat::Zero(0, 0));
  return e;
}

Correspondence identity_correspondence(const MultiMatrixAlgebra& a) {
  a.validate();
  Correspondence e;
  e.left_alg = a;
  e.right_alg = a;
  e.dim = a.dim();
  auto gens = standard_generators(a);
  for (const auto& g : gens) {
    e.left_action.push_back(left_mult_matrix(a, g));
    e.right_action.push_back(right_mult_matrix(a, g));
  }
  e.gram.assign(e.dim, std::vector<AlgebraElement>());
  for (int i = 0; i < e.dim; ++i) {
    e.gram[i].reserve(e.dim);
    for (int j = 0; j < e.dim; ++j) e.gram[i].push_back(gens[i].adjoint() * gens[j]);
  }
  return e;
}

Correspondence endomorphism_correspondence(const AlgebraMap& alpha) {
  if (alpha.domain != alpha.codomain)
    throw Error(Err::AlgebraMismatch, "endomorphism must fix the algebra");
  double defect = alpha.hom_defect();
  if (defect > 1e-8) throw Error(Err::NotHomomorphism, "twisting map is not a homomorphism");
  Correspondence e = identity_correspondence(alpha.domain);
  for (int g = 0; g < alpha.domain.dim(); ++g)
    e.left_action[g] = left_mult_matrix(alpha.domain, alpha.images[g]);
  return e;
}

Correspondence gns_correspondence(const AlgebraMap& theta, const Tolerance& tol) {
  const auto& m = theta.domain;
  const auto& n = theta.codomain;
  double choi = theta.choi_min_eigenvalue();
  if (choi < -std::max(tol.eps_psd, 1e-10) * 100)
    throw Error(Err::NotCompletelyPositive, "choi spectrum dips to " + std::to_string(choi));

  int dm = m.dim(), dn = n.dim();
  int h = n.canonical_dim();
  Representation rho = canonical_faithful(n);

  std::vector<Mat> theta_img(dm);
  for (int g = 0; g < dm; ++g) theta_img[g] = theta.images[g].block_diag();
  std::vector<Mat> rho_img(dn);
  for (int g = 0; g < dn; ++g) rho_img[g] = rho.apply_gen(g);

  AlgebraicModule am;
  am.left_alg = m;
  am.right_alg = n;
  am.dim = dm * dn;
  // basis a (x) b indexed (a, b) with a major
  for (int g = 0; g < dm; ++g)
    am.left_action.push_back(
        kron(left_mult_matrix(m, AlgebraElement::generator(m, g)), Mat::Identity(dn, dn)));
  for (int g = 0; g < dn; ++g)
    am.right_action.push_back(
        kron(Mat::Identity(dm, dm), right_mult_matrix(n, AlgebraElement::generator(n, g))));

  am.balg = Mat::Zero(am.dim * h, am.dim * h);
  for (int u = 0; u < dm; ++u) {
    auto ui = m.gen_index(u);
    for (int c = 0; c < dm; ++c) {
      auto ci = m.gen_index(c);
      if (ui.block != ci.block || ui.p != ci.p) continue;  // u* c vanishes
      const Mat& mid = theta_img[m.flat_index(ui.block, ui.q, ci.q)];
      for (int v = 0; v < dn; ++v) {
        Mat lhs = rho_img[v].adjoint() * mid;
        for (int d2 = 0; d2 < dn; ++d2)
          am.balg.block((u * dn + v) * h, (c * dn + d2) * h, h, h) = lhs * rho_img[d2];
      }
    }
  }
  return quotient_module(am, tol).product;
}

Correspondence quiver_correspondence(const IMat& counts) {
  int nb = static_cast<int>(counts.rows());
  if (counts.cols() != nb) throw Error(Err::ShapeMismatch, "square count matrix");
  MultiMatrixAlgebra d_n{std::vector<int>(nb, 1)};
  d_n.validate();
  struct Arrow {
    int source, target;
  };
  std::vector<Arrow> arrows;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      if (counts(i, j) < 0) throw Error(Err::BadConfig, "arrow counts must be nonnegative");
      for (int t = 0; t < counts(i, j); ++t) arrows.push_back({i, j});
    }

  Correspondence e;
  e.left_alg = d_n;
  e.right_alg = d_n;
  e.dim = static_cast<int>(arrows.size());
  for (int g = 0; g < nb; ++g) {
    Mat l = Mat::Zero(e.dim, e.dim);
    Mat r = Mat::Zero(e.dim, e.dim);
    for (int a = 0; a < e.dim; ++a) {
      if (arrows[a].source == g) l(a, a) = 1.0;
      if (arrows[a].target == g) r(a, a) = 1.0;
    }
    e.left_action.push_back(std::move(l));
    e.right_action.push_back(std::move(r));
  }
  e.gram.assign(e.dim, std::vector<AlgebraElement>());
  for (int a = 0; a < e.dim; ++a) {
    e.gram[a].reserve(e.dim);
    for (int b = 0; b < e.dim; ++b)
      e.gram[a].push_back(a == b ? AlgebraElement::central_projection(d_n, arrows[a].target)
                                 : AlgebraElement::zero(d_n));
  }
  return e;
}

Correspondence direct_sum(const Correspondence& a, const Correspondence& b) {
  if (a.left_alg != b.left_alg || a.right_alg != b.right_alg)
    throw Error(Err::AlgebraMismatch, "summands over different algebras");
  Correspondence e;
  e.left_alg = a.left_alg;
  e.right_alg = a.right_alg;
  e.dim = a.dim + b.dim;
  for (size_t g = 0; g < a.left_action.size(); ++g) {
    Mat l = Mat::Zero(e.dim, e.dim);
    l.topLeftCorner(a.dim, a.dim) = a.left_action[g];
    l.bottomRightCorner(b.dim, b.dim) = b.left_action[g];
    e.left_action.push_back(std::move(l));
  }
  for (size_t g = 0; g < a.right_action.size(); ++g) {
    Mat r = Mat::Zero(e.dim, e.dim);
    r.topLeftCorner(a.dim, a.dim) = a.right_action[g];
    r.bottomRightCorner(b.dim, b.dim) = b.right_action[g];
    e.right_action.push_back(std::move(r));
  }
  e.gram.assign(e.dim, std::vector<AlgebraElement>());
  for (int i = 0; i < e.dim; ++i)
    for (int j = 0; j < e.dim; ++j) {
      bool ia = i < a.dim, ja = j < a.dim;
      if (ia && ja)
        e.gram[i].push_back(a.gram[i][j]);
      else if (!ia && !ja)
        e.gram[i].push_back(b.gram[i - a.dim][j - a.dim]);
      else
        e.gram[i].push_back(AlgebraElement::zero(e.right_alg));
    }
  return e;
}

Vec TensorProduct::simple(const Vec& x, const Vec& y) const {
  Mat xy = kron(Mat(x), Mat(y));
  return quotient_map * Vec(Eigen::Map<const Vec>(xy.data(), xy.size()));
}

TensorProduct tensor(const Correspondence& e, const Correspondence& f, const Tolerance& tol) {
  if (e.right_alg != f.left_alg) throw Error(Err::AlgebraMismatch, "tensor middle algebra");
  int de = e.dim, df = f.dim;
  int h = f.right_alg.canonical_dim();
  Representation rho = canonical_faithful(f.right_alg);

  AlgebraicModule am;
  am.left_alg = e.left_alg;
  am.right_alg = f.right_alg;
  am.dim = de * df;
  Mat idf = Mat::Identity(df, df);
  Mat ide = Mat::Identity(de, de);
  for (const auto& l : e.left_action) am.left_action.push_back(kron(l, idf));
  for (const auto& r : f.right_action) am.right_action.push_back(kron(ide, r));

  Mat bf = localized_gram(f, rho);
  Mat idh = Mat::Identity(h, h);
  am.balg = Mat::Zero(am.dim * h, am.dim * h);
  int chunk = df * h;
  for (int i = 0; i < de; ++i)
    for (int k = 0; k < de; ++k) {
      Mat a = f.left_apply(e.gram[i][k]);
      am.balg.block(i * chunk, k * chunk, chunk, chunk) = bf * kron(a, idh);
    }
  return quotient_module(am, tol);
}

IMat multiplicity_matrix(const Correspondence& e, const Tolerance& tol) {
  int nl = e.left_alg.num_blocks(), nr = e.right_alg.num_blocks();
  IMat c(nl, nr);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nr; ++j) {
      Mat p = e.left_apply(AlgebraElement::central_projection(e.left_alg, i)) *
              e.right_apply(AlgebraElement::central_projection(e.right_alg, j));
      int r = e.dim == 0 ? 0 : numerical_rank(p, tol);
      int denom = e.left_alg.blocks[i] * e.right_alg.blocks[j];
      if (r % denom != 0)
        throw Error(Err::NonIntegralMultiplicity, "corner rank " + std::to_string(r) +
                                                      " not divisible by " + std::to_string(denom));
      c(i, j) = r / denom;
    }
  return c;
}

namespace {

std::vector<std::vector<int>> size_preserving_perms(const std::vector<int>& sizes) {
  int n = static_cast<int>(sizes.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::vector<int>> out;
  std::sort(idx.begin(), idx.end());
  do {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = sizes[idx[i]] == sizes[i];
    if (ok) out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

// columns L(e_{p0}) R(f_{0q}) w_t over an orthonormalized corner basis w
Mat corner_frame(const Correspondence& e, int bi, int bj, int count, const Tolerance& tol) {
  int n = e.left_alg.blocks[bi], m = e.right_alg.blocks[bj];
  Mat p = e.left_action[e.left_alg.flat_index(bi, 0, 0)] *
          e.right_action[e.right_alg.flat_index(bj, 0, 0)];
  Mat b0 = range_basis(p, tol);
  if (b0.cols() != count) throw Error(Err::MultiplicityMismatch, "corner rank changed");
  Mat gs(count, count);
  for (int u = 0; u < count; ++u)
    for (int v = 0; v < count; ++v) gs(u, v) = e.inner(b0.col(u), b0.col(v)).block[bj](0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es((gs + gs.adjoint()) / 2.0);
  if (count > 0 && es.eigenvalues().minCoeff() <= 0)
    throw Error(Err::NotPSD, "degenerate corner inner product");
  Mat w = b0 * es.operatorInverseSqrt();

  Mat frame(e.dim, count * n * m);
  int col = 0;
  for (int t = 0; t < count; ++t)
    for (int p1 = 0; p1 < n; ++p1)
      for (int q = 0; q < m; ++q)
        frame.col(col++) = e.left_action[e.left_alg.flat_index(bi, p1, 0)] *
                           (e.right_action[e.right_alg.flat_index(bj, 0, q)] * w.col(t));
  return frame;
}

Mat block_permutation_matrix(const MultiMatrixAlgebra& a, const std::vector<int>& perm) {
  int h = a.canonical_dim();
  std::vector<int> offset(a.num_blocks(), 0);
  for (int i = 1; i < a.num_blocks(); ++i) offset[i] = offset[i - 1] + a.blocks[i - 1];
  Mat pi = Mat::Zero(h, h);
  for (int j = 0; j < a.num_blocks(); ++j)
    for (int r = 0; r < a.blocks[j]; ++r) pi(offset[perm[j]] + r, offset[j] + r) = 1.0;
  return pi;
}

}  // namespace

std::optional<CorrespondenceIso> find_isomorphism(const Correspondence& e,
                                                  const Correspondence& f, bool flexible,
                                                  const Tolerance& tol) {
  if (e.left_alg != f.left_alg || e.right_alg != f.right_alg)
    throw Error(Err::AlgebraMismatch, "candidates over different algebras");
  if (e.dim != f.dim) return std::nullopt;

  IMat ce = multiplicity_matrix(e, tol);
  IMat cf = multiplicity_matrix(f, tol);
  int nl = e.left_alg.num_blocks(), nr = e.right_alg.num_blocks();

  std::vector<std::vector<int>> lperms, rperms;
  if (flexible) {
    lperms = size_preserving_perms(e.left_alg.blocks);
    rperms = size_preserving_perms(e.right_alg.blocks);
  } else {
    std::vector<int> id_l(nl), id_r(nr);
    for (int i = 0; i < nl; ++i) id_l[i] = i;
    for (int j = 0; j < nr; ++j) id_r[j] = j;
    lperms = {id_l};
    rperms = {id_r};
  }

  for (const auto& pl : lperms)
    for (const auto& pr : rperms) {
      bool match = true;
      for (int i = 0; i < nl && match; ++i)
        for (int j = 0; j < nr && match; ++j) match = cf(pl[i], pr[j]) == ce(i, j);
      if (!match) continue;

      Mat fe(e.dim, e.dim), ff(f.dim, f.dim);
      int col = 0;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nr; ++j) {
          int c = ce(i, j);
          if (c == 0) continue;
          Mat be = corner_frame(e, i, j, c, tol);
          Mat bf = corner_frame(f, pl[i], pr[j], c, tol);
          fe.middleCols(col, be.cols()) = be;
          ff.middleCols(col, bf.cols()) = bf;
          col += static_cast<int>(be.cols());
        }
      if (col != e.dim) throw Error(Err::MultiplicityMismatch, "frame does not exhaust");

      CorrespondenceIso iso;
      iso.left_perm = pl;
      iso.right_perm = pr;
      iso.map = e.dim == 0 ? Mat::Zero(0, 0)
                           : Mat(ff * fe.colPivHouseholderQr().solve(
                                          Mat::Identity(e.dim, e.dim)));

      double defect = 0;
      for (int g = 0; g < e.left_alg.dim(); ++g) {
        auto gi = e.left_alg.gen_index(g);
        int g2 = e.left_alg.flat_index(pl[gi.block], gi.p, gi.q);
        defect = std::max(defect, op_norm(f.left_action[g2] * iso.map - iso.map * e.left_action[g]));
      }
      for (int g = 0; g < e.right_alg.dim(); ++g) {
        auto gi = e.right_alg.gen_index(g);
        int g2 = e.right_alg.flat_index(pr[gi.block], gi.p, gi.q);
        defect =
            std::max(defect, op_norm(f.right_action[g2] * iso.map - iso.map * e.right_action[g]));
      }
      if (e.dim > 0) {
        Representation rho = canonical_faithful(e.right_alg);
        int h = rho.space_dim;
        Mat be = localized_gram(e, rho);
        Mat bf2 = localized_gram(f, rho);
        Mat pi = block_permutation_matrix(e.right_alg, pr);
        Mat psi_h = kron(iso.map, Mat::Identity(h, h));
        Mat lhs = psi_h.adjoint() * bf2 * psi_h;
        Mat rhs = kron(Mat::Identity(e.dim, e.dim), pi) * be *
                  kron(Mat::Identity(e.dim, e.dim), pi).adjoint();
        defect = std::max(defect, op_norm(lhs - rhs));
      }
      iso.defect = defect;
      return iso;
    }
  return std::nullopt;
}

Mat Localization::insert(const Vec& xi) const {
  if (xi.size() != corr_dim) throw Error(Err::ShapeMismatch, "insertion vector");
  return qmap * kron(Mat(xi), Mat::Identity(base_dim, base_dim));
}

Mat Localization::op(const Mat& x_map, const Mat& s) const {
  if (x_map.rows() != corr_dim || x_map.cols() != corr_dim || s.rows() != base_dim ||
      s.cols() != base_dim)
    throw Error(Err::ShapeMismatch, "localized operator factors");
  return qmap * kron(x_map, s) * pinv;
}

Localization localize(const Correspondence& e, const Representation& sigma,
                      const Tolerance& tol) {
  Localization loc;
  loc.corr_dim = e.dim;
  loc.base_dim = sigma.space_dim;
  Mat b = localized_gram(e, sigma);
  b = (b + Mat(b.adjoint())) / 2.0;
  int total = static_cast<int>(b.rows());
  if (total == 0) {
    loc.dim = 0;
    loc.qmap = Mat(0, 0);
    loc.pinv = Mat(0, 0);
    loc.kernel = Mat(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(b);
    const auto& ev = es.eigenvalues();
    double top = std::max(0.0, ev.maxCoeff());
    double cut = std::max(tol.eps_rank * top, 0.0);
    if (ev.minCoeff() < -std::max(1.0, top) * 1e-8)
      throw Error(Err::NotPSD, "localized gram has negative spectrum");

    std::vector<int> pos, nul;
    for (int k = 0; k < ev.size(); ++k) (ev[k] > cut ? pos : nul).push_back(k);
    loc.dim = static_cast<int>(pos.size());
    loc.qmap = Mat(loc.dim, total);
    loc.pinv = Mat(total, loc.dim);
    for (int k = 0; k < loc.dim; ++k) {
      double root = std::sqrt(ev[pos[k]]);
      loc.qmap.row(k) = root * es.eigenvectors().col(pos[k]).adjoint();
      loc.pinv.col(k) = es.eigenvectors().col(pos[k]) / root;
    }
    loc.kernel = Mat(total, static_cast<int>(nul.size()));
    for (size_t k = 0; k < nul.size(); ++k) loc.kernel.col(k) = es.eigenvectors().col(nul[k]);
  }

  std::vector<Mat> images;
  images.reserve(e.left_action.size());
  Mat idh = Mat::Identity(loc.base_dim, loc.base_dim);
  for (const auto& l : e.left_action) images.push_back(loc.qmap * kron(l, idh) * loc.pinv);
  loc.left = Representation::from_images(e.left_alg, std::move(images), tol);
  return loc;
}

Mat localized_map(const Localization& to, const Localization& from, const Mat& x_map,
                  const Mat& s) {
  if (x_map.rows() != to.corr_dim || x_map.cols() != from.corr_dim ||
      s.rows() != to.base_dim || s.cols() != from.base_dim)
    throw Error(Err::ShapeMismatch, "localized map factors");
  return to.qmap * kron(x_map, s) * from.pinv;
}

double localized_map_defect(const Localization& to, const Localization& from, const Mat& x_map,
                            const Mat& s) {
  if (from.kernel.cols() == 0) return 0.0;
  return op_norm(to.qmap * kron(x_map, s) * from.kernel);
}

}  // namespace corrlab
