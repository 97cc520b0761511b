#include "corrlab/dual.hpp"

#include <algorithm>

namespace corrlab {

namespace {

cplx frob_inner(const Mat& a, const Mat& b) { return (a.adjoint() * b).trace(); }

// coordinates of ops in an orthonormal family, with the worst leftover norm
Mat expand_in_basis(const std::vector<Mat>& basis, const std::vector<Mat>& ops,
                    double* residual) {
  int d = static_cast<int>(basis.size());
  Mat coords(d, static_cast<int>(ops.size()));
  for (size_t k = 0; k < ops.size(); ++k) {
    Mat left = ops[k];
    for (int b = 0; b < d; ++b) {
      coords(b, static_cast<int>(k)) = frob_inner(basis[b], ops[k]);
      left -= coords(b, static_cast<int>(k)) * basis[b];
    }
    if (residual) *residual = std::max(*residual, left.norm());
  }
  return coords;
}

}  // namespace

Mat DualCorrespondence::realize(const Vec& coords) const {
  if (coords.size() != corr.dim) throw Error(Err::ShapeMismatch, "dual coordinates");
  Mat out = Mat::Zero(loc.dim, sigma.space_dim);
  for (int a = 0; a < corr.dim; ++a) out += coords[a] * basis[a];
  return out;
}

DualCorrespondence dual(const Correspondence& e, const Representation& sigma,
                        const Representation& tau, const Tolerance& tol) {
  if (sigma.algebra != e.left_alg || tau.algebra != e.right_alg)
    throw Error(Err::AlgebraMismatch, "representations do not match the module");

  DualCorrespondence d;
  d.sigma = sigma;
  d.tau = tau;
  d.loc = localize(e, tau, tol);

  std::vector<std::pair<Mat, Mat>> pairs;
  pairs.reserve(e.left_alg.dim());
  for (int g = 0; g < e.left_alg.dim(); ++g)
    pairs.emplace_back(d.loc.left.images[g], sigma.images[g]);
  d.basis = solve_intertwiners(pairs, tol);

  d.left_comm = commutant(tau, tol);
  d.right_comm = commutant(sigma, tol);
  int dim = static_cast<int>(d.basis.size());

  Correspondence& c = d.corr;
  c.left_alg = d.left_comm.algebra;
  c.right_alg = d.right_comm.algebra;
  c.dim = dim;

  Mat ide = Mat::Identity(e.dim, e.dim);
  for (int g = 0; g < c.left_alg.dim(); ++g) {
    const Mat& x = d.left_comm.rep.images[g];
    d.residual = std::max(d.residual, localized_map_defect(d.loc, d.loc, ide, x));
    Mat lam = d.loc.op(ide, x);
    std::vector<Mat> moved;
    moved.reserve(dim);
    for (const auto& t : d.basis) moved.push_back(lam * t);
    c.left_action.push_back(expand_in_basis(d.basis, moved, &d.residual));
  }
  for (int g = 0; g < c.right_alg.dim(); ++g) {
    const Mat& y = d.right_comm.rep.images[g];
    std::vector<Mat> moved;
    moved.reserve(dim);
    for (const auto& t : d.basis) moved.push_back(t * y);
    c.right_action.push_back(expand_in_basis(d.basis, moved, &d.residual));
  }
  c.gram.assign(dim, std::vector<AlgebraElement>());
  for (int a = 0; a < dim; ++a) {
    c.gram[a].reserve(dim);
    for (int b = 0; b < dim; ++b) {
      auto [elem, res] = abstract_coords(d.right_comm.rep, d.basis[a].adjoint() * d.basis[b]);
      d.residual = std::max(d.residual, res);
      c.gram[a].push_back(std::move(elem));
    }
  }
  if (d.residual > 1e-6)
    throw Error(Err::FailedCondition,
                "dual structure residual " + std::to_string(d.residual));
  return d;
}

DualityReport verify_duality(const Correspondence& e, const Representation& sigma,
                             const Representation& tau, const Tolerance& tol) {
  if (!sigma.faithful() || !tau.faithful())
    throw Error(Err::NotFaithful, "duality needs faithful representations");

  DualityReport rep;
  rep.module_dim = e.dim;

  DualCorrespondence hat = dual(e, sigma, tau, tol);
  rep.dual_dim = hat.corr.dim;
  IMat c = multiplicity_matrix(e, tol);
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j)
      rep.expected_dual_dim += c(i, j) * sigma.multiplicities[i] * tau.multiplicities[j];

  DualCorrespondence dd = dual(hat.corr, hat.left_comm.rep, hat.right_comm.rep, tol);
  rep.double_dual_dim = dd.corr.dim;

  const Localization& loc2 = dd.loc;  // dual(E) (x) H
  int dim = hat.corr.dim, h = sigma.space_dim, k = tau.space_dim;

  auto psi = [&](const Vec& xi) {
    Mat lx = hat.loc.insert(xi);  // K -> E (x) K
    Mat m(k, dim * h);
    for (int a = 0; a < dim; ++a) m.middleCols(a * h, h) = lx.adjoint() * hat.basis[a];
    return Mat((m * loc2.pinv).adjoint());  // K -> dual(E) (x) H
  };

  std::vector<Mat> images(e.dim);
  for (int i = 0; i < e.dim; ++i) {
    Vec basis_vec = Vec::Zero(e.dim);
    basis_vec[i] = 1.0;
    images[i] = psi(basis_vec);
  }

  for (int i = 0; i < e.dim; ++i)
    for (int g = 0; g < hat.left_comm.algebra.dim(); ++g) {
      Mat defect = loc2.left.images[g] * images[i] - images[i] * hat.left_comm.rep.images[g];
      rep.intertwiner_defect = std::max(rep.intertwiner_defect, op_norm(defect));
    }

  Mat id_dual = Mat::Identity(dim, dim);
  for (int g = 0; g < e.left_alg.dim(); ++g) {
    Mat amp = localized_map(loc2, loc2, id_dual, sigma.images[g]);
    for (int i = 0; i < e.dim; ++i) {
      Vec moved = e.left_action[g].col(i);
      Mat lhs = psi(moved);
      rep.covariance_defect = std::max(rep.covariance_defect, op_norm(lhs - amp * images[i]));
    }
  }
  for (int g = 0; g < e.right_alg.dim(); ++g)
    for (int i = 0; i < e.dim; ++i) {
      Vec moved = e.right_action[g].col(i);
      Mat lhs = psi(moved);
      rep.covariance_defect =
          std::max(rep.covariance_defect, op_norm(lhs - images[i] * tau.images[g]));
    }

  for (int i = 0; i < e.dim; ++i)
    for (int j = 0; j < e.dim; ++j) {
      Vec bi = Vec::Zero(e.dim), bj = Vec::Zero(e.dim);
      bi[i] = 1.0;
      bj[j] = 1.0;
      Mat lhs = images[i].adjoint() * images[j];
      Mat rhs = tau.apply(e.inner(bi, bj));
      rep.inner_defect = std::max(rep.inner_defect, op_norm(lhs - rhs));
    }

  if (e.dim > 0) {
    Mat stack(loc2.dim * k, e.dim);
    for (int i = 0; i < e.dim; ++i) stack.col(i) = vec(images[i]);
    rep.psi_rank = numerical_rank(stack, tol);
  }
  return rep;
}

SpanReport verify_span(const Correspondence& e, const Representation& sigma,
                       const Representation& tau, const Tolerance& tol) {
  if (!sigma.faithful() || !tau.faithful())
    throw Error(Err::NotFaithful, "span check needs faithful representations");
  DualCorrespondence hat = dual(e, sigma, tau, tol);
  SpanReport rep;
  rep.induced_dim = hat.loc.dim;
  int h = sigma.space_dim;
  if (hat.corr.dim > 0) {
    Mat stack(hat.loc.dim, hat.corr.dim * h);
    for (int a = 0; a < hat.corr.dim; ++a) stack.middleCols(a * h, h) = hat.basis[a];
    rep.span_rank = numerical_rank(stack, tol);
  }
  return rep;
}

DualSumReport verify_dual_sum(const Correspondence& e1, const Correspondence& e2,
                              const Representation& sigma, const Representation& tau,
                              const Tolerance& tol) {
  DualSumReport rep;
  DualCorrespondence d1 = dual(e1, sigma, tau, tol);
  DualCorrespondence d2 = dual(e2, sigma, tau, tol);
  DualCorrespondence ds = dual(direct_sum(e1, e2), sigma, tau, tol);
  rep.sum_dual_dim = ds.corr.dim;
  rep.part_dual_dims = d1.corr.dim + d2.corr.dim;
  auto iso = find_isomorphism(ds.corr, direct_sum(d1.corr, d2.corr), false, tol);
  rep.matched = iso.has_value();
  if (iso) rep.iso_defect = iso->defect;
  return rep;
}

DualTensorReport verify_dual_tensor(const Correspondence& e, const Correspondence& f,
                                    const Representation& sigma, const Representation& tau,
                                    const Representation& pi, const Tolerance& tol) {
  if (!sigma.faithful() || !tau.faithful() || !pi.faithful())
    throw Error(Err::NotFaithful, "tensor check needs faithful representations");
  if (e.right_alg != f.left_alg) throw Error(Err::AlgebraMismatch, "middle algebra");

  DualTensorReport rep;
  DualCorrespondence de = dual(e, sigma, tau, tol);  // T: H -> E (x) K
  DualCorrespondence df = dual(f, tau, pi, tol);     // S: K -> F (x) L

  TensorProduct ef = tensor(e, f, tol);
  DualCorrespondence dt = dual(ef.product, sigma, pi, tol);
  rep.rhs_dim = dt.corr.dim;

  TensorProduct lhs = tensor(df.corr, de.corr, tol);
  rep.lhs_dim = lhs.product.dim;

  int hl = pi.space_dim;
  // E (x) (F (x) L), localized against the representation induced on F (x) L
  Localization loc_efl = localize(e, df.loc.left, tol);
  // both bracketings as quotients of the raw coordinates
  Mat a1 = loc_efl.qmap * kron(Mat::Identity(e.dim, e.dim), df.loc.qmap);
  Mat a2 = dt.loc.qmap * kron(ef.quotient_map, Mat::Identity(hl, hl));
  if (a1.rows() != a2.rows())
    throw Error(Err::ShapeMismatch, "bracketing spaces of different size");
  Mat u = Mat::Zero(a2.rows(), a1.rows());
  if (a1.rows() > 0) {
    Mat gram_a1 = a1 * a1.adjoint();
    u = a2 * a1.adjoint() * gram_a1.llt().solve(Mat::Identity(a1.rows(), a1.rows()));
    rep.assoc_defect = op_norm(u * Mat(u.adjoint()) - Mat::Identity(u.rows(), u.rows()));
  }

  // composite intertwiners for every algebraic pair, then on the quotient
  int dfd = df.corr.dim, ded = de.corr.dim;
  std::vector<Mat> bridge(dfd);
  Mat ide = Mat::Identity(e.dim, e.dim);
  for (int b = 0; b < dfd; ++b)
    bridge[b] = u * localized_map(loc_efl, de.loc, ide, df.basis[b]);
  std::vector<Mat> images;
  images.reserve(lhs.product.dim);
  for (int t = 0; t < lhs.product.dim; ++t) {
    Vec lift = lhs.lift.col(t);
    Mat img = Mat::Zero(dt.loc.dim, sigma.space_dim);
    for (int b = 0; b < dfd; ++b)
      for (int a = 0; a < ded; ++a) {
        cplx wgt = lift[b * ded + a];
        if (wgt != cplx(0)) img += wgt * (bridge[b] * de.basis[a]);
      }
    images.push_back(std::move(img));
  }

  Mat coords = expand_in_basis(dt.basis, images, &rep.membership_defect);

  for (int g = 0; g < lhs.product.left_alg.dim(); ++g)
    rep.bimodule_defect =
        std::max(rep.bimodule_defect,
                 op_norm(coords * lhs.product.left_action[g] - dt.corr.left_action[g] * coords));
  for (int g = 0; g < lhs.product.right_alg.dim(); ++g)
    rep.bimodule_defect =
        std::max(rep.bimodule_defect,
                 op_norm(coords * lhs.product.right_action[g] - dt.corr.right_action[g] * coords));

  for (int t = 0; t < lhs.product.dim; ++t)
    for (int s = 0; s < lhs.product.dim; ++s) {
      Mat op_inner = images[t].adjoint() * images[s];
      Mat expect = de.right_comm.rep.apply(lhs.product.gram[t][s]);
      rep.inner_defect = std::max(rep.inner_defect, op_norm(op_inner - expect));
    }

  rep.rank = lhs.product.dim == 0 ? 0 : numerical_rank(coords, tol);
  return rep;
}

}  // namespace corrlab
