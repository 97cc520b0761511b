#include "corrlab/dilation.hpp"

#include <algorithm>

namespace corrlab {

Mat CovariantPair::op(const Vec& xi) const { return ttilde * loc.insert(xi); }

double CovariantPair::covariance_defect() const {
  double worst = 0;
  for (int g = 0; g < e.right_alg.dim(); ++g)
    worst = std::max(worst,
                     op_norm(ttilde * loc.left.images[g] - sigma.images[g] * ttilde));
  return worst;
}

void CovariantPair::check(const Tolerance& tol) const {
  double nrm = op_norm(ttilde);
  if (nrm > 1 + tol.eps_eq)
    throw Error(Err::NormTooLarge, "covariant pair: contraction norm " + std::to_string(nrm));
  if (covariance_defect() > tol.eps_eq * std::max(1.0, nrm))
    throw Error(Err::FailedCondition, "covariant pair: action does not intertwine");
}

CovariantPair covariant_pair(const Correspondence& e, const Representation& sigma,
                             const Mat& ttilde, const Tolerance& tol) {
  if (e.left_alg != e.right_alg)
    throw Error(Err::AlgebraMismatch, "covariant pair: module must live over a single algebra");
  if (sigma.algebra != e.right_alg)
    throw Error(Err::AlgebraMismatch, "covariant pair: representation algebra mismatch");
  CovariantPair p{e, sigma, localize(e, sigma, tol), ttilde};
  if (ttilde.rows() != sigma.space_dim || ttilde.cols() != p.loc.dim)
    throw Error(Err::ShapeMismatch, "covariant pair: contraction shape mismatch");
  p.check(tol);
  return p;
}

CovariantPair pair_from_eta(const Correspondence& e, const Representation& sigma,
                            const Mat& eta, double scale, const Tolerance& tol) {
  Mat scaled = scale * eta;
  double nrm = op_norm(scaled);
  if (nrm > 1 + tol.eps_eq)
    throw Error(Err::NormTooLarge, "pair_from_eta: scaled norm " + std::to_string(nrm));
  return covariant_pair(e, sigma, scaled.adjoint(), tol);
}

std::vector<Mat> tilde_chain(const CovariantPair& p, const InducedSpace& ind) {
  if (ind.fock->base.dim != p.e.dim || ind.fock->base.right_alg != p.e.right_alg ||
      ind.sigma.space_dim != p.sigma.space_dim)
    throw Error(Err::ShapeMismatch, "tilde_chain: induced space does not match the pair");
  int h = p.sigma.space_dim;
  int de = p.e.dim;
  const MultiMatrixAlgebra& alg = p.e.right_alg;
  Mat ih = Mat::Identity(h, h), ide = Mat::Identity(de, de);
  Mat cur(h, alg.dim() * h);  // module coordinates of level 0 down to H
  for (int g = 0; g < alg.dim(); ++g) cur.middleCols(g * h, h) = p.sigma.images[g];
  std::vector<Mat> chain;
  chain.push_back(cur * ind.levels[0].pinv);
  for (int j = 0; j < ind.fock->depth; ++j) {
    cur = p.ttilde * p.loc.qmap * kron(ide, cur) * kron(ind.fock->steps[j].lift, ih);
    chain.push_back(cur * ind.levels[j + 1].pinv);
  }
  return chain;
}

Mat tilde_n(const CovariantPair& p, int n, const Tolerance& tol) {
  if (n < 0) throw Error(Err::BadConfig, "tilde_n: negative power");
  auto f = fock(p.e, n, tol);
  return tilde_chain(p, induce(f, p.sigma, tol)).back();
}

Mat DilationData::embed_h() const {
  Mat out = Mat::Zero(total_dim, source.sigma.space_dim);
  out.topRows(source.sigma.space_dim).setIdentity();
  return out;
}

Mat DilationData::embed_level(int j) const {
  Mat out = Mat::Zero(total_dim, tail.levels[j].dim);
  out.block(offsets[j + 1], 0, tail.levels[j].dim, tail.levels[j].dim).setIdentity();
  return out;
}

Mat DilationData::v(const Vec& xi) const {
  int h = source.sigma.space_dim;
  Mat out = Mat::Zero(total_dim, total_dim);
  out.block(0, 0, h, h) = source.op(xi);
  if (dbasis.cols() > 0)
    out.block(offsets[1], 0, dbasis.cols(), h) =
        vac0.adjoint() * dbasis.adjoint() * delta * source.loc.insert(xi);
  for (int j = 0; j < depth; ++j)
    out.block(offsets[j + 2], offsets[j + 1], tail.levels[j + 1].dim, tail.levels[j].dim) =
        tail.creation_block(j, xi);
  return out;
}

Mat DilationData::pi_op(const AlgebraElement& a) const {
  int h = source.sigma.space_dim;
  Mat out = Mat::Zero(total_dim, total_dim);
  out.block(0, 0, h, h) = source.sigma.apply(a);
  out.block(h, h, tail.total_dim, tail.total_dim) = tail.ambient_op(a);
  return out;
}

WanderingSpace wandering_unitary(const DilationData& d, const Mat& msub,
                                 const Tolerance& tol) {
  if (msub.rows() != d.total_dim)
    throw Error(Err::ShapeMismatch, "wandering_unitary: subspace rows mismatch");
  WanderingSpace w;
  // an orthonormal input is kept as given, so identifications made against its
  // columns elsewhere stay valid; anything else is orthonormalized
  w.basis = msub;
  if (msub.cols() > 0 &&
      op_norm(msub.adjoint() * msub -
              Mat::Identity(msub.cols(), msub.cols())) > tol.eps_eq)
    w.basis = range_basis(msub, tol);
  int m = static_cast<int>(w.basis.cols());
  const MultiMatrixAlgebra& alg = d.source.e.right_alg;
  std::vector<Mat> imgs(alg.dim());
  for (int g = 0; g < alg.dim(); ++g) {
    Mat moved = d.pi.images[g] * w.basis;
    double off = op_norm(moved - w.basis * (w.basis.adjoint() * moved));
    if (off > 1e-8 * std::max(1.0, op_norm(moved)))
      throw Error(Err::NotWandering, "wandering_unitary: subspace not invariant");
    imgs[g] = w.basis.adjoint() * moved;
  }
  w.rep = Representation::from_images(alg, imgs, tol);
  w.ind = induce(fock(d.source.e, d.depth, tol), w.rep, tol);

  int de = d.source.e.dim;
  std::vector<Mat> vcache(de);
  for (int i = 0; i < de; ++i) vcache[i] = d.v(Vec::Unit(de, i));
  Mat ih = Mat::Identity(m, m);
  std::vector<Mat> blocks(d.depth + 1);
  blocks[0] = w.basis * w.ind.vacuum();
  for (int j = 1; j <= d.depth; ++j) {
    int dp = w.ind.fock->summands[j - 1].dim;
    Mat raw(d.total_dim, de * dp * m);
    for (int i = 0; i < de; ++i)
      raw.middleCols(i * dp * m, dp * m) =
          vcache[i] * blocks[j - 1] * w.ind.levels[j - 1].qmap;
    blocks[j] = raw * kron(w.ind.fock->steps[j - 1].lift, ih) * w.ind.levels[j].pinv;
  }
  w.w = Mat::Zero(d.total_dim, w.ind.total_dim);
  for (int j = 0; j <= d.depth; ++j)
    w.w.middleCols(w.ind.offsets[j], w.ind.levels[j].dim) = blocks[j];

  // orthogonality of every positive length word against the subspace
  for (int j = 1; j <= d.depth; ++j)
    if (op_norm(w.basis.adjoint() * blocks[j]) > 1e-8)
      throw Error(Err::NotWandering, "wandering_unitary: words return to the subspace");

  int tmax = 0;
  for (int lv = 0; lv <= d.depth + 1; ++lv) {
    int lo = lv == 0 ? 0 : d.offsets[lv];
    int sz = (lv == 0 ? d.source.sigma.space_dim : d.tail.levels[lv - 1].dim);
    if (sz > 0 && w.basis.middleRows(lo, sz).norm() > 1e-12) tmax = lv;
  }
  w.level_defect.resize(d.depth + 1);
  for (int j = 0; j <= d.depth; ++j) {
    Mat gram = blocks[j].adjoint() * blocks[j];
    w.level_defect[j] = op_norm(gram - Mat::Identity(gram.rows(), gram.cols()));
    if (j + tmax <= d.depth + 1)
      w.worst_defect = std::max(w.worst_defect, w.level_defect[j]);
  }
  return w;
}

void compute_q0_and_u(DilationData& d, const Tolerance& tol) {
  int de = d.source.e.dim;
  Mat stacked(de * d.total_dim, d.total_dim);
  for (int i = 0; i < de; ++i)
    stacked.middleRows(i * d.total_dim, d.total_dim) = d.v(Vec::Unit(de, i)).adjoint();
  d.q0 = null_space(stacked, tol);

  const MultiMatrixAlgebra& alg = d.source.e.right_alg;
  std::vector<Mat> qimgs(alg.dim()), simgs(alg.dim());
  for (int g = 0; g < alg.dim(); ++g) {
    qimgs[g] = d.q0.adjoint() * d.pi.images[g] * d.q0;
    simgs[g] = d.dstar_basis.adjoint() * d.source.sigma.images[g] * d.dstar_basis;
  }
  Representation qrep = Representation::from_images(alg, qimgs, tol);
  Representation srep = Representation::from_images(alg, simgs, tol);
  if (qrep.multiplicities != srep.multiplicities)
    throw Error(Err::MultiplicityMismatch,
                "compute_q0_and_u: kernel and adjoint defect disagree; deepen the truncation");
  if (d.q0.cols() == 0) {
    d.u = Mat(0, 0);
    return;
  }
  std::vector<std::pair<Mat, Mat>> pairs;
  for (int g = 0; g < alg.dim(); ++g) pairs.push_back({simgs[g], qimgs[g]});
  Rng rng(117);
  d.u = unitary_intertwiner(solve_intertwiners(pairs, tol), rng);
}

DilationData dilate(const CovariantPair& p, int k, const Tolerance& tol, Rng* shuffle) {
  if (k < 1) throw Error(Err::BadConfig, "dilate: depth must be at least one");
  p.check(tol);
  DilationData d;
  d.source = p;
  d.depth = k;
  int h = p.sigma.space_dim;
  PsdRoot dr =
      psd_root_basis(Mat::Identity(p.loc.dim, p.loc.dim) - p.ttilde.adjoint() * p.ttilde, tol);
  PsdRoot ds = psd_root_basis(Mat::Identity(h, h) - p.ttilde * p.ttilde.adjoint(), tol);
  d.delta = dr.root;
  d.delta_star = ds.root;
  d.dbasis = dr.basis;
  d.dstar_basis = ds.basis;
  if (shuffle) {
    if (d.dbasis.cols() > 0)
      d.dbasis = d.dbasis * shuffle->unitary(static_cast<int>(d.dbasis.cols()));
    if (d.dstar_basis.cols() > 0)
      d.dstar_basis = d.dstar_basis * shuffle->unitary(static_cast<int>(d.dstar_basis.cols()));
  }
  const MultiMatrixAlgebra& alg = p.e.right_alg;
  std::vector<Mat> rimgs(alg.dim());
  for (int g = 0; g < alg.dim(); ++g)
    rimgs[g] = d.dbasis.adjoint() * p.loc.left.images[g] * d.dbasis;
  d.rho = Representation::from_images(alg, rimgs, tol);
  d.tail = induce(fock(p.e, k, tol), d.rho, tol);
  d.vac0 = d.tail.vacuum();
  d.offsets.resize(k + 2);
  d.offsets[0] = 0;
  for (int j = 0; j <= k; ++j) d.offsets[j + 1] = h + d.tail.offsets[j];
  d.total_dim = h + d.tail.total_dim;
  d.pi = p.sigma;
  for (int j = 0; j <= k; ++j) d.pi = direct_sum(d.pi, d.tail.levels[j].left);
  compute_q0_and_u(d, tol);
  d.wd = wandering_unitary(d, d.embed_level(0), tol);
  d.wq0 = wandering_unitary(d, d.q0, tol);
  Mat rb = range_basis(d.wq0.w, tol);
  d.qinf = rb * rb.adjoint();
  return d;
}

DilationReport verify_dilation(const DilationData& d, const Tolerance& tol) {
  DilationReport r;
  int de = d.source.e.dim;
  const Correspondence& e = d.source.e;
  const MultiMatrixAlgebra& alg = e.right_alg;
  std::vector<Mat> vcache(de);
  for (int i = 0; i < de; ++i) vcache[i] = d.v(Vec::Unit(de, i));
  int interior = d.total_dim - d.tail.levels[d.depth].dim;
  for (int i = 0; i < de; ++i)
    for (int j = 0; j < de; ++j) {
      Mat diff = vcache[i].adjoint() * vcache[j] -
                 d.pi_op(e.inner(Vec::Unit(de, i), Vec::Unit(de, j)));
      r.isometry_defect = std::max(r.isometry_defect, op_norm(diff.leftCols(interior)));
    }
  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    auto a = AlgebraElement::from_coords(alg, rng.gauss_vec(alg.dim()));
    auto b = AlgebraElement::from_coords(alg, rng.gauss_vec(alg.dim()));
    for (int i = 0; i < de; ++i) {
      Vec moved = e.right_apply(b) * e.left_apply(a) * Vec::Unit(de, i);
      Mat diff = d.v(moved) - d.pi_op(a) * vcache[i] * d.pi_op(b);
      r.covariance_defect = std::max(r.covariance_defect, op_norm(diff));
    }
  }
  Mat eh = d.embed_h();
  for (int i = 0; i < de; ++i)
    r.compression_defect =
        std::max(r.compression_defect,
                 op_norm(eh.adjoint() * vcache[i].adjoint() * eh -
                         d.source.op(Vec::Unit(de, i)).adjoint()));
  for (int g = 0; g < alg.dim(); ++g)
    r.compression_defect =
        std::max(r.compression_defect,
                 op_norm(eh.adjoint() * d.pi.images[g] * eh - d.source.sigma.images[g]));
  for (int i = 0; i < de; ++i)
    r.q0_defect = std::max(r.q0_defect, op_norm(vcache[i].adjoint() * d.q0));
  for (int g = 0; g < alg.dim(); ++g) {
    Mat moved = d.pi.images[g] * d.q0;
    r.q0_invariance =
        std::max(r.q0_invariance, op_norm(moved - d.q0 * (d.q0.adjoint() * moved)));
  }
  if (d.q0.cols() > 0) {
    Mat ui = d.u.adjoint() * d.u - Mat::Identity(d.u.cols(), d.u.cols());
    Mat uo = d.u * d.u.adjoint() - Mat::Identity(d.u.rows(), d.u.rows());
    r.u_defect = std::max(op_norm(ui), op_norm(uo));
    for (int g = 0; g < alg.dim(); ++g) {
      Mat lhs = d.dstar_basis.adjoint() * d.source.sigma.images[g] * d.dstar_basis * d.u;
      Mat rhs = d.u * (d.q0.adjoint() * d.pi.images[g] * d.q0);
      r.u_defect = std::max(r.u_defect, op_norm(lhs - rhs));
    }
  }
  for (int j = 1; j <= d.depth; ++j) {
    Mat wj = d.wd.w.middleCols(d.wd.ind.offsets[j], d.wd.ind.levels[j].dim);
    r.d_wandering = std::max(r.d_wandering, op_norm(d.wd.basis.adjoint() * wj));
  }
  Mat reach = eh;
  Mat frontier = eh;
  for (int len = 1; len <= d.depth + 1; ++len) {
    Mat next(d.total_dim, de * frontier.cols());
    for (int i = 0; i < de; ++i)
      next.middleCols(i * frontier.cols(), frontier.cols()) = vcache[i] * frontier;
    frontier = range_basis(next, tol);
    Mat merged(d.total_dim, reach.cols() + frontier.cols());
    merged << reach, frontier;
    reach = range_basis(merged, tol);
  }
  r.minimality_gap = d.total_dim - static_cast<int>(reach.cols());
  return r;
}

EquivalenceReport dilation_equivalence(const DilationData& a, const DilationData& b,
                                       const Tolerance&) {
  if (a.total_dim != b.total_dim || a.source.sigma.space_dim != b.source.sigma.space_dim ||
      a.source.e.dim != b.source.e.dim)
    throw Error(Err::ShapeMismatch, "dilation_equivalence: incompatible dilations");
  int de = a.source.e.dim;
  std::vector<Mat> va(de), vb(de);
  for (int i = 0; i < de; ++i) {
    va[i] = a.v(Vec::Unit(de, i));
    vb[i] = b.v(Vec::Unit(de, i));
  }
  Mat fa = a.embed_h(), fb = b.embed_h();
  Mat sa = fa, sb = fb;
  for (int len = 1; len <= a.depth + 1; ++len) {
    Mat na(a.total_dim, de * fa.cols()), nb(b.total_dim, de * fb.cols());
    for (int i = 0; i < de; ++i) {
      na.middleCols(i * fa.cols(), fa.cols()) = va[i] * fa;
      nb.middleCols(i * fb.cols(), fb.cols()) = vb[i] * fb;
    }
    fa = na;
    fb = nb;
    Mat ma(a.total_dim, sa.cols() + fa.cols()), mb(b.total_dim, sb.cols() + fb.cols());
    ma << sa, fa;
    mb << sb, fb;
    sa = ma;
    sb = mb;
  }
  EquivalenceReport r;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(sa);
  r.g = sb * cod.pseudoInverse();
  r.unitary_defect =
      std::max(op_norm(r.g.adjoint() * r.g - Mat::Identity(a.total_dim, a.total_dim)),
               op_norm(r.g * r.g.adjoint() - Mat::Identity(b.total_dim, b.total_dim)));
  r.anchor_defect = op_norm(r.g * a.embed_h() - b.embed_h());
  for (int i = 0; i < de; ++i)
    r.v_defect = std::max(r.v_defect, op_norm(r.g * va[i] - vb[i] * r.g));
  for (int g = 0; g < a.source.e.right_alg.dim(); ++g)
    r.pi_defect = std::max(r.pi_defect, op_norm(r.g * a.pi.images[g] - b.pi.images[g] * r.g));
  return r;
}

const char* pair_class_name(PairClass c) {
  switch (c) {
    case PairClass::CDotZero: return "pure";
    case PairClass::NonCoisometric: return "noncoisometric";
    case PairClass::Neither: return "neither";
    case PairClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Classification classify(const CovariantPair& p, int k, const Tolerance& tol) {
  if (k < 1) throw Error(Err::BadConfig, "classify: depth must be at least one");
  Classification c;
  auto f = fock(p.e, k, tol);
  auto ind = induce(f, p.sigma, tol);
  for (const Mat& t : tilde_chain(p, ind)) c.decay.push_back(op_norm(t));
  c.base_norm = op_norm(p.ttilde);
  double last = c.decay[k];
  bool monotone = k >= 2 && c.decay[k] <= c.decay[k - 1] + 1e-12 &&
                  c.decay[k - 1] <= c.decay[k - 2] + 1e-12;
  c.decay_certified = c.base_norm <= 1 - 1e-6 || (last < 1e-6 && monotone);
  DilationData dd = dilate(p, k, tol);
  Mat joint(dd.total_dim, dd.wd.w.cols() + dd.wq0.w.cols());
  joint << dd.wd.w, dd.wq0.w;
  c.span_rank = numerical_rank(joint, tol);
  c.span_total = dd.total_dim;
  c.span_full = c.span_rank == c.span_total;
  if (c.decay_certified) {
    c.label = PairClass::CDotZero;
  } else if (c.span_full) {
    c.label = PairClass::NonCoisometric;
  } else if (last >= 1e-2 && k >= 1 && c.decay[k - 1] > 0 &&
             last / c.decay[k - 1] >= 0.99) {
    c.label = PairClass::Neither;
  } else {
    c.label = PairClass::Inconclusive;
  }
  return c;
}

}  // namespace corrlab
