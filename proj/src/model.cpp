#include "corrlab/model.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace corrlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lift of a fiber map intertwining two coefficient actions to one level of
// the induced spaces over them: identity on the letters, the map on the
// fiber. Both spaces must share the truncated level structure.
Mat level_lift(const InducedSpace& target, const InducedSpace& source, int j,
               const Mat& fiber_map) {
  int md = source.fock->summands[j].dim;
  return target.levels[j].qmap * kron(Mat::Identity(md, md), fiber_map) *
         source.levels[j].pinv;
}

Mat full_lift(const InducedSpace& target, const InducedSpace& source,
              const Mat& fiber_map) {
  Mat out = Mat::Zero(target.total_dim, source.total_dim);
  for (int j = 0; j < static_cast<int>(source.levels.size()); ++j)
    out.block(target.offsets[j], source.offsets[j], target.levels[j].dim,
              source.levels[j].dim) = level_lift(target, source, j, fiber_map);
  return out;
}

// Zeroes every level block of a matrix between two induced spaces that lies
// outside the stated degree band or beyond the stated level caps; what is
// left is the region the truncated construction certifies.
void mask_region(Mat& m, const InducedSpace& target, const InducedSpace& source,
                 int dmin, int dmax, int out_max, int in_max) {
  for (int out = 0; out < static_cast<int>(target.levels.size()); ++out)
    for (int in = 0; in < static_cast<int>(source.levels.size()); ++in)
      if (out - in < dmin || out - in > dmax || out > out_max || in > in_max)
        m.block(target.offsets[out], source.offsets[in], target.levels[out].dim,
                source.levels[in].dim).setZero();
}

// Highest degree at which the coefficient family carries mass.
int top_degree(const CharacteristicFunction& th) {
  int deff = 0;
  for (int n = 0; n <= th.exact_degree && n < static_cast<int>(th.symbol.size()); ++n)
    if (op_norm(th.symbol[n]) > 1e-8) deff = n;
  return deff;
}

// Isometry defect of the columns whose images stay below the truncation.
// Every further column is a shifted copy of these, so they decide whether
// the whole map is isometric.
double certified_inner_defect(const CharacteristicFunction& th) {
  int n1 = th.ind1.total_dim;
  if (n1 == 0) return 0.0;
  int jmax = th.depth - top_degree(th);
  int cols = th.ind1.offsets[jmax] + th.ind1.levels[jmax].dim;
  return op_norm(Mat(th.theta.adjoint() * th.theta - Mat::Identity(n1, n1))
                     .topLeftCorner(cols, cols));
}

}  // namespace

Mat CharacteristicFunction::rebuild() const {
  Mat out = Mat::Zero(ind2.total_dim, ind1.total_dim);
  int de = e.dim;
  for (int n = 0; n < static_cast<int>(symbol.size()) && n <= depth; ++n) {
    // slide the degree along the levels through the creation relations: the
    // images of one level under all creations span the next, so each higher
    // block is the unique solution of the commutation identity
    Mat b = symbol[n] * ind1.vacuum();
    for (int j = 0; j + n <= depth; ++j) {
      out.block(ind2.offsets[n + j], ind1.offsets[j], ind2.levels[n + j].dim,
                ind1.levels[j].dim) = b;
      if (j + n + 1 > depth || j + 1 > depth) break;
      int c1 = ind1.levels[j].dim;
      if (c1 == 0) break;
      Mat q(ind1.levels[j + 1].dim, de * c1);
      Mat r(ind2.levels[n + j + 1].dim, de * c1);
      for (int i = 0; i < de; ++i) {
        Vec xi = Vec::Unit(de, i);
        q.middleCols(i * c1, c1) = ind1.creation_block(j, xi);
        r.middleCols(i * c1, c1) = ind2.creation_block(n + j, xi) * b;
      }
      b = r * q.completeOrthogonalDecomposition().pseudoInverse();
    }
  }
  return out;
}

CharFnReport check_charfn(const CharacteristicFunction& th, const Tolerance& tol) {
  CharFnReport r;
  int n1 = th.ind1.total_dim;
  if (n1 == 0) {
    r.contractive_margin = 1;
    r.inner = true;
    return r;
  }
  const Mat& t = th.theta;
  int k = th.depth;
  r.norm = op_norm(t);
  const MultiMatrixAlgebra& alg = th.e.right_alg;
  for (int g = 0; g < alg.dim(); ++g) {
    AlgebraElement a = AlgebraElement::generator(alg, g);
    Mat d = th.ind2.ambient_op(a) * t - t * th.ind1.ambient_op(a);
    mask_region(d, th.ind2, th.ind1, -k, k, k - 1, k - 1);
    r.covariance_defect = std::max(r.covariance_defect, op_norm(d));
  }
  for (int i = 0; i < th.e.dim; ++i) {
    Vec xi = Vec::Unit(th.e.dim, i);
    Mat d = th.ind2.creation_op(xi) * t - t * th.ind1.creation_op(xi);
    mask_region(d, th.ind2, th.ind1, -k, k, k - 1, k - 2);
    r.analyticity_defect = std::max(r.analyticity_defect, op_norm(d));
  }
  r.contractive_margin = 1 - (th.symbol.empty() ? 0.0 : op_norm(th.symbol[0]));

  Mat diff = th.rebuild() - t;
  mask_region(diff, th.ind2, th.ind1, 0, th.exact_degree, k - 1, k - 1);
  r.symbol_defect = op_norm(diff);

  r.inner_defect = certified_inner_defect(th);
  r.inner = r.inner_defect <= 1e-8;
  if (r.inner) {
    // an isometric map has no defect directions, so closure holds vacuously
    r.closure_gap = 0;
  } else {
    Mat gram = Mat::Identity(n1, n1) - t.adjoint() * t;
    PsdRoot d = psd_root_basis(gram, tol);
    int l0 = th.ind1.levels[0].dim;
    r.closure_gap = span_distance(d.root, d.root.rightCols(n1 - l0), tol);
  }
  return r;
}

bool CharFnReport::pass(const Tolerance& tol) const {
  return norm <= 1 + 1e-8 && covariance_defect <= 1e-8 &&
         analyticity_defect <= 1e-8 && contractive_margin > 1e-6 &&
         closure_gap <= 1e-6 && symbol_defect <= 100 * tol.eps_eq;
}

CharacteristicFunction characteristic_of(const CovariantPair& p, int k,
                                         const Tolerance& tol) {
  Classification cls = classify(p, k, tol);
  if (cls.label != PairClass::CDotZero && cls.label != PairClass::NonCoisometric)
    throw Error(Err::NotCNC, std::string("characteristic_of: pair classified ") +
                                 pair_class_name(cls.label));
  DilationData d = dilate(p, k, tol);

  CharacteristicFunction th;
  th.e = p.e;
  th.depth = k;
  th.tau1 = d.wd.rep;
  th.ind1 = d.wd.ind;
  const MultiMatrixAlgebra& alg = p.e.right_alg;
  std::vector<Mat> simgs(alg.dim());
  for (int g = 0; g < alg.dim(); ++g)
    simgs[g] = d.dstar_basis.adjoint() * p.sigma.images[g] * d.dstar_basis;
  th.tau2 = Representation::from_images(alg, simgs, tol);
  th.ind2 = induce(fock(p.e, k, tol), th.tau2, tol);

  // carry the kernel fiber onto the adjoint defect fiber level by level
  Mat ulift = Mat::Zero(th.ind2.total_dim, d.wq0.ind.total_dim);
  for (int j = 0; j <= k; ++j)
    ulift.block(th.ind2.offsets[j], d.wq0.ind.offsets[j], th.ind2.levels[j].dim,
                d.wq0.ind.levels[j].dim) = level_lift(th.ind2, d.wq0.ind, j, d.u);
  th.theta = ulift * d.wq0.w.adjoint() * d.qinf * d.wd.w;

  int l0 = th.ind1.levels[0].dim;
  Mat scol = th.theta.leftCols(l0) * th.ind1.vacuum().adjoint();
  th.symbol.resize(k + 1);
  for (int n = 0; n <= k; ++n)
    th.symbol[n] = scol.middleRows(th.ind2.offsets[n], th.ind2.levels[n].dim);
  th.exact_degree = k - 1;
  return th;
}

Mat ModelSpaces::v_op(const Vec& xi) const {
  int n2 = source.ind2.total_dim;
  int r = static_cast<int>(defect.basis.cols());
  Mat out = Mat::Zero(n2 + r, n2 + r);
  out.topLeftCorner(n2, n2) = source.ind2.creation_op(xi);
  if (r > 0) {
    Vec inv = defect.scale.cwiseInverse().cast<cplx>();
    out.bottomRightCorner(r, r) = defect.basis.adjoint() * defect.root *
                                  source.ind1.creation_op(xi) * defect.basis *
                                  inv.asDiagonal();
  }
  return out;
}

Mat ModelSpaces::rho_op(const AlgebraElement& a) const {
  int n2 = source.ind2.total_dim;
  int r = static_cast<int>(defect.basis.cols());
  Mat out = Mat::Zero(n2 + r, n2 + r);
  out.topLeftCorner(n2, n2) = source.ind2.ambient_op(a);
  if (r > 0)
    out.bottomRightCorner(r, r) =
        defect.basis.adjoint() * source.ind1.ambient_op(a) * defect.basis;
  return out;
}

ModelSpaces model_of(const CharacteristicFunction& th, const Tolerance& tol) {
  ModelSpaces ms;
  ms.source = th;
  int n1 = th.ind1.total_dim;
  int n2 = th.ind2.total_dim;
  if (n1 == 0) {
    ms.defect = PsdRoot{Mat(0, 0), Mat(0, 0), Eigen::VectorXd(0)};
    ms.total_dim = n2;
    ms.graph = Mat(n2, 0);
  } else if (certified_inner_defect(th) <= 1e-8) {
    // isometric case: no defect part survives, the ambient space is the bare
    // induced space, and the graph subspace is spanned by the degree
    // consistent extension of the columns, which keeps the top level columns
    // aligned with the coefficient family instead of the raw truncation
    ms.defect = PsdRoot{Mat::Zero(n1, n1), Mat(n1, 0), Eigen::VectorXd(0)};
    ms.total_dim = n2;
    ms.graph = th.rebuild();
  } else {
    ms.defect = psd_root_basis(
        Mat::Identity(n1, n1) - th.theta.adjoint() * th.theta, tol);
    int r = static_cast<int>(ms.defect.basis.cols());
    ms.total_dim = n2 + r;

    // the defect shift must respect the kernel of the defect root, otherwise
    // no operator on the range closure is defined by the shift relation; the
    // test covers the kernel directions whose entries are complete at this
    // truncation, the levels past the window only carry truncation noise
    if (r > 0) {
      int jmax = th.depth - top_degree(th);
      int cert = th.ind1.offsets[jmax] + th.ind1.levels[jmax].dim;
      Mat stack(r + (n1 - cert), n1);
      stack.topRows(r) = ms.defect.basis.adjoint();
      stack.bottomRows(n1 - cert) =
          Mat::Identity(n1, n1).bottomRows(n1 - cert);
      Mat kb = null_space(stack, tol);
      for (int i = 0; i < th.e.dim; ++i)
        ms.s_respect = std::max(
            ms.s_respect,
            op_norm(ms.defect.root *
                    th.ind1.creation_op(Vec::Unit(th.e.dim, i)) * kb));
      if (ms.s_respect > 1e-6)
        throw Error(Err::IllDefinedS, "model_of: defect shift residual " +
                                          std::to_string(ms.s_respect));
    }

    ms.graph = Mat(ms.total_dim, n1);
    ms.graph.topRows(n2) = th.theta;
    ms.graph.bottomRows(r) =
        ms.defect.scale.asDiagonal() * ms.defect.basis.adjoint();
  }
  ms.hbasis = null_space(ms.graph.adjoint(), tol);

  // truncation noise rides above exact arithmetic here, so representation
  // validation runs at a relaxed equality gate
  Tolerance rtol = tol;
  rtol.eps_eq = std::max(tol.eps_eq, 1e-7);
  const MultiMatrixAlgebra& alg = th.e.right_alg;
  std::vector<Mat> imgs(alg.dim()), comp(alg.dim());
  for (int g = 0; g < alg.dim(); ++g) {
    imgs[g] = ms.rho_op(AlgebraElement::generator(alg, g));
    comp[g] = ms.hbasis.adjoint() * imgs[g] * ms.hbasis;
  }
  ms.rho = Representation::from_images(alg, imgs, rtol);
  Representation sig = Representation::from_images(alg, comp, rtol);

  int h = static_cast<int>(ms.hbasis.cols());
  Mat m(h, th.e.dim * h);
  for (int i = 0; i < th.e.dim; ++i)
    m.middleCols(i * h, h) =
        ms.hbasis.adjoint() * ms.v_op(Vec::Unit(th.e.dim, i)) * ms.hbasis;
  Localization loc = localize(th.e, sig, tol);
  Mat ttilde = m * loc.pinv;
  try {
    ms.pair = covariant_pair(th.e, sig, ttilde, rtol);
  } catch (const Error&) {
    // an approximate input leaves covariance residue of its own size in the
    // compression; the pair is still reported and carries its defect
    Tolerance wide = rtol;
    wide.eps_eq = 1.0;
    ms.pair = covariant_pair(th.e, sig, ttilde, wide);
  }
  return ms;
}

ModelRoundTrip roundtrip_model(const CovariantPair& p, int k, const Tolerance& tol) {
  ModelRoundTrip r;
  CharacteristicFunction th = characteristic_of(p, k, tol);
  ModelSpaces ms = model_of(th, tol);
  r.dim_source = p.sigma.space_dim;
  r.dim_model = ms.pair.sigma.space_dim;
  r.unitary_defect = r.sigma_defect = r.t_defect = kInf;
  if (r.dim_model < r.dim_source) return r;

  const MultiMatrixAlgebra& alg = p.e.right_alg;
  std::vector<std::pair<Mat, Mat>> pairs;
  for (int g = 0; g < alg.dim(); ++g)
    pairs.push_back({ms.pair.sigma.images[g], p.sigma.images[g]});
  for (int i = 0; i < p.e.dim; ++i) {
    Mat tm = ms.pair.op(Vec::Unit(p.e.dim, i));
    Mat ts = p.op(Vec::Unit(p.e.dim, i));
    pairs.push_back({tm, ts});
    pairs.push_back({tm.adjoint(), ts.adjoint()});
  }
  // the model may carry extra directions born of the truncation, so the
  // comparison runs through an isometry of the source into the model; when
  // no exact intertwiner exists the rank cut widens and the best remaining
  // candidate is reported with its honest defects
  Rng rng(271);
  int h = r.dim_source;
  for (double cut : {std::max(tol.eps_rank, 1e-6), 1e-2, 0.2}) {
    Tolerance rtol = tol;
    rtol.eps_rank = cut;
    std::vector<Mat> sols = solve_intertwiners(pairs, rtol);
    if (sols.empty()) continue;
    Mat g;
    try {
      g = unitary_intertwiner(sols, rng);
    } catch (const Error&) {
      continue;
    }
    double iso = op_norm(g.adjoint() * g - Mat::Identity(h, h));
    if (r.dim_model == r.dim_source)
      iso = std::max(iso, op_norm(g * g.adjoint() - Mat::Identity(h, h)));
    r.g = g;
    r.unitary_defect = iso;
    r.sigma_defect = 0;
    for (int gi = 0; gi < alg.dim(); ++gi)
      r.sigma_defect =
          std::max(r.sigma_defect, op_norm(ms.pair.sigma.images[gi] * g -
                                           g * p.sigma.images[gi]));
    r.t_defect = 0;
    for (int i = 0; i < p.e.dim; ++i)
      r.t_defect =
          std::max(r.t_defect, op_norm(ms.pair.op(Vec::Unit(p.e.dim, i)) * g -
                                       g * p.op(Vec::Unit(p.e.dim, i))));
    r.found = true;
    break;
  }
  return r;
}

CharRoundTrip roundtrip_char(const CharacteristicFunction& th, const Tolerance& tol) {
  CharRoundTrip r;
  r.w1_unitary = r.w2_unitary = r.intertwine_defect = r.coincidence_defect = kInf;
  int e1 = th.tau1.space_dim, e2 = th.tau2.space_dim;
  if (e1 == 0) {
    // an empty source fiber leaves nothing to compare
    r.w1 = Mat(0, 0);
    r.w2 = Mat(0, 0);
    r.w1_unitary = r.w2_unitary = 0;
    r.intertwine_defect = r.coincidence_defect = 0;
    r.found = true;
    return r;
  }
  ModelSpaces ms = model_of(th, tol);
  CharacteristicFunction th2 = characteristic_of(ms.pair, th.depth, tol);
  int f1 = th2.tau1.space_dim, f2 = th2.tau2.space_dim;
  if (f1 < e1 || f2 < e2) return r;
  r.degrees = std::min(th.exact_degree, th2.exact_degree);

  const MultiMatrixAlgebra& alg = th.e.right_alg;
  Rng rng(353);

  auto measure = [&](const Mat& w1, const Mat& w2) {
    double wu1 = op_norm(w1.adjoint() * w1 - Mat::Identity(e1, e1));
    if (f1 == e1)
      wu1 = std::max(wu1, op_norm(w1 * w1.adjoint() - Mat::Identity(f1, f1)));
    double wu2 = e2 ? op_norm(w2.adjoint() * w2 - Mat::Identity(e2, e2)) : 0.0;
    if (e2 > 0 && f2 == e2)
      wu2 = std::max(wu2, op_norm(w2 * w2.adjoint() - Mat::Identity(f2, f2)));
    double inter = 0, coin = 0;
    for (int g = 0; g < alg.dim(); ++g) {
      inter = std::max(inter,
                       op_norm(th2.tau1.images[g] * w1 - w1 * th.tau1.images[g]));
      inter = std::max(inter,
                       op_norm(th2.tau2.images[g] * w2 - w2 * th.tau2.images[g]));
    }
    for (int n = 0; n <= r.degrees; ++n)
      coin = std::max(coin,
                      op_norm(th2.symbol[n] * w1 -
                              level_lift(th2.ind2, th.ind2, n, w2) * th.symbol[n]));
    return std::array<double, 4>{wu1, wu2, inter, coin};
  };

  double best = kInf;
  for (double cut : {std::max(tol.eps_rank, 1e-6), 1e-2, 0.2}) {
    Tolerance rtol = tol;
    rtol.eps_rank = cut;
    std::vector<std::pair<Mat, Mat>> p2;
    for (int g = 0; g < alg.dim(); ++g)
      p2.push_back({th2.tau2.images[g], th.tau2.images[g]});
    std::vector<Mat> s2 = solve_intertwiners(p2, rtol);
    if (e2 > 0 && s2.empty()) continue;
    std::vector<std::pair<Mat, Mat>> p1;
    for (int g = 0; g < alg.dim(); ++g)
      p1.push_back({th2.tau1.images[g], th.tau1.images[g]});
    std::vector<Mat> s1 = solve_intertwiners(p1, rtol);
    if (s1.empty()) continue;

    // coincidence is linear in the joint coefficients over the two
    // intertwiner spaces, so the admissible pairs form one stacked kernel
    int rowcount = 0;
    for (int n = 0; n <= r.degrees; ++n)
      rowcount += static_cast<int>(th2.symbol[n].rows()) * e1;
    Mat a = Mat::Zero(rowcount, static_cast<int>(s1.size() + s2.size()));
    for (std::size_t i = 0; i < s1.size(); ++i) {
      int at = 0;
      for (int n = 0; n <= r.degrees; ++n) {
        Mat blk = th2.symbol[n] * s1[i];
        a.col(static_cast<int>(i)).segment(at, blk.size()) = vec(blk);
        at += static_cast<int>(blk.size());
      }
    }
    for (std::size_t j = 0; j < s2.size(); ++j) {
      int at = 0;
      for (int n = 0; n <= r.degrees; ++n) {
        Mat blk = level_lift(th2.ind2, th.ind2, n, s2[j]) * th.symbol[n];
        a.col(static_cast<int>(s1.size() + j)).segment(at, blk.size()) = -vec(blk);
        at += static_cast<int>(blk.size());
      }
    }
    Mat ns = null_space(a, rtol);
    if (ns.cols() == 0) continue;

    for (int attempt = 0; attempt < 8; ++attempt) {
      Vec z = ns * rng.gauss_vec(static_cast<int>(ns.cols()));
      Mat w1 = Mat::Zero(f1, e1);
      Mat w2 = Mat::Zero(f2, e2);
      for (std::size_t i = 0; i < s1.size(); ++i) w1 += z(i) * s1[i];
      for (std::size_t j = 0; j < s2.size(); ++j) w2 += z(s1.size() + j) * s2[j];
      double s = op_norm(w1);
      if (s < 1e-10) continue;
      // a common rescaling keeps the coincidence, and the polar step moves
      // each factor by the same phase, so the relation survives the cleanup
      w1 /= s;
      w2 /= s;
      for (Mat* w : {&w1, &w2}) {
        if (w->cols() == 0) continue;
        Eigen::JacobiSVD<Mat> svd(*w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues().size() &&
            svd.singularValues()(svd.singularValues().size() - 1) > 1e-6)
          *w = svd.matrixU() * svd.matrixV().adjoint();
      }
      auto d = measure(w1, w2);
      double worst = std::max({d[0], d[1], d[2], d[3]});
      if (worst < best) {
        best = worst;
        r.w1 = w1;
        r.w2 = w2;
        r.w1_unitary = d[0];
        r.w2_unitary = d[1];
        r.intertwine_defect = d[2];
        r.coincidence_defect = d[3];
        r.found = true;
      }
    }
    if (r.found) break;
  }
  return r;
}

CommutantEmbedding commutant_embedding(const CharacteristicFunction& th,
                                       const Tolerance& tol) {
  const MultiMatrixAlgebra& alg = th.e.right_alg;
  Representation tau = direct_sum(th.tau1, th.tau2);
  CommutantEmbedding out;
  Representation taph = tau;
  if (!tau.faithful()) {
    out.augmented = true;
    std::vector<int> pad(alg.num_blocks(), 0);
    for (int i = 0; i < alg.num_blocks(); ++i)
      if (tau.multiplicities[i] == 0) pad[i] = 1;
    taph = direct_sum(tau, Representation::canonical(alg, pad));
  }
  int k = th.depth;
  CommutantFrame fr = commutant_frame(th.e, taph, k, tol);

  int e1 = th.tau1.space_dim, e2 = th.tau2.space_dim, et = taph.space_dim;
  Mat u1 = Mat::Zero(et, e1);
  u1.topRows(e1) = Mat::Identity(e1, e1);
  Mat u2 = Mat::Zero(et, e2);
  u2.middleRows(e1, e2) = Mat::Identity(e2, e2);
  Mat i1 = full_lift(fr.prim, th.ind1, u1);
  Mat i2 = full_lift(fr.prim, th.ind2, u2);
  Mat x = i2 * th.theta * i1.adjoint();
  Mat xh = fr.ub.adjoint() * x * fr.ub;

  // monomial word basis over the conjugate letters and base generators
  const MultiMatrixAlgebra& nc = fr.df.corr.right_alg;
  int rdim = fr.df.corr.dim;
  std::vector<std::vector<int>> words{{}};
  std::vector<Mat> wordop{Mat::Identity(fr.dset.total_dim, fr.dset.total_dim)};
  std::vector<std::size_t> degree_begin{0, 1};
  for (int len = 1; len <= k; ++len) {
    for (std::size_t w = degree_begin[len - 1]; w < degree_begin[len]; ++w)
      for (int i = 0; i < rdim; ++i) {
        std::vector<int> ext = words[w];
        ext.insert(ext.begin(), i);
        words.push_back(ext);
        wordop.push_back(fr.dset.creation_op(Vec::Unit(rdim, i)) * wordop[w]);
      }
    degree_begin.push_back(words.size());
    if (words.size() * static_cast<std::size_t>(nc.dim()) > 20000)
      throw Error(Err::BadConfig,
                  "commutant_embedding: truncated word basis too large");
  }
  std::vector<Mat> genop(nc.dim());
  for (int g = 0; g < nc.dim(); ++g)
    genop[g] = fr.dset.ambient_op(AlgebraElement::generator(nc, g));

  // a word of length d populates only the d-th block subdiagonal, so the
  // grading splits the least squares fit into independent per degree systems
  int nd = nc.dim();
  Vec coeff = Vec::Zero(static_cast<int>(words.size()) * nd);
  Mat fit = Mat::Zero(fr.dset.total_dim, fr.dset.total_dim);
  for (int d = 0; d <= k; ++d) {
    int rows = 0;
    for (int j = 0; j + d <= k; ++j)
      rows += fr.dset.levels[j + d].dim * fr.dset.levels[j].dim;
    if (rows == 0) continue;
    auto diag_part = [&](const Mat& m) {
      Vec v(rows);
      int at = 0;
      for (int j = 0; j + d <= k; ++j) {
        int nr = fr.dset.levels[j + d].dim, ncol = fr.dset.levels[j].dim;
        v.segment(at, nr * ncol) = vec(
            Mat(m.block(fr.dset.offsets[j + d], fr.dset.offsets[j], nr, ncol)));
        at += nr * ncol;
      }
      return v;
    };
    int ncols = static_cast<int>(degree_begin[d + 1] - degree_begin[d]) * nd;
    Mat a(rows, ncols);
    for (std::size_t w = degree_begin[d]; w < degree_begin[d + 1]; ++w)
      for (int g = 0; g < nd; ++g)
        a.col(static_cast<int>(w - degree_begin[d]) * nd + g) =
            diag_part(wordop[w] * genop[g]);
    Vec cd = Eigen::CompleteOrthogonalDecomposition<Mat>(a).solve(diag_part(xh));
    coeff.segment(static_cast<int>(degree_begin[d]) * nd, ncols) = cd;
    Vec fd = a * cd;
    int at = 0;
    for (int j = 0; j + d <= k; ++j) {
      int nr = fr.dset.levels[j + d].dim, ncol = fr.dset.levels[j].dim;
      if (nr * ncol == 0) continue;
      fit.block(fr.dset.offsets[j + d], fr.dset.offsets[j], nr, ncol) =
          unvec(Vec(fd.segment(at, nr * ncol)), nr);
      at += nr * ncol;
    }
  }
  out.residual = op_norm(Mat(fit - xh));
  if (out.residual > 1e-6 * std::max(1.0, op_norm(xh)))
    throw Error(Err::ExpressionResidual, "commutant_embedding: residual " +
                                             std::to_string(out.residual));

  std::map<Monomial, cplx> cf;
  int maxdeg = 0;
  for (std::size_t w = 0; w < words.size(); ++w)
    for (int g = 0; g < nc.dim(); ++g) {
      cplx c = coeff(static_cast<int>(w) * nc.dim() + g);
      if (std::abs(c) > 1e-12) {
        cf[Monomial{words[w], g}] = c;
        maxdeg = std::max(maxdeg, static_cast<int>(words[w].size()));
      }
    }
  out.hat = HardyElement{fr.fd, cf, realize_monomials(fr.fd, cf)};

  CharFnReport cr = check_charfn(th, tol);
  if (cr.inner) {
    // for an isometric matrix the adjoint square of the conjugate must
    // realize the source fiber projection as a degree zero element
    Mat q1m = u1 * u1.adjoint();
    Representation iota = fr.df.right_comm.rep;
    Mat b(et * et, nc.dim());
    for (int g = 0; g < nc.dim(); ++g) b.col(g) = vec(iota.images[g]);
    Vec cq = b.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(vec(q1m));
    Mat pop = fr.dset.ambient_op(AlgebraElement::from_coords(nc, cq));
    int jcut = std::max(0, k - maxdeg);
    int sub = fr.dset.offsets[jcut] + fr.dset.levels[jcut].dim;
    out.inner_projection_defect =
        op_norm(Mat(fit.adjoint() * fit - pop).topLeftCorner(sub, sub));
  }
  return out;
}

}  // namespace corrlab
