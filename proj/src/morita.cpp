#include "corrlab/morita.hpp"

#include <algorithm>
#include <numeric>

namespace corrlab {

namespace {

// acceptance gate for a numerically constructed isomorphism witness
constexpr double kIsoGate = 1e-6;

AlgebraElement relabel_element(const AlgebraElement& x, const std::vector<int>& perm,
                               const MultiMatrixAlgebra& target) {
  AlgebraElement out = AlgebraElement::zero(target);
  for (int b = 0; b < x.algebra.num_blocks(); ++b) out.block[perm[b]] = x.block[b];
  return out;
}

// Same module coordinates with the algebra blocks renamed: block i of the
// left algebra becomes block lp[i], and likewise on the right. The renaming
// is an algebra isomorphism, so the result is the same correspondence
// presented over the relabeled algebras.
Correspondence relabel(const Correspondence& c, const std::vector<int>& lp,
                       const std::vector<int>& rp) {
  MultiMatrixAlgebra la, ra;
  la.blocks.assign(c.left_alg.num_blocks(), 0);
  for (int i = 0; i < c.left_alg.num_blocks(); ++i)
    la.blocks[lp[i]] = c.left_alg.blocks[i];
  ra.blocks.assign(c.right_alg.num_blocks(), 0);
  for (int j = 0; j < c.right_alg.num_blocks(); ++j)
    ra.blocks[rp[j]] = c.right_alg.blocks[j];

  Correspondence out;
  out.left_alg = la;
  out.right_alg = ra;
  out.dim = c.dim;
  out.left_action.resize(la.dim());
  for (int g = 0; g < c.left_alg.dim(); ++g) {
    auto gi = c.left_alg.gen_index(g);
    out.left_action[la.flat_index(lp[gi.block], gi.p, gi.q)] = c.left_action[g];
  }
  out.right_action.resize(ra.dim());
  for (int g = 0; g < c.right_alg.dim(); ++g) {
    auto gi = c.right_alg.gen_index(g);
    out.right_action[ra.flat_index(rp[gi.block], gi.p, gi.q)] = c.right_action[g];
  }
  out.gram.assign(c.dim, std::vector<AlgebraElement>(c.dim, AlgebraElement::zero(ra)));
  for (int u = 0; u < c.dim; ++u)
    for (int v = 0; v < c.dim; ++v)
      out.gram[u][v] = relabel_element(c.gram[u][v], rp, ra);
  return out;
}

// Isomorphism witness between modules over one algebra whose algebra
// renaming acts identically on both sides, as the notion of sameness for
// such modules requires a single algebra map.
struct MatchedIso {
  std::vector<int> perm;
  CorrespondenceIso iso;
};

std::optional<MatchedIso> matched_isomorphism(const Correspondence& a,
                                              const Correspondence& b,
                                              const Tolerance& tol) {
  int k = a.left_alg.num_blocks();
  if (b.left_alg.num_blocks() != k) return std::nullopt;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool sized = true;
    for (int i = 0; i < k && sized; ++i)
      sized = b.left_alg.blocks[perm[i]] == a.left_alg.blocks[i];
    if (!sized) continue;
    Correspondence ar = relabel(a, perm, perm);
    if (ar.left_alg != b.left_alg || ar.right_alg != b.right_alg) continue;
    auto iso = find_isomorphism(ar, b, false, tol);
    if (iso && iso->defect <= kIsoGate) return MatchedIso{perm, *iso};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

int coords_rank(const std::vector<Vec>& rows, int width, const Tolerance& tol) {
  if (rows.empty()) return 0;
  Mat m(static_cast<int>(rows.size()), width);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) m.row(i) = rows[i].transpose();
  return numerical_rank(m, tol);
}

}  // namespace

AlgebraElement EquivalenceBimodule::left_inner(const Vec& a, const Vec& b) const {
  AlgebraElement out = AlgebraElement::zero(left);
  for (int u = 0; u < x.dim; ++u)
    for (int v = 0; v < x.dim; ++v) {
      cplx c = a(u) * std::conj(b(v));
      if (c != cplx(0, 0)) out = out + left_gram[u][v] * c;
    }
  return out;
}

BimoduleReport EquivalenceBimodule::validate(const Tolerance& tol) const {
  BimoduleReport r;
  int d = x.dim;

  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) {
      Mat lmul = x.left_apply(left_gram[u][v]);
      for (int w = 0; w < d; ++w) {
        Vec lhs = lmul.col(w);
        Vec rhs = x.right_apply(x.gram[v][w]).col(u);
        r.compatibility = std::max(r.compatibility, (lhs - rhs).norm());
      }
      r.left_star = std::max(
          r.left_star, (left_gram[u][v].adjoint() - left_gram[v][u]).norm());
    }

  for (int g = 0; g < left.dim(); ++g) {
    AlgebraElement ag = AlgebraElement::generator(left, g);
    for (int u = 0; u < d; ++u)
      for (int v = 0; v < d; ++v) {
        AlgebraElement lhs = AlgebraElement::zero(left);
        for (int w = 0; w < d; ++w) {
          cplx c = x.left_action[g](w, u);
          if (c != cplx(0, 0)) lhs = lhs + left_gram[w][v] * c;
        }
        r.left_module =
            std::max(r.left_module, (lhs - ag * left_gram[u][v]).norm());
      }
  }

  std::vector<Vec> lrows, rrows;
  lrows.reserve(d * d);
  rrows.reserve(d * d);
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) {
      lrows.push_back(left_gram[u][v].coords());
      rrows.push_back(x.gram[u][v].coords());
    }
  r.left_full = coords_rank(lrows, left.dim(), tol) == left.dim();
  r.right_full = coords_rank(rrows, right.dim(), tol) == right.dim();
  return r;
}

EquivalenceBimodule standard_equivalence(const MultiMatrixAlgebra& m,
                                         const MultiMatrixAlgebra& n,
                                         const std::vector<int>& bijection) {
  m.validate();
  n.validate();
  int k = m.num_blocks();
  if (n.num_blocks() != k)
    throw Error(Err::BlockCountMismatch,
                "standard_equivalence: the algebras have different block counts");
  if (static_cast<int>(bijection.size()) != k)
    throw Error(Err::BlockCountMismatch,
                "standard_equivalence: pairing length does not match the blocks");
  std::vector<int> hit(k, 0);
  for (int i = 0; i < k; ++i) {
    if (bijection[i] < 0 || bijection[i] >= k || hit[bijection[i]]++)
      throw Error(Err::BlockCountMismatch,
                  "standard_equivalence: pairing is not a bijection of blocks");
  }

  std::vector<int> offs(k + 1, 0);
  for (int i = 0; i < k; ++i)
    offs[i + 1] = offs[i] + m.blocks[i] * n.blocks[bijection[i]];
  int dim = offs[k];
  auto at = [&](int blk, int row, int col) {
    return offs[blk] + row * n.blocks[bijection[blk]] + col;
  };

  Correspondence x;
  x.left_alg = m;
  x.right_alg = n;
  x.dim = dim;
  x.left_action.assign(m.dim(), Mat::Zero(dim, dim));
  for (int g = 0; g < m.dim(); ++g) {
    auto gi = m.gen_index(g);
    for (int c = 0; c < n.blocks[bijection[gi.block]]; ++c)
      x.left_action[g](at(gi.block, gi.p, c), at(gi.block, gi.q, c)) = 1.0;
  }
  x.right_action.assign(n.dim(), Mat::Zero(dim, dim));
  std::vector<int> inv(k, 0);
  for (int i = 0; i < k; ++i) inv[bijection[i]] = i;
  for (int g = 0; g < n.dim(); ++g) {
    auto gi = n.gen_index(g);
    int i = inv[gi.block];
    for (int row = 0; row < m.blocks[i]; ++row)
      x.right_action[g](at(i, row, gi.q), at(i, row, gi.p)) = 1.0;
  }
  x.gram.assign(dim, std::vector<AlgebraElement>(dim, AlgebraElement::zero(n)));
  EquivalenceBimodule out;
  out.left_gram.assign(dim, std::vector<AlgebraElement>(dim, AlgebraElement::zero(m)));
  for (int i = 0; i < k; ++i) {
    int rows = m.blocks[i], cols = n.blocks[bijection[i]];
    for (int p = 0; p < rows; ++p)
      for (int q = 0; q < cols; ++q) {
        for (int q2 = 0; q2 < cols; ++q2)
          x.gram[at(i, p, q)][at(i, p, q2)] = AlgebraElement::generator(
              n, n.flat_index(bijection[i], q, q2));
        for (int p2 = 0; p2 < rows; ++p2)
          out.left_gram[at(i, p, q)][at(i, p2, q)] =
              AlgebraElement::generator(m, m.flat_index(i, p, p2));
      }
  }

  out.left = m;
  out.right = n;
  out.block_bijection = bijection;
  out.x = std::move(x);

  Tolerance tol;
  out.x.check(tol);
  BimoduleReport rep = out.validate(tol);
  if (!rep.pass(tol.eps_eq))
    throw Error(Err::FailedCondition,
                "standard_equivalence: bimodule laws failed at " +
                    std::to_string(rep.worst()));
  return out;
}

std::optional<MoritaWitness> are_morita_equivalent(const Correspondence& e,
                                                   const Correspondence& f,
                                                   const Tolerance& tol) {
  if (e.left_alg != e.right_alg || f.left_alg != f.right_alg)
    throw Error(Err::AlgebraMismatch,
                "are_morita_equivalent: inputs must each live over one algebra");
  const MultiMatrixAlgebra& m = e.right_alg;
  const MultiMatrixAlgebra& n = f.right_alg;
  int k = m.num_blocks();
  if (n.num_blocks() != k) return std::nullopt;

  IMat a = multiplicity_matrix(e, tol);
  IMat b = multiplicity_matrix(f, tol);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool match = true;
    for (int i = 0; i < k && match; ++i)
      for (int j = 0; j < k && match; ++j) match = a(i, j) == b(perm[i], perm[j]);
    if (!match) continue;
    EquivalenceBimodule x = standard_equivalence(m, n, perm);
    TensorProduct te = tensor(e, x.x, tol);
    TensorProduct tf = tensor(x.x, f, tol);
    auto iso = find_isomorphism(te.product, tf.product, false, tol);
    if (iso && iso->defect <= kIsoGate)
      return MoritaWitness{std::move(x), *iso, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

double DiffdualsReport::worst() const {
  double w = 0;
  for (double d : {dual_iso_defect, double_dual_defect, twisted_dual_defect,
                   bimodule_defect, induced_defect})
    if (d >= 0) w = std::max(w, d);
  return w;
}

DiffdualsReport verify_diffduals(const Correspondence& e, const Correspondence& f,
                                 const Tolerance& tol) {
  if (e.left_alg != e.right_alg || f.left_alg != f.right_alg)
    throw Error(Err::AlgebraMismatch,
                "verify_diffduals: inputs must each live over one algebra");
  DiffdualsReport r;
  const MultiMatrixAlgebra& m = e.right_alg;
  const MultiMatrixAlgebra& n = f.right_alg;
  int k = m.num_blocks();
  if (n.num_blocks() != k) {
    r.obstruction =
        "the algebras have different block counts, so no bimodule, shared "
        "source, or dual matching can pair their central summands";
    return r;
  }

  IMat a = multiplicity_matrix(e, tol);
  IMat b = multiplicity_matrix(f, tol);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  bool found = false;
  do {
    bool match = true;
    for (int i = 0; i < k && match; ++i)
      for (int j = 0; j < k && match; ++j) match = a(i, j) == b(perm[i], perm[j]);
    if (match) {
      found = true;
      break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!found) {
    r.obstruction =
        "no block bijection conjugates the multiplicity matrices; the block "
        "supported rank pattern is preserved by every one of the three "
        "formulations, so each of them fails on this invariant";
    return r;
  }
  r.bijection = perm;

  // duals at multiplicity one representations, compared through a single
  // algebra renaming acting on both sides
  Representation s1 = canonical_faithful(m);
  Representation t1 = canonical_faithful(n);
  DualCorrespondence de = dual(e, s1, s1, tol);
  DualCorrespondence df = dual(f, t1, t1, tol);
  auto shared = matched_isomorphism(de.corr, df.corr, tol);
  if (shared) {
    r.cond_dual_iso = true;
    r.dual_iso_defect = shared->iso.defect;
  }

  // the dual itself serves as the common source: the first input is its
  // double dual, the second is its dual at the representation carried over
  // through the renaming of the commutants
  DualityReport dd = verify_duality(e, s1, s1, tol);
  r.double_dual_defect = dd.worst();
  std::optional<Representation> carried;
  if (shared) {
    // representation of the first dual's algebra transported onto the second
    // dual's space through the block renaming
    const std::vector<int>& p = shared->perm;
    const MultiMatrixAlgebra& q1 = de.corr.right_alg;
    const MultiMatrixAlgebra& q2 = df.corr.right_alg;
    std::vector<Mat> imgs(q1.dim());
    for (int g = 0; g < q1.dim(); ++g) {
      auto gi = q1.gen_index(g);
      imgs[g] =
          df.right_comm.rep.apply_gen(q2.flat_index(p[gi.block], gi.p, gi.q));
    }
    carried = Representation::from_images(q1, imgs, tol);
    DualCorrespondence dy = dual(de.corr, *carried, *carried, tol);
    Correspondence yre = relabel(dy.corr, p, p);
    if (!(yre.left_alg != f.left_alg) && !(yre.right_alg != f.right_alg)) {
      auto iso2 = find_isomorphism(yre, f, false, tol);
      if (iso2) {
        r.twisted_dual_defect = iso2->defect;
        r.cond_shared_source =
            dd.pass(kIsoGate) && iso2->defect <= kIsoGate;
      }
    }
  }

  auto w = are_morita_equivalent(e, f, tol);
  if (w) {
    r.cond_bimodule = true;
    double bd = w->iso.defect;
    if (shared) {
      // the bimodule the chain factors through is a dual of the identity
      // correspondence of the shared source, taken between the carried
      // representation and the first inclusion; it must match the standard
      // bimodule for the same block pairing
      const std::vector<int>& p = shared->perm;
      const MultiMatrixAlgebra& q1 = de.corr.right_alg;
      Correspondence z = identity_correspondence(q1);
      DualCorrespondence dz = dual(z, *carried, de.right_comm.rep, tol);
      std::vector<int> idp(k);
      std::iota(idp.begin(), idp.end(), 0);
      Correspondence xd = relabel(dz.corr, idp, p);
      if (!(xd.left_alg != m) && !(xd.right_alg != n)) {
        Correspondence xs = standard_equivalence(m, n, p).x;
        auto xid = find_isomorphism(xd, xs, false, tol);
        if (xid) bd = std::max(bd, xid->defect);
      }
    }
    r.bimodule_defect = bd;

    // from the bimodule back to matched duals: the standard form of the
    // right algebra transports through the bimodule to multiplicities on
    // the left given by the paired block sizes
    std::vector<int> mu(k);
    for (int i = 0; i < k; ++i) mu[i] = n.blocks[w->bijection[i]];
    Representation sm = Representation::canonical(m, mu);
    Representation tn = Representation::canonical(n, n.blocks);
    DualCorrespondence de2 = dual(e, sm, sm, tol);
    DualCorrespondence df2 = dual(f, tn, tn, tol);
    Correspondence dre = relabel(de2.corr, w->bijection, w->bijection);
    if (!(dre.left_alg != df2.corr.left_alg) &&
        !(dre.right_alg != df2.corr.right_alg)) {
      auto i3 = find_isomorphism(dre, df2.corr, false, tol);
      if (i3) r.induced_defect = i3->defect;
    }
  }
  return r;
}

}  // namespace corrlab
