#include "corrlab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace corrlab {

namespace {

Mat creation_module(const FockSpace& f, const Vec& xi) {
  Mat out = Mat::Zero(f.total_dim, f.total_dim);
  for (int j = 0; j < f.depth; ++j) {
    int dj = f.summands[j].dim;
    int dn = f.summands[j + 1].dim;
    if (dj == 0 || dn == 0) continue;
    Mat block = f.steps[j].quotient_map * kron(Mat(xi), Mat::Identity(dj, dj));
    out.block(f.offsets[j + 1], f.offsets[j], dn, dj) = block;
  }
  return out;
}

Mat ambient_module(const FockSpace& f, const AlgebraElement& a) {
  Mat out = Mat::Zero(f.total_dim, f.total_dim);
  for (int j = 0; j <= f.depth; ++j) {
    int dj = f.summands[j].dim;
    if (dj == 0) continue;
    out.block(f.offsets[j], f.offsets[j], dj, dj) = f.summands[j].left_apply(a);
  }
  return out;
}

void prune(std::map<Monomial, cplx>& coeffs) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (std::abs(it->second) <= 1e-15)
      it = coeffs.erase(it);
    else
      ++it;
  }
}

}  // namespace

FockPtr fock(const Correspondence& e, int depth, const Tolerance& tol) {
  if (depth < 0) throw Error(Err::BadConfig, "fock: negative depth");
  if (e.left_alg != e.right_alg)
    throw Error(Err::AlgebraMismatch, "fock: base must live over a single algebra");
  FockSpace f;
  f.base = e;
  f.depth = depth;
  f.summands.reserve(depth + 1);
  f.summands.push_back(identity_correspondence(e.right_alg));
  for (int n = 0; n < depth; ++n) {
    TensorProduct tp = tensor(e, f.summands.back(), tol);
    f.summands.push_back(tp.product);
    f.steps.push_back(std::move(tp));
  }
  f.offsets.resize(depth + 1);
  int total = 0;
  for (int j = 0; j <= depth; ++j) {
    f.offsets[j] = total;
    total += f.summands[j].dim;
  }
  f.total_dim = total;
  if (depth >= 1) {
    Vec idc = AlgebraElement::identity(e.right_alg).coords();
    f.base_embed = f.steps[0].quotient_map * kron(Mat::Identity(e.dim, e.dim), Mat(idc));
  } else {
    f.base_embed = Mat(0, e.dim);
  }
  f.appends.reserve(depth);
  Mat ide = Mat::Identity(e.dim, e.dim);
  for (int n = 0; n < depth; ++n) {
    if (n == 0) {
      const MultiMatrixAlgebra& alg = e.right_alg;
      Mat a0(f.summands[1].dim, alg.dim() * e.dim);
      for (int g = 0; g < alg.dim(); ++g)
        a0.middleCols(g * e.dim, e.dim) =
            f.base_embed * e.left_apply(AlgebraElement::generator(alg, g));
      f.appends.push_back(std::move(a0));
    } else {
      f.appends.push_back(f.steps[n].quotient_map * kron(ide, f.appends[n - 1]) *
                          kron(f.steps[n - 1].lift, ide));
    }
  }
  return std::make_shared<const FockSpace>(std::move(f));
}

int HardyElement::degree() const {
  int d = 0;
  for (const auto& [m, c] : coefficients)
    if (std::abs(c) > 1e-15) d = std::max(d, static_cast<int>(m.word.size()));
  return d;
}

HardyElement HardyElement::operator+(const HardyElement& o) const {
  if (!fock || fock.get() != o.fock.get())
    throw Error(Err::ShapeMismatch, "hardy sum: different fock spaces");
  HardyElement out;
  out.fock = fock;
  out.coefficients = coefficients;
  for (const auto& [m, c] : o.coefficients) out.coefficients[m] += c;
  prune(out.coefficients);
  out.realized = realized + o.realized;
  return out;
}

HardyElement HardyElement::operator-(const HardyElement& o) const {
  return *this + o * cplx(-1.0);
}

HardyElement HardyElement::operator*(cplx s) const {
  HardyElement out;
  out.fock = fock;
  for (const auto& [m, c] : coefficients) out.coefficients[m] = c * s;
  prune(out.coefficients);
  out.realized = realized * s;
  return out;
}

HardyElement HardyElement::operator*(const HardyElement& o) const {
  if (!fock || fock.get() != o.fock.get())
    throw Error(Err::ShapeMismatch, "hardy product: different fock spaces");
  const MultiMatrixAlgebra& alg = fock->base.right_alg;
  HardyElement out;
  out.fock = fock;
  std::map<int, Mat> left_cache;
  for (const auto& [m1, c1] : coefficients) {
    if (std::abs(c1) <= 1e-15) continue;
    for (const auto& [m2, c2] : o.coefficients) {
      cplx c = c1 * c2;
      if (std::abs(c) <= 1e-15) continue;
      if (m2.word.empty()) {
        auto g1 = alg.gen_index(m1.gen);
        auto g2 = alg.gen_index(m2.gen);
        if (g1.block != g2.block || g1.q != g2.p) continue;
        out.coefficients[Monomial{m1.word, alg.flat_index(g1.block, g1.p, g2.q)}] += c;
      } else {
        // push the algebra coefficient through the first letter of the
        // second word: phi(a) T(e_j) = T(phi(a) e_j)
        auto it = left_cache.find(m1.gen);
        if (it == left_cache.end())
          it = left_cache
                   .emplace(m1.gen, fock->base.left_apply(
                                        AlgebraElement::generator(alg, m1.gen)))
                   .first;
        const Mat& lm = it->second;
        int j0 = m2.word.front();
        for (int i = 0; i < lm.rows(); ++i) {
          cplx w = lm(i, j0);
          if (std::abs(c * w) <= 1e-15) continue;
          Monomial m;
          m.word = m1.word;
          m.word.push_back(i);
          m.word.insert(m.word.end(), m2.word.begin() + 1, m2.word.end());
          m.gen = m2.gen;
          if (static_cast<int>(m.word.size()) > fock->depth)
            throw Error(Err::DegreeExceedsDepth, "hardy product: degree exceeds depth");
          out.coefficients[m] += c * w;
        }
      }
    }
  }
  prune(out.coefficients);
  out.realized = realized * o.realized;
  return out;
}

HardyElement hardy_zero(const FockPtr& f) {
  HardyElement out;
  out.fock = f;
  out.realized = Mat::Zero(f->total_dim, f->total_dim);
  return out;
}

HardyElement creation(const FockPtr& f, const Vec& xi) {
  if (static_cast<int>(xi.size()) != f->base.dim)
    throw Error(Err::ShapeMismatch, "creation: coordinate size mismatch");
  HardyElement out;
  out.fock = f;
  const MultiMatrixAlgebra& alg = f->base.right_alg;
  for (int i = 0; i < f->base.dim; ++i) {
    if (std::abs(xi(i)) <= 1e-15) continue;
    if (f->depth < 1)
      throw Error(Err::DegreeExceedsDepth, "creation: depth zero admits no creations");
    for (int b = 0; b < alg.num_blocks(); ++b)
      for (int p = 0; p < alg.blocks[b]; ++p)
        out.coefficients[Monomial{{i}, alg.flat_index(b, p, p)}] += xi(i);
  }
  out.realized = creation_module(*f, xi);
  return out;
}

HardyElement ambient(const FockPtr& f, const AlgebraElement& a) {
  if (a.algebra != f->base.right_alg)
    throw Error(Err::AlgebraMismatch, "ambient: algebra mismatch");
  HardyElement out;
  out.fock = f;
  Vec co = a.coords();
  for (int g = 0; g < co.size(); ++g)
    if (std::abs(co(g)) > 1e-15) out.coefficients[Monomial{{}, g}] = co(g);
  out.realized = ambient_module(*f, a);
  return out;
}

Mat realize_monomials(const FockPtr& f, const std::map<Monomial, cplx>& coeffs) {
  const MultiMatrixAlgebra& alg = f->base.right_alg;
  std::map<int, Mat> cre_cache;
  auto cre = [&](int letter) -> const Mat& {
    auto it = cre_cache.find(letter);
    if (it == cre_cache.end())
      it = cre_cache.emplace(letter, creation_module(*f, Vec::Unit(f->base.dim, letter)))
               .first;
    return it->second;
  };
  Mat out = Mat::Zero(f->total_dim, f->total_dim);
  for (const auto& [m, c] : coeffs) {
    if (std::abs(c) <= 1e-15) continue;
    Mat acc = ambient_module(*f, AlgebraElement::generator(alg, m.gen));
    for (int idx = static_cast<int>(m.word.size()) - 1; idx >= 0; --idx)
      acc = cre(m.word[idx]) * acc;
    out += c * acc;
  }
  return out;
}

InducedSpace induce(const FockPtr& f, const Representation& sigma, const Tolerance& tol) {
  if (sigma.algebra != f->base.right_alg)
    throw Error(Err::AlgebraMismatch, "induce: representation algebra mismatch");
  InducedSpace ind;
  ind.fock = f;
  ind.sigma = sigma;
  ind.levels.reserve(f->depth + 1);
  ind.offsets.resize(f->depth + 1);
  int total = 0;
  for (int j = 0; j <= f->depth; ++j) {
    ind.levels.push_back(localize(f->summands[j], sigma, tol));
    ind.offsets[j] = total;
    total += ind.levels.back().dim;
  }
  ind.total_dim = total;
  return ind;
}

Mat InducedSpace::embed(int j) const {
  Mat out = Mat::Zero(total_dim, levels[j].dim);
  out.block(offsets[j], 0, levels[j].dim, levels[j].dim) =
      Mat::Identity(levels[j].dim, levels[j].dim);
  return out;
}

Mat InducedSpace::vacuum() const {
  int h = sigma.space_dim;
  int dm = sigma.algebra.dim();
  Mat a0(h, dm * h);
  for (int u = 0; u < dm; ++u) a0.middleCols(u * h, h) = sigma.images[u];
  return a0 * levels[0].pinv;
}

Mat InducedSpace::transport(const Mat& module_mat) const {
  if (module_mat.rows() != fock->total_dim || module_mat.cols() != fock->total_dim)
    throw Error(Err::ShapeMismatch, "transport: module matrix size mismatch");
  int h = sigma.space_dim;
  Mat ih = Mat::Identity(h, h);
  Mat out = Mat::Zero(total_dim, total_dim);
  for (int t = 0; t <= fock->depth; ++t) {
    int dt = fock->summands[t].dim;
    if (dt == 0 || levels[t].dim == 0) continue;
    for (int s = 0; s <= fock->depth; ++s) {
      int ds = fock->summands[s].dim;
      if (ds == 0 || levels[s].dim == 0) continue;
      Mat block = module_mat.block(fock->offsets[t], fock->offsets[s], dt, ds);
      if (block.cwiseAbs().maxCoeff() == 0.0) continue;
      out.block(offsets[t], offsets[s], levels[t].dim, levels[s].dim) +=
          levels[t].qmap * kron(block, ih) * levels[s].pinv;
    }
  }
  return out;
}

Mat InducedSpace::creation_block(int j, const Vec& xi) const {
  if (j < 0 || j >= fock->depth)
    throw Error(Err::BadConfig, "creation_block: level outside the truncation");
  int h = sigma.space_dim;
  int dj = fock->summands[j].dim;
  Mat cmod = fock->steps[j].quotient_map * kron(Mat(xi), Mat::Identity(dj, dj));
  return localized_map(levels[j + 1], levels[j], cmod, Mat::Identity(h, h));
}

Mat InducedSpace::creation_op(const Vec& xi) const {
  Mat out = Mat::Zero(total_dim, total_dim);
  for (int j = 0; j < fock->depth; ++j) {
    if (levels[j].dim == 0 || levels[j + 1].dim == 0) continue;
    out.block(offsets[j + 1], offsets[j], levels[j + 1].dim, levels[j].dim) =
        creation_block(j, xi);
  }
  return out;
}

Mat InducedSpace::ambient_op(const AlgebraElement& a) const {
  Mat out = Mat::Zero(total_dim, total_dim);
  for (int j = 0; j <= fock->depth; ++j) {
    if (levels[j].dim == 0) continue;
    out.block(offsets[j], offsets[j], levels[j].dim, levels[j].dim) =
        levels[j].left.apply(a);
  }
  return out;
}

Mat InducedSpace::rins_block(int j, const Mat& t) const {
  if (j < 0 || j >= fock->depth)
    throw Error(Err::BadConfig, "rins_block: level outside the truncation");
  int h = sigma.space_dim;
  if (t.rows() != levels[1].dim || t.cols() != h)
    throw Error(Err::ShapeMismatch, "rins_block: intertwiner shape mismatch");
  if (j == 0) return t * vacuum();
  int de = fock->base.dim;
  int d1 = fock->summands[1].dim;
  if (d1 != de)
    throw Error(Err::FailedCondition, "rins_block: degenerate base module");
  Mat inv = fock->base_embed.colPivHouseholderQr().solve(Mat::Identity(d1, d1));
  Mat ih = Mat::Identity(h, h);
  Mat tlift = kron(inv, ih) * levels[1].pinv * t;  // H -> base (x) H coordinates
  int dj = fock->summands[j].dim;
  Mat mid = kron(Mat::Identity(dj, dj), tlift);  // insert at the slot next to H
  return levels[j + 1].qmap * kron(fock->appends[j], ih) * mid * levels[j].pinv;
}

Mat evaluate(const HardyElement& x, const Mat& eta, const Localization& loc,
             const Representation& sigma, const Tolerance&) {
  if (!x.fock) throw Error(Err::BadConfig, "evaluate: empty element");
  const Correspondence& e = x.fock->base;
  int h = sigma.space_dim;
  if (sigma.algebra != e.right_alg)
    throw Error(Err::AlgebraMismatch, "evaluate: representation algebra mismatch");
  if (loc.corr_dim != e.dim || loc.base_dim != h)
    throw Error(Err::ShapeMismatch, "evaluate: localization mismatch");
  if (eta.rows() != loc.dim || eta.cols() != h)
    throw Error(Err::ShapeMismatch, "evaluate: dual element shape mismatch");
  double nrm = op_norm(eta);
  if (nrm >= 1.0)
    throw Error(Err::NormTooLarge, "evaluate: dual element norm " + std::to_string(nrm));
  double worst = 0;
  for (int g = 0; g < e.left_alg.dim(); ++g)
    worst = std::max(worst, op_norm(loc.left.images[g] * eta - eta * sigma.images[g]));
  if (worst > 1e-6 * std::max(1.0, nrm))
    throw Error(Err::FailedCondition, "evaluate: element does not intertwine");
  std::vector<Mat> letter(e.dim);
  for (int i = 0; i < e.dim; ++i)
    letter[i] = eta.adjoint() * loc.insert(Vec::Unit(e.dim, i));
  Mat out = Mat::Zero(h, h);
  for (const auto& [m, c] : x.coefficients) {
    if (std::abs(c) <= 1e-15) continue;
    if (static_cast<int>(m.word.size()) > x.fock->depth)
      throw Error(Err::DegreeExceedsDepth, "evaluate: degree exceeds depth");
    Mat term = sigma.images[m.gen];
    for (int idx = static_cast<int>(m.word.size()) - 1; idx >= 0; --idx)
      term = letter[m.word[idx]] * term;
    out += c * term;
  }
  return out;
}

namespace {

// All products of degree-raising letters over the degree-zero seeds, up to
// the truncation depth.
std::vector<Mat> algebra_words(const std::vector<Mat>& seeds, const std::vector<Mat>& letters,
                               int depth) {
  double projected = static_cast<double>(seeds.size());
  double layer = static_cast<double>(seeds.size());
  for (int d = 1; d <= depth; ++d) {
    layer *= static_cast<double>(letters.size());
    projected += layer;
  }
  if (projected > 2e5)
    throw Error(Err::BadConfig, "verify_commutant: instance too large for word spans");
  std::vector<Mat> out = seeds;
  std::vector<Mat> frontier = seeds;
  for (int d = 1; d <= depth; ++d) {
    std::vector<Mat> next;
    next.reserve(frontier.size() * letters.size());
    for (const Mat& c : letters)
      for (const Mat& w : frontier) next.push_back(c * w);
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

Mat vec_columns(const std::vector<Mat>& ops) {
  if (ops.empty()) return Mat(0, 0);
  Mat out(ops.front().size(), static_cast<int>(ops.size()));
  for (int j = 0; j < out.cols(); ++j) out.col(j) = vec(ops[j]);
  return out;
}

// Solutions of [z, c] = 0 for all c, searched inside the span of the given
// commutant basis of the degree-zero part.
std::pair<int, Mat> stage_two_commutant(const std::vector<Mat>& basis,
                                        const std::vector<Mat>& constraints,
                                        const Tolerance& tol) {
  int nb = static_cast<int>(basis.size());
  int n = nb ? static_cast<int>(basis.front().rows()) : 0;
  if (nb == 0) return {0, Mat(n * n, 0)};
  Mat sys(static_cast<int>(constraints.size()) * n * n, nb);
  for (int b = 0; b < nb; ++b) {
    int row = 0;
    for (const Mat& c : constraints) {
      sys.block(row, b, n * n, 1) = vec(basis[b] * c - c * basis[b]);
      row += n * n;
    }
  }
  Mat coeff = sys.rows() ? null_space(sys, tol) : Mat::Identity(nb, nb);
  Mat span(n * n, coeff.cols());
  for (int g = 0; g < coeff.cols(); ++g) {
    Mat z = Mat::Zero(n, n);
    for (int b = 0; b < nb; ++b) z += coeff(b, g) * basis[b];
    span.col(g) = vec(z);
  }
  return {static_cast<int>(coeff.cols()), span};
}

}  // namespace

bool CommutantReport::pass(double tol_defect, double tol_span) const {
  if (level_dims != dual_level_dims) return false;
  if (unitary_defect > tol_defect) return false;
  if (recursion_defect > tol_defect) return false;
  if (commutation_defect > tol_defect) return false;
  if (primal_commutant_dim != dual_span_dim) return false;
  if (dual_commutant_dim != primal_span_dim) return false;
  if (commutant_span_distance > tol_span) return false;
  if (bicommutant_span_distance > tol_span) return false;
  return true;
}

CommutantFrame commutant_frame(const Correspondence& e, const Representation& sigma,
                               int depth, const Tolerance& tol) {
  if (e.left_alg != e.right_alg)
    throw Error(Err::AlgebraMismatch, "commutant_frame: base must live over a single algebra");
  if (sigma.algebra != e.right_alg)
    throw Error(Err::AlgebraMismatch, "commutant_frame: representation algebra mismatch");
  if (!sigma.faithful())
    throw Error(Err::NotFaithful, "commutant_frame: representation not faithful");
  if (depth < 1) throw Error(Err::BadConfig, "commutant_frame: depth must be at least one");

  CommutantFrame fr;
  fr.df = dual(e, sigma, sigma, tol);
  Representation iota = fr.df.right_comm.rep;
  fr.fe = fock(e, depth, tol);
  fr.fd = fock(fr.df.corr, depth, tol);
  fr.prim = induce(fr.fe, sigma, tol);
  fr.dset = induce(fr.fd, iota, tol);

  int h = sigma.space_dim;
  int r = fr.df.corr.dim;
  Mat ih = Mat::Identity(h, h);

  std::vector<Mat> tb(r);
  Mat to1 = fr.prim.levels[1].qmap * kron(fr.fe->base_embed, ih);
  for (int a = 0; a < r; ++a) tb[a] = to1 * fr.df.loc.pinv * fr.df.basis[a];

  std::vector<Mat> U(depth + 1);
  U[0] = fr.prim.vacuum().adjoint() * fr.dset.vacuum();
  auto unit_defect = [](const Mat& u) {
    double d1 = op_norm(u * u.adjoint() - Mat::Identity(u.rows(), u.rows()));
    double d2 = op_norm(u.adjoint() * u - Mat::Identity(u.cols(), u.cols()));
    return std::max(d1, d2);
  };
  fr.unitary_defect = unit_defect(U[0]);
  for (int j = 1; j <= depth; ++j) {
    int ddp = fr.fd->summands[j - 1].dim;
    Mat raw(fr.prim.levels[j].dim, r * ddp * h);
    for (int a = 0; a < r; ++a)
      raw.middleCols(a * ddp * h, ddp * h) =
          fr.prim.rins_block(j - 1, tb[a]) * U[j - 1] * fr.dset.levels[j - 1].qmap;
    U[j] = raw * kron(fr.fd->steps[j - 1].lift, ih) * fr.dset.levels[j].pinv;
    fr.unitary_defect = std::max(fr.unitary_defect, unit_defect(U[j]));
    for (int a = 0; a < r; ++a)
      fr.recursion_defect =
          std::max(fr.recursion_defect,
                   op_norm(U[j] * fr.dset.creation_block(j - 1, Vec::Unit(r, a)) -
                           fr.prim.rins_block(j - 1, tb[a]) * U[j - 1]));
  }

  fr.ub = Mat::Zero(fr.prim.total_dim, fr.dset.total_dim);
  for (int j = 0; j <= depth; ++j)
    fr.ub.block(fr.prim.offsets[j], fr.dset.offsets[j], U[j].rows(), U[j].cols()) = U[j];
  return fr;
}

CommutantReport verify_commutant(const Correspondence& e, const Representation& sigma,
                                 int depth, const Tolerance& tol) {
  CommutantFrame fr = commutant_frame(e, sigma, depth, tol);
  const DualCorrespondence& df = fr.df;
  const InducedSpace& prim = fr.prim;
  const InducedSpace& dset = fr.dset;
  const Mat& ub = fr.ub;

  CommutantReport rep;
  rep.depth = depth;
  rep.unitary_defect = fr.unitary_defect;
  rep.recursion_defect = fr.recursion_defect;
  for (int j = 0; j <= depth; ++j) {
    rep.level_dims.push_back(prim.levels[j].dim);
    rep.dual_level_dims.push_back(dset.levels[j].dim);
  }

  int r = df.corr.dim;
  int dimE = e.dim;
  const MultiMatrixAlgebra& ma = e.right_alg;
  const MultiMatrixAlgebra& nc = df.corr.right_alg;

  std::vector<Mat> prim_cre, prim_amb, dual_cre_raw, dual_amb_raw;
  for (int i = 0; i < dimE; ++i) prim_cre.push_back(prim.creation_op(Vec::Unit(dimE, i)));
  for (int g = 0; g < ma.dim(); ++g)
    prim_amb.push_back(prim.ambient_op(AlgebraElement::generator(ma, g)));
  for (int a = 0; a < r; ++a) dual_cre_raw.push_back(dset.creation_op(Vec::Unit(r, a)));
  for (int u = 0; u < nc.dim(); ++u)
    dual_amb_raw.push_back(dset.ambient_op(AlgebraElement::generator(nc, u)));
  std::vector<Mat> dual_cre, dual_amb;
  for (const Mat& m : dual_cre_raw) dual_cre.push_back(ub * m * ub.adjoint());
  for (const Mat& m : dual_amb_raw) dual_amb.push_back(ub * m * ub.adjoint());

  // commutation defects per generator pair, per input level; interior means
  // the outputs of both orders stay below the truncation boundary
  auto add_pair = [&](const std::string& label, const Mat& d, int degd, const Mat& p,
                      int degp) {
    std::vector<double> row(depth + 1, 0.0);
    Mat comm = d * p - p * d;
    for (int j = 0; j <= depth; ++j) {
      row[j] = op_norm(comm * prim.embed(j));
      if (j + degd + degp <= depth)
        rep.commutation_defect = std::max(rep.commutation_defect, row[j]);
    }
    rep.pair_labels.push_back(label);
    rep.pair_level_defects.push_back(std::move(row));
  };
  for (int a = 0; a < r; ++a) {
    for (int i = 0; i < dimE; ++i)
      add_pair("dual_cre" + std::to_string(a) + " cre" + std::to_string(i), dual_cre[a], 1,
               prim_cre[i], 1);
    for (int g = 0; g < ma.dim(); ++g)
      add_pair("dual_cre" + std::to_string(a) + " amb" + std::to_string(g), dual_cre[a], 1,
               prim_amb[g], 0);
  }
  for (int u = 0; u < nc.dim(); ++u) {
    for (int i = 0; i < dimE; ++i)
      add_pair("dual_amb" + std::to_string(u) + " cre" + std::to_string(i), dual_amb[u], 0,
               prim_cre[i], 1);
    for (int g = 0; g < ma.dim(); ++g)
      add_pair("dual_amb" + std::to_string(u) + " amb" + std::to_string(g), dual_amb[u], 0,
               prim_amb[g], 0);
  }

  if (prim.total_dim != dset.total_dim) {
    rep.commutant_span_distance = 1.0;
    rep.bicommutant_span_distance = 1.0;
    return rep;
  }
  int n = prim.total_dim;

  Mat prim_span = vec_columns(algebra_words(prim_amb, prim_cre, depth));
  rep.primal_span_dim = numerical_rank(prim_span, tol);
  Mat dual_span_raw = vec_columns(algebra_words(dual_amb_raw, dual_cre_raw, depth));
  Mat dual_basis_raw = range_basis(dual_span_raw, tol);
  Mat dual_span(n * n, dual_basis_raw.cols());
  for (int j = 0; j < dual_basis_raw.cols(); ++j)
    dual_span.col(j) = vec(ub * unvec(dual_basis_raw.col(j), n) * ub.adjoint());
  rep.dual_span_dim = numerical_rank(dual_span, tol);

  Representation amb_rep = prim.levels[0].left;
  for (int j = 1; j <= depth; ++j) amb_rep = direct_sum(amb_rep, prim.levels[j].left);
  CommutantInfo ci = commutant(amb_rep, tol);
  auto [pdim, pspan] = stage_two_commutant(ci.rep.images, prim_cre, tol);
  rep.primal_commutant_dim = pdim;

  Tolerance relaxed = tol;
  relaxed.eps_eq = std::max(tol.eps_eq, 1e-7);
  Representation damb_rep = Representation::from_images(nc, dual_amb, relaxed);
  CommutantInfo ci2 = commutant(damb_rep, tol);
  auto [ddim, dspan] = stage_two_commutant(ci2.rep.images, dual_cre, tol);
  rep.dual_commutant_dim = ddim;

  rep.commutant_span_distance = span_distance(pspan, dual_span, tol);
  rep.bicommutant_span_distance = span_distance(dspan, prim_span, tol);
  return rep;
}

}  // namespace corrlab
