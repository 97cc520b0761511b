#include "corrlab/algebra.hpp"

namespace corrlab {

int MultiMatrixAlgebra::dim() const {
  int d = 0;
  for (int n : blocks) d += n * n;
  return d;
}

int MultiMatrixAlgebra::canonical_dim() const {
  int d = 0;
  for (int n : blocks) d += n;
  return d;
}

MultiMatrixAlgebra::GenIndex MultiMatrixAlgebra::gen_index(int flat) const {
  for (int i = 0; i < num_blocks(); ++i) {
    int sq = blocks[i] * blocks[i];
    if (flat < sq) return {i, flat / blocks[i], flat % blocks[i]};
    flat -= sq;
  }
  throw Error(Err::ShapeMismatch, "generator index out of range");
}

int MultiMatrixAlgebra::flat_index(int block, int p, int q) const {
  return block_offset(block) + p * blocks[block] + q;
}

int MultiMatrixAlgebra::block_offset(int block) const {
  int off = 0;
  for (int i = 0; i < block; ++i) off += blocks[i] * blocks[i];
  return off;
}

void MultiMatrixAlgebra::validate() const {
  if (blocks.empty()) throw Error(Err::BadConfig, "algebra needs at least one block");
  for (int n : blocks)
    if (n < 1) throw Error(Err::BadConfig, "block sizes must be positive");
}

AlgebraElement AlgebraElement::zero(const MultiMatrixAlgebra& a) {
  AlgebraElement x{a, {}};
  for (int n : a.blocks) x.block.push_back(Mat::Zero(n, n));
  return x;
}

AlgebraElement AlgebraElement::identity(const MultiMatrixAlgebra& a) {
  AlgebraElement x{a, {}};
  for (int n : a.blocks) x.block.push_back(Mat::Identity(n, n));
  return x;
}

AlgebraElement AlgebraElement::generator(const MultiMatrixAlgebra& a, int flat) {
  auto gi = a.gen_index(flat);
  AlgebraElement x = zero(a);
  x.block[gi.block](gi.p, gi.q) = 1.0;
  return x;
}

AlgebraElement AlgebraElement::central_projection(const MultiMatrixAlgebra& a, int blk) {
  AlgebraElement x = zero(a);
  x.block[blk] = Mat::Identity(a.blocks[blk], a.blocks[blk]);
  return x;
}

AlgebraElement AlgebraElement::from_coords(const MultiMatrixAlgebra& a, const Vec& coords) {
  if (coords.size() != a.dim()) throw Error(Err::ShapeMismatch, "coordinate length");
  AlgebraElement x = zero(a);
  int k = 0;
  for (int i = 0; i < a.num_blocks(); ++i)
    for (int p = 0; p < a.blocks[i]; ++p)
      for (int q = 0; q < a.blocks[i]; ++q) x.block[i](p, q) = coords[k++];
  return x;
}

static void check_same(const MultiMatrixAlgebra& a, const MultiMatrixAlgebra& b) {
  if (a != b) throw Error(Err::AlgebraMismatch, "elements of different algebras");
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  check_same(algebra, o.algebra);
  AlgebraElement x = *this;
  for (size_t i = 0; i < block.size(); ++i) x.block[i] += o.block[i];
  return x;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  check_same(algebra, o.algebra);
  AlgebraElement x = *this;
  for (size_t i = 0; i < block.size(); ++i) x.block[i] -= o.block[i];
  return x;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
  check_same(algebra, o.algebra);
  AlgebraElement x = *this;
  for (size_t i = 0; i < block.size(); ++i) x.block[i] *= o.block[i];
  return x;
}

AlgebraElement AlgebraElement::operator*(cplx s) const {
  AlgebraElement x = *this;
  for (auto& b : x.block) b *= s;
  return x;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement x = *this;
  for (auto& b : x.block) b = b.adjoint().eval();
  return x;
}

Mat AlgebraElement::block_diag() const {
  int d = algebra.canonical_dim();
  Mat m = Mat::Zero(d, d);
  int off = 0;
  for (size_t i = 0; i < block.size(); ++i) {
    int n = algebra.blocks[i];
    m.block(off, off, n, n) = block[i];
    off += n;
  }
  return m;
}

double AlgebraElement::norm() const {
  double v = 0;
  for (const auto& b : block) v = std::max(v, op_norm(b));
  return v;
}

Vec AlgebraElement::coords() const {
  Vec c(algebra.dim());
  int k = 0;
  for (int i = 0; i < algebra.num_blocks(); ++i)
    for (int p = 0; p < algebra.blocks[i]; ++p)
      for (int q = 0; q < algebra.blocks[i]; ++q) c[k++] = block[i](p, q);
  return c;
}

bool AlgebraElement::is_zero(double tol) const { return norm() <= tol; }

std::vector<AlgebraElement> standard_generators(const MultiMatrixAlgebra& a) {
  std::vector<AlgebraElement> gens;
  gens.reserve(a.dim());
  for (int g = 0; g < a.dim(); ++g) gens.push_back(AlgebraElement::generator(a, g));
  return gens;
}

AlgebraMap AlgebraMap::identity(const MultiMatrixAlgebra& a) {
  return {a, a, standard_generators(a)};
}

AlgebraElement AlgebraMap::apply(const AlgebraElement& x) const {
  check_same(domain, x.algebra);
  Vec c = x.coords();
  AlgebraElement y = AlgebraElement::zero(codomain);
  for (int g = 0; g < domain.dim(); ++g) {
    if (c[g] == cplx(0)) continue;
    y = y + images[g] * c[g];
  }
  return y;
}

double AlgebraMap::hom_defect() const {
  double worst = 0;
  // star law
  for (int g = 0; g < domain.dim(); ++g) {
    auto gi = domain.gen_index(g);
    int gstar = domain.flat_index(gi.block, gi.q, gi.p);
    worst = std::max(worst, (images[g].adjoint() - images[gstar]).norm());
  }
  // multiplicativity on matrix units
  for (int g = 0; g < domain.dim(); ++g) {
    auto gi = domain.gen_index(g);
    for (int h = 0; h < domain.dim(); ++h) {
      auto hi = domain.gen_index(h);
      AlgebraElement prod = images[g] * images[h];
      if (gi.block == hi.block && gi.q == hi.p) {
        int k = domain.flat_index(gi.block, gi.p, hi.q);
        worst = std::max(worst, (prod - images[k]).norm());
      } else {
        worst = std::max(worst, prod.norm());
      }
    }
  }
  // unit law
  AlgebraElement u = apply(AlgebraElement::identity(domain));
  worst = std::max(worst, (u - AlgebraElement::identity(codomain)).norm());
  return worst;
}

bool AlgebraMap::is_injective(const Tolerance& tol) const {
  Mat m(codomain.dim(), domain.dim());
  for (int g = 0; g < domain.dim(); ++g) m.col(g) = images[g].coords();
  return numerical_rank(m, tol) == domain.dim();
}

double AlgebraMap::choi_min_eigenvalue() const {
  double worst = std::numeric_limits<double>::infinity();
  int cd = codomain.canonical_dim();
  for (int i = 0; i < domain.num_blocks(); ++i) {
    int n = domain.blocks[i];
    Mat choi = Mat::Zero(n * cd, n * cd);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        Mat img = images[domain.flat_index(i, p, q)].block_diag();
        choi.block(p * cd, q * cd, cd, cd) = img;
      }
    Eigen::SelfAdjointEigenSolver<Mat> es((choi + choi.adjoint()) / 2.0);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

double AlgebraMap::unit_norm() const {
  return apply(AlgebraElement::identity(domain)).norm();
}

AlgebraMap AlgebraMap::compose(const AlgebraMap& inner) const {
  if (inner.codomain != domain) throw Error(Err::AlgebraMismatch, "composition mismatch");
  AlgebraMap out{inner.domain, codomain, {}};
  out.images.reserve(inner.domain.dim());
  for (const auto& img : inner.images) out.images.push_back(apply(img));
  return out;
}

Representation Representation::canonical(const MultiMatrixAlgebra& a,
                                         const std::vector<int>& mults) {
  a.validate();
  if (static_cast<int>(mults.size()) != a.num_blocks())
    throw Error(Err::BlockCountMismatch, "one multiplicity per block");
  for (int m : mults)
    if (m < 0) throw Error(Err::BadConfig, "multiplicities must be nonnegative");
  Representation rep;
  rep.algebra = a;
  rep.multiplicities = mults;
  rep.space_dim = 0;
  std::vector<int> offsets(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) {
    offsets[i] = rep.space_dim;
    rep.space_dim += a.blocks[i] * mults[i];
  }
  rep.images.reserve(a.dim());
  for (int g = 0; g < a.dim(); ++g) {
    auto gi = a.gen_index(g);
    Mat img = Mat::Zero(rep.space_dim, rep.space_dim);
    int m = mults[gi.block];
    if (m > 0) {
      Mat unit = Mat::Zero(a.blocks[gi.block], a.blocks[gi.block]);
      unit(gi.p, gi.q) = 1.0;
      int sz = a.blocks[gi.block] * m;
      img.block(offsets[gi.block], offsets[gi.block], sz, sz) = kron(unit, Mat::Identity(m, m));
    }
    rep.images.push_back(std::move(img));
  }
  return rep;
}

Mat Representation::apply(const AlgebraElement& x) const {
  check_same(algebra, x.algebra);
  Mat out = Mat::Zero(space_dim, space_dim);
  Vec c = x.coords();
  for (int g = 0; g < algebra.dim(); ++g) {
    if (c[g] == cplx(0)) continue;
    out += c[g] * images[g];
  }
  return out;
}

bool Representation::faithful() const {
  for (int m : multiplicities)
    if (m < 1) return false;
  return true;
}

double Representation::hom_defect() const {
  double worst = 0;
  for (int g = 0; g < algebra.dim(); ++g) {
    auto gi = algebra.gen_index(g);
    int gstar = algebra.flat_index(gi.block, gi.q, gi.p);
    worst = std::max(worst, op_norm(images[g].adjoint() - images[gstar]));
    for (int h = 0; h < algebra.dim(); ++h) {
      auto hi = algebra.gen_index(h);
      Mat prod = images[g] * images[h];
      if (gi.block == hi.block && gi.q == hi.p)
        prod -= images[algebra.flat_index(gi.block, gi.p, hi.q)];
      worst = std::max(worst, op_norm(prod));
    }
  }
  Mat unit = Mat::Zero(space_dim, space_dim);
  for (int i = 0; i < algebra.num_blocks(); ++i)
    for (int p = 0; p < algebra.blocks[i]; ++p) unit += images[algebra.flat_index(i, p, p)];
  worst = std::max(worst, op_norm(unit - Mat::Identity(space_dim, space_dim)));
  return worst;
}

Representation Representation::from_images(const MultiMatrixAlgebra& a, std::vector<Mat> images,
                                           const Tolerance& tol) {
  a.validate();
  if (static_cast<int>(images.size()) != a.dim())
    throw Error(Err::ShapeMismatch, "one image per generator");
  int h = images.empty() ? 0 : static_cast<int>(images[0].rows());
  for (const auto& m : images)
    if (m.rows() != h || m.cols() != h) throw Error(Err::ShapeMismatch, "images must be square");
  Representation rep;
  rep.algebra = a;
  rep.space_dim = h;
  rep.images = std::move(images);
  double defect = rep.hom_defect();
  if (defect > tol.eps_eq * std::max(1.0, static_cast<double>(h)))
    throw Error(Err::NotHomomorphism, "representation laws fail, defect " + std::to_string(defect));
  rep.multiplicities.resize(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) {
    double tr = rep.images[a.flat_index(i, 0, 0)].trace().real();
    int m = static_cast<int>(std::lround(tr));
    if (std::abs(tr - m) > 1e-6 || m < 0)
      throw Error(Err::NonIntegralMultiplicity, "trace of a minimal projection is not integral");
    rep.multiplicities[i] = m;
  }
  return rep;
}

Mat Representation::central_projection(int blk) const {
  return apply(AlgebraElement::central_projection(algebra, blk));
}

Representation direct_sum(const Representation& a, const Representation& b) {
  check_same(a.algebra, b.algebra);
  Representation rep;
  rep.algebra = a.algebra;
  rep.space_dim = a.space_dim + b.space_dim;
  rep.multiplicities.resize(a.multiplicities.size());
  for (size_t i = 0; i < a.multiplicities.size(); ++i)
    rep.multiplicities[i] = a.multiplicities[i] + b.multiplicities[i];
  rep.images.reserve(a.images.size());
  for (size_t g = 0; g < a.images.size(); ++g) {
    Mat img = Mat::Zero(rep.space_dim, rep.space_dim);
    img.topLeftCorner(a.space_dim, a.space_dim) = a.images[g];
    img.bottomRightCorner(b.space_dim, b.space_dim) = b.images[g];
    rep.images.push_back(std::move(img));
  }
  return rep;
}

Representation canonical_faithful(const MultiMatrixAlgebra& a) {
  return Representation::canonical(a, std::vector<int>(a.num_blocks(), 1));
}

Representation restrict_representation(const Representation& rep, const Mat& isometry,
                                       const Tolerance& tol) {
  if (isometry.rows() != rep.space_dim) throw Error(Err::ShapeMismatch, "subspace basis rows");
  Mat proj = isometry * isometry.adjoint();
  Mat id = Mat::Identity(rep.space_dim, rep.space_dim);
  std::vector<Mat> images;
  images.reserve(rep.images.size());
  for (const auto& g : rep.images) {
    double leak = op_norm((id - proj) * (g * isometry));
    if (leak > tol.eps_eq * std::max(1.0, op_norm(g)))
      throw Error(Err::NotInvariant, "subspace is not invariant, leak " + std::to_string(leak));
    images.push_back(isometry.adjoint() * g * isometry);
  }
  return Representation::from_images(rep.algebra, std::move(images), tol);
}

IsotypicDecomposition isotypic_decomposition(const Representation& rep, const Tolerance& tol) {
  IsotypicDecomposition dec;
  int h = rep.space_dim;
  int total = 0;
  for (int i = 0; i < rep.algebra.num_blocks(); ++i) {
    int m = rep.multiplicities[i];
    if (m == 0) continue;
    int n = rep.algebra.blocks[i];
    Mat p00 = rep.images[rep.algebra.flat_index(i, 0, 0)];
    Mat basis = range_basis(p00, tol);
    if (basis.cols() != m)
      throw Error(Err::NonIntegralMultiplicity, "projection rank disagrees with multiplicity");
    Mat frame(h, n * m);
    for (int p = 0; p < n; ++p) {
      const Mat& shift = rep.images[rep.algebra.flat_index(i, p, 0)];
      frame.middleCols(p * m, m) = shift * basis;
    }
    dec.source_block.push_back(i);
    dec.frames.push_back(std::move(frame));
    total += n * m;
  }
  dec.unitary = Mat(h, total);
  int off = 0;
  for (const auto& f : dec.frames) {
    dec.unitary.middleCols(off, f.cols()) = f;
    off += static_cast<int>(f.cols());
  }
  if (total != h) throw Error(Err::NotHomomorphism, "representation is not unital");
  double udef = op_norm(dec.unitary.adjoint() * dec.unitary - Mat::Identity(total, total));
  if (udef > 1e-8) throw Error(Err::NotHomomorphism, "isotypic frame is not orthonormal");
  return dec;
}

CommutantInfo commutant(const Representation& rep, const Tolerance& tol) {
  IsotypicDecomposition dec = isotypic_decomposition(rep, tol);
  CommutantInfo info;
  info.source_block = dec.source_block;
  for (int i : dec.source_block) info.algebra.blocks.push_back(rep.multiplicities[i]);
  info.algebra.validate();

  Representation crep;
  crep.algebra = info.algebra;
  crep.space_dim = rep.space_dim;
  for (int i : dec.source_block) crep.multiplicities.push_back(rep.algebra.blocks[i]);
  crep.images.reserve(info.algebra.dim());
  for (size_t k = 0; k < dec.source_block.size(); ++k) {
    int i = dec.source_block[k];
    int n = rep.algebra.blocks[i];
    int m = rep.multiplicities[i];
    const Mat& frame = dec.frames[k];
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) {
        // image of the commutant unit f_{rs}: sum over p of w_{p,r} w_{p,s}^*
        Mat img = Mat::Zero(rep.space_dim, rep.space_dim);
        for (int p = 0; p < n; ++p)
          img += frame.col(p * m + r) * frame.col(p * m + s).adjoint();
        crep.images.push_back(std::move(img));
      }
  }
  info.rep = std::move(crep);
  return info;
}

std::pair<AlgebraElement, double> abstract_coords(const Representation& rep, const Mat& x) {
  if (x.rows() != rep.space_dim || x.cols() != rep.space_dim)
    throw Error(Err::ShapeMismatch, "operator size");
  int g = rep.algebra.dim();
  Mat m(rep.space_dim * rep.space_dim, g);
  for (int k = 0; k < g; ++k) m.col(k) = vec(rep.images[k]);
  Vec rhs = vec(x);
  Vec z = m.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  double residual = (m * z - rhs).norm();
  return {AlgebraElement::from_coords(rep.algebra, z), residual};
}

AlgebraElement element_from_canonical(const MultiMatrixAlgebra& a, const Mat& m,
                                      double* offblock_defect) {
  int d = a.canonical_dim();
  if (m.rows() != d || m.cols() != d) throw Error(Err::ShapeMismatch, "canonical image size");
  AlgebraElement x = AlgebraElement::zero(a);
  int off = 0;
  for (int i = 0; i < a.num_blocks(); ++i) {
    int n = a.blocks[i];
    x.block[i] = m.block(off, off, n, n);
    off += n;
  }
  if (offblock_defect) *offblock_defect = op_norm(m - x.block_diag());
  return x;
}

AlgebraMap permutation_automorphism(const MultiMatrixAlgebra& a, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != a.num_blocks())
    throw Error(Err::BlockCountMismatch, "permutation length");
  for (int i = 0; i < a.num_blocks(); ++i)
    if (a.blocks[perm[i]] != a.blocks[i])
      throw Error(Err::BadConfig, "permutation must preserve block sizes");
  AlgebraMap map{a, a, {}};
  map.images.reserve(a.dim());
  for (int g = 0; g < a.dim(); ++g) {
    auto gi = a.gen_index(g);
    map.images.push_back(
        AlgebraElement::generator(a, a.flat_index(perm[gi.block], gi.p, gi.q)));
  }
  return map;
}

AlgebraMap random_automorphism(const MultiMatrixAlgebra& a, Rng& rng) {
  a.validate();
  int nb = a.num_blocks();
  // permutation among blocks of equal size
  std::vector<int> perm(nb);
  for (int i = 0; i < nb; ++i) perm[i] = i;
  for (int i = nb - 1; i > 0; --i) {
    int j = rng.integer(0, i);
    if (a.blocks[perm[i]] == a.blocks[perm[j]]) std::swap(perm[i], perm[j]);
  }
  std::vector<Mat> conj(nb);
  for (int i = 0; i < nb; ++i) conj[i] = rng.unitary(a.blocks[i]);
  AlgebraMap map{a, a, {}};
  map.images.reserve(a.dim());
  for (int g = 0; g < a.dim(); ++g) {
    auto gi = a.gen_index(g);
    int j = perm[gi.block];
    Mat unit = Mat::Zero(a.blocks[gi.block], a.blocks[gi.block]);
    unit(gi.p, gi.q) = 1.0;
    AlgebraElement img = AlgebraElement::zero(a);
    img.block[j] = conj[j] * unit * conj[j].adjoint();
    map.images.push_back(std::move(img));
  }
  return map;
}

AlgebraMap random_cp_map(const MultiMatrixAlgebra& a, Rng& rng) {
  a.validate();
  int nb = a.num_blocks();
  // Kraus operators between pairs of blocks, then a contraction rescale
  std::vector<std::vector<std::vector<Mat>>> kraus(nb, std::vector<std::vector<Mat>>(nb));
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      int count = rng.integer(0, 2);
      for (int l = 0; l < count; ++l) kraus[i][j].push_back(rng.ginibre(a.blocks[j], a.blocks[i]));
    }
  // keep the map nonzero
  kraus[0][0].push_back(rng.ginibre(a.blocks[0], a.blocks[0]));

  auto apply_blocks = [&](const AlgebraElement& x) {
    AlgebraElement y = AlgebraElement::zero(a);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        for (const auto& k : kraus[i][j]) y.block[j] += k * x.block[i] * k.adjoint();
    return y;
  };
  double unit = apply_blocks(AlgebraElement::identity(a)).norm();
  double scale = 1.0 / std::sqrt(unit * 1.02);
  for (auto& row : kraus)
    for (auto& cell : row)
      for (auto& k : cell) k *= scale;

  AlgebraMap map{a, a, {}};
  map.images.reserve(a.dim());
  for (int g = 0; g < a.dim(); ++g)
    map.images.push_back(apply_blocks(AlgebraElement::generator(a, g)));
  return map;
}

}  // namespace corrlab
