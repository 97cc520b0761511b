#include "corrlab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <numeric>
#include <sstream>

#include "corrlab/dilation.hpp"
#include "corrlab/fock.hpp"
#include "corrlab/model.hpp"
#include "corrlab/morita.hpp"
#include "json.hpp"

namespace corrlab {

namespace {

using json = nlohmann::ordered_json;

// pinned acceptance gates, one per family of laws
constexpr double kAxiomGate = 1e-10;
constexpr double kDualityGate = 1e-8;
constexpr double kLemmaGate = 1e-8;
constexpr double kDilationGate = 1e-10;
constexpr double kCommutantGate = 1e-9;
constexpr double kSpanGate = 1e-6;
constexpr double kModelGate = 1e-7;
constexpr double kMoritaGate = 1e-6;

std::string show(const IMat& m) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

std::string show(const std::vector<int>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

void add_check(InstanceResult& out, std::string name, std::string anchor,
               double defect, bool passed, std::string levels = "") {
  out.checks.push_back({std::move(name), std::move(anchor), defect,
                        std::move(levels), passed});
}

MultiMatrixAlgebra random_algebra(Rng& rng, const InstanceCaps& caps) {
  int k = rng.integer(1, caps.max_blocks);
  std::vector<int> blocks(k);
  for (int& b : blocks) b = rng.integer(1, caps.max_block_size);
  return MultiMatrixAlgebra{blocks};
}

IMat random_counts(Rng& rng, int k, int emax) {
  IMat c(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c(i, j) = rng.integer(0, emax);
  if (c.cwiseAbs().sum() == 0) c(0, 0) = 1;
  return c;
}

// Mixes a random completely positive map with the normalized block trace map.
// The mix keeps every Choi matrix bounded away from the rank boundary, so the
// rank decisions made while solving for duals stay well posed.
AlgebraMap conditioned_cp_map(const MultiMatrixAlgebra& a, Rng& rng) {
  AlgebraMap theta = random_cp_map(a, rng);
  for (int g = 0; g < a.dim(); ++g) {
    auto gi = a.gen_index(g);
    if (gi.p == gi.q) {
      AlgebraElement pb = AlgebraElement::central_projection(a, gi.block);
      theta.images[g] = theta.images[g] + pb * cplx(0.5 / a.blocks[gi.block], 0);
    }
  }
  return theta;
}

Representation random_faithful(Rng& rng, const MultiMatrixAlgebra& a,
                               const InstanceCaps& caps) {
  std::vector<int> mults(a.num_blocks());
  for (int& m : mults) m = rng.integer(1, caps.max_multiplicity);
  return Representation::canonical(a, mults);
}

MultiMatrixAlgebra points(int k) {
  return MultiMatrixAlgebra{std::vector<int>(k, 1)};
}

// action matrix with strictly lower triangular letter blocks: every word of
// length >= the space dimension vanishes, so the pair is pure by nilpotency
Mat nilpotent_action(Rng& rng, int h, int letters, double norm) {
  Mat t(h, letters * h);
  for (int i = 0; i < letters; ++i) {
    Mat a = rng.ginibre(h, h);
    t.middleCols(i * h, h) = Mat(a.triangularView<Eigen::StrictlyLower>());
  }
  double s = op_norm(t);
  if (s > 0) t *= norm / s;
  return t;
}

CovariantPair scalar_pair(const Mat& ttilde, int letters) {
  IMat c(1, 1);
  c << letters;
  auto e = quiver_correspondence(c);
  auto sigma = Representation::canonical(
      points(1), {static_cast<int>(ttilde.rows())});
  return covariant_pair(e, sigma, ttilde);
}

// the matched relabel of a counts matrix: entry (i, j) moves to (p i, p j)
IMat conjugated_counts(const IMat& a, const std::vector<int>& p) {
  IMat b(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) b(p[i], p[j]) = a(i, j);
  return b;
}

void run_axioms(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  Correspondence e;
  double build_residual = 0;
  switch (idx % 7) {
    case 0: {
      auto a = random_algebra(rng, cfg.caps);
      e = identity_correspondence(a);
      out.descriptor = "identity module over blocks " + show(a.blocks);
      break;
    }
    case 1: {
      auto a = random_algebra(rng, cfg.caps);
      e = endomorphism_correspondence(random_automorphism(a, rng));
      out.descriptor = "twisted module over blocks " + show(a.blocks);
      break;
    }
    case 2: {
      auto a = random_algebra(rng, cfg.caps);
      e = gns_correspondence(random_cp_map(a, rng), tol);
      out.descriptor = "positive map module over blocks " + show(a.blocks);
      break;
    }
    case 3: {
      int k = rng.integer(1, cfg.caps.max_blocks);
      IMat c = random_counts(rng, k, cfg.caps.max_quiver_entry);
      e = quiver_correspondence(c);
      out.descriptor = "arrow module with counts " + show(c);
      break;
    }
    case 4: {
      int k = rng.integer(1, cfg.caps.max_blocks);
      IMat c1 = random_counts(rng, k, cfg.caps.max_quiver_entry);
      IMat c2 = random_counts(rng, k, cfg.caps.max_quiver_entry);
      e = direct_sum(quiver_correspondence(c1), quiver_correspondence(c2));
      out.descriptor = "direct sum of counts " + show(c1) + " and " + show(c2);
      break;
    }
    case 5: {
      int k = rng.integer(1, cfg.caps.max_blocks);
      IMat c1 = random_counts(rng, k, cfg.caps.max_quiver_entry);
      IMat c2 = random_counts(rng, k, cfg.caps.max_quiver_entry);
      e = tensor(quiver_correspondence(c1), quiver_correspondence(c2), tol).product;
      out.descriptor = "tensor of counts " + show(c1) + " and " + show(c2);
      break;
    }
    default: {
      int k = rng.integer(1, cfg.caps.max_blocks);
      IMat c = random_counts(rng, k, cfg.caps.max_quiver_entry);
      auto s = random_faithful(rng, points(k), cfg.caps);
      auto d = dual(quiver_correspondence(c), s, s, tol);
      e = d.corr;
      build_residual = d.residual;
      out.descriptor = "dual of counts " + show(c) + " at multiplicities " +
                       show(s.multiplicities);
      break;
    }
  }
  CorrespondenceReport rep = e.validate(tol);
  double worst = std::max(rep.worst(), build_residual);
  add_check(out, "module laws",
            "the left action is a unital homomorphism, the pairing is right "
            "linear and positive, and both actions respect adjoints",
            worst, worst <= kAxiomGate);
}

void run_duality(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  Correspondence e;
  switch (idx % 3) {
    case 0: {
      int k = rng.integer(1, cfg.caps.max_blocks);
      IMat c = random_counts(rng, k, cfg.caps.max_quiver_entry);
      e = quiver_correspondence(c);
      out.descriptor = "arrow module with counts " + show(c);
      break;
    }
    case 1: {
      auto a = random_algebra(rng, cfg.caps);
      e = endomorphism_correspondence(random_automorphism(a, rng));
      out.descriptor = "twisted module over blocks " + show(a.blocks);
      break;
    }
    default: {
      auto a = random_algebra(rng, cfg.caps);
      e = gns_correspondence(conditioned_cp_map(a, rng), tol);
      out.descriptor = "positive map module over blocks " + show(a.blocks);
      break;
    }
  }
  auto sigma = random_faithful(rng, e.left_alg, cfg.caps);
  auto tau = random_faithful(rng, e.right_alg, cfg.caps);
  out.descriptor += " at multiplicities " + show(sigma.multiplicities) + " / " +
                    show(tau.multiplicities);
  DualityReport rep = verify_duality(e, sigma, tau, tol);
  add_check(out, "corner count",
            "the dual dimension equals the corner counts weighted by both "
            "multiplicities",
            std::abs(rep.dual_dim - rep.expected_dual_dim),
            rep.dual_dim == rep.expected_dual_dim);
  add_check(out, "double dual dimension",
            "the dual of the dual has the dimension of the module",
            std::abs(rep.double_dual_dim - rep.module_dim),
            rep.double_dual_dim == rep.module_dim);
  double worst = std::max({rep.intertwiner_defect, rep.covariance_defect,
                           rep.inner_defect});
  add_check(out, "canonical realization",
            "the canonical map onto the double dual is a bijective "
            "correspondence morphism preserving the pairing",
            worst, rep.pass(kDualityGate) && worst <= kDualityGate);
}

void run_span(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int) {
  const Tolerance& tol = cfg.tolerance;
  int k = rng.integer(1, cfg.caps.max_blocks);
  IMat c = random_counts(rng, k, cfg.caps.max_quiver_entry);
  Correspondence e = quiver_correspondence(c);
  auto sigma = random_faithful(rng, e.left_alg, cfg.caps);
  auto tau = random_faithful(rng, e.right_alg, cfg.caps);
  out.descriptor = "arrow module with counts " + show(c) + " at multiplicities " +
                   show(sigma.multiplicities) + " / " + show(tau.multiplicities);
  SpanReport rep = verify_span(e, sigma, tau, tol);
  add_check(out, "evaluation span",
            "evaluations of the dual fill the localized module",
            std::abs(rep.induced_dim - rep.span_rank), rep.pass());
}

void run_sum(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int) {
  const Tolerance& tol = cfg.tolerance;
  int k = rng.integer(1, cfg.caps.max_blocks);
  IMat c1 = random_counts(rng, k, cfg.caps.max_quiver_entry);
  IMat c2 = random_counts(rng, k, cfg.caps.max_quiver_entry);
  auto sigma = random_faithful(rng, points(k), cfg.caps);
  auto tau = random_faithful(rng, points(k), cfg.caps);
  out.descriptor = "sum of counts " + show(c1) + " and " + show(c2) +
                   " at multiplicities " + show(sigma.multiplicities) + " / " +
                   show(tau.multiplicities);
  DualSumReport rep = verify_dual_sum(quiver_correspondence(c1),
                                      quiver_correspondence(c2), sigma, tau, tol);
  add_check(out, "dual of a sum",
            "the dual of a direct sum is the direct sum of the duals",
            rep.iso_defect, rep.pass(kLemmaGate));
}

void run_tensor(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int) {
  const Tolerance& tol = cfg.tolerance;
  int k = rng.integer(1, cfg.caps.max_blocks);
  IMat c1 = random_counts(rng, k, cfg.caps.max_quiver_entry);
  IMat c2 = random_counts(rng, k, cfg.caps.max_quiver_entry);
  auto sigma = random_faithful(rng, points(k), cfg.caps);
  auto tau = random_faithful(rng, points(k), cfg.caps);
  auto pi = random_faithful(rng, points(k), cfg.caps);
  out.descriptor = "tensor of counts " + show(c1) + " and " + show(c2) +
                   " at multiplicities " + show(sigma.multiplicities) + " / " +
                   show(tau.multiplicities) + " / " + show(pi.multiplicities);
  DualTensorReport rep = verify_dual_tensor(
      quiver_correspondence(c1), quiver_correspondence(c2), sigma, tau, pi, tol);
  add_check(out, "dual of a tensor",
            "composing duals against the middle representation realizes the "
            "dual of the tensor product",
            rep.worst(), rep.pass(kLemmaGate));
}

void run_quiver(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int) {
  const Tolerance& tol = cfg.tolerance;
  int k = rng.integer(1, cfg.caps.max_blocks);
  IMat c = random_counts(rng, k, cfg.caps.max_quiver_entry);
  out.descriptor = "arrow module with counts " + show(c);
  Correspondence e = quiver_correspondence(c);
  auto s = canonical_faithful(e.right_alg);
  auto d = dual(e, s, s, tol);
  IMat got = multiplicity_matrix(d.corr, tol);
  double diff = (got - IMat(c.transpose())).cwiseAbs().maxCoeff();
  add_check(out, "transposed counts",
            "the dual of an arrow module is the arrow module of the "
            "transposed counts",
            diff, diff == 0);
  add_check(out, "construction residual",
            "the dual basis solves the intertwining equations",
            d.residual, d.residual <= kAxiomGate);
}

void run_commutant(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  Correspondence e;
  switch (idx % 3) {
    case 0:
      e = identity_correspondence(points(1));
      out.descriptor = "identity module over the scalars";
      break;
    case 1:
      e = identity_correspondence(points(2));
      out.descriptor = "identity module over two abelian blocks";
      break;
    default: {
      IMat c = random_counts(rng, 2, 1);
      e = quiver_correspondence(c);
      out.descriptor = "arrow module with counts " + show(c);
      break;
    }
  }
  auto sigma = canonical_faithful(e.right_alg);
  CommutantReport rep = verify_commutant(e, sigma, cfg.depth, tol);
  std::string window = "0.." + std::to_string(cfg.depth);
  add_check(out, "level pairing",
            "the dual levels pair unitarily with the base levels, "
            "consistently with creations",
            std::max(rep.unitary_defect, rep.recursion_defect),
            std::max(rep.unitary_defect, rep.recursion_defect) <= kCommutantGate,
            window);
  add_check(out, "interior commutation",
            "conjugated dual generators commute with the base generators on "
            "certified levels",
            rep.commutation_defect, rep.commutation_defect <= kCommutantGate,
            window + " interior");
  double span = std::max(rep.commutant_span_distance, rep.bicommutant_span_distance);
  add_check(out, "mutual commutants",
            "each side's commutant coincides with the other side's word span",
            span, rep.pass(kCommutantGate, kSpanGate), window);
}

void run_dilation(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  CovariantPair p = [&] {
    if (idx % 2 == 0) {
      int letters = rng.integer(1, 2), h = rng.integer(2, 3);
      IMat c(1, 1);
      c << letters;
      auto e = quiver_correspondence(c);
      auto sigma = Representation::canonical(points(1), {h});
      Localization loc = localize(e, sigma, tol);
      Mat eta = rng.ginibre(loc.dim, h);
      double norm = rng.real(0.4, 0.9);
      out.descriptor = std::to_string(letters) +
                       " letter module over the scalars, space " +
                       std::to_string(h) + ", contraction norm " +
                       std::to_string(norm);
      return pair_from_eta(e, sigma, eta, norm / op_norm(eta), tol);
    }
    IMat c = random_counts(rng, 2, 1);
    auto e = quiver_correspondence(c);
    auto sigma = random_faithful(rng, e.right_alg, cfg.caps);
    auto df = dual(e, sigma, sigma, tol);
    Vec v = rng.gauss_vec(df.corr.dim);
    Mat eta = df.realize(v);
    double norm = rng.real(0.4, 0.9);
    out.descriptor = "arrow module with counts " + show(c) +
                     " at multiplicities " + show(sigma.multiplicities) +
                     ", contraction norm " + std::to_string(norm);
    return pair_from_eta(e, sigma, eta, norm / op_norm(eta), tol);
  }();
  DilationData d = dilate(p, cfg.depth, tol);
  DilationReport rep = verify_dilation(d, tol);
  std::string window = "0.." + std::to_string(cfg.depth) + " interior";
  add_check(out, "dilated pairing",
            "the dilated maps of module vectors multiply to the represented "
            "pairing", rep.isometry_defect,
            rep.isometry_defect <= kDilationGate, window);
  add_check(out, "covariance",
            "the dilated action intertwines the algebra representation",
            rep.covariance_defect, rep.covariance_defect <= kDilationGate, window);
  add_check(out, "compression",
            "compressing the dilation to the base space recovers the pair",
            rep.compression_defect, rep.compression_defect <= kDilationGate);
  add_check(out, "wandering structure",
            "the defect spaces are wandering and carry the expected word "
            "orthogonality",
            std::max({rep.q0_defect, rep.q0_invariance, rep.u_defect,
                      rep.d_wandering}),
            rep.pass(kDilationGate));
  add_check(out, "minimality", "the dilation space is reached by the words",
            static_cast<double>(rep.minimality_gap), rep.minimality_gap == 0);
}

void run_classify(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  switch (idx % 3) {
    case 0: {
      int h = rng.integer(2, 3), letters = rng.integer(1, 2);
      double norm = rng.real(0.5, 0.9);
      auto p = scalar_pair(nilpotent_action(rng, h, letters, norm), letters);
      out.descriptor = "nilpotent strict contraction, space " +
                       std::to_string(h) + ", norm " + std::to_string(norm);
      auto c = classify(p, cfg.depth, tol);
      add_check(out, "pure class",
                "iterated action norms decay, so the pair is pure",
                c.label == PairClass::CDotZero ? 0.0 : 1.0,
                c.label == PairClass::CDotZero && c.decay_certified);
      break;
    }
    case 1: {
      auto p = scalar_pair(rng.unitary(2), 1);
      out.descriptor = "unitary action on a two dimensional space";
      auto c = classify(p, cfg.depth, tol);
      add_check(out, "no defect class",
                "a unitary action generates no wandering vectors and never "
                "decays",
                c.label == PairClass::Neither ? 0.0 : 1.0,
                c.label == PairClass::Neither && c.span_rank == 0);
      break;
    }
    default: {
      Mat t = Mat::Zero(2, 2);
      t(0, 1) = 1.0;
      auto p = scalar_pair(t, 1);
      out.descriptor = "nilpotent action of norm one";
      auto c = classify(p, cfg.depth, tol);
      add_check(out, "pure at the boundary",
                "nilpotency certifies decay even at norm one",
                c.label == PairClass::CDotZero ? 0.0 : 1.0,
                c.label == PairClass::CDotZero && c.decay_certified);
      break;
    }
  }
}

CovariantPair model_family_pair(Rng& rng, int idx, std::string& desc) {
  if (idx % 4 == 0) {
    desc = "zero action on the scalars";
    return scalar_pair(Mat::Zero(1, 1), 1);
  }
  int h = rng.integer(2, 3), letters = rng.integer(1, 2);
  double norm = rng.real(0.5, 0.9);
  desc = "nilpotent strict contraction, space " + std::to_string(h) +
         ", letters " + std::to_string(letters) + ", norm " +
         std::to_string(norm);
  return scalar_pair(nilpotent_action(rng, h, letters, norm), letters);
}

void run_charfn(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  CovariantPair p = model_family_pair(rng, idx, out.descriptor);
  CharacteristicFunction th = characteristic_of(p, cfg.depth, tol);
  CharFnReport rep = check_charfn(th, tol);
  add_check(out, "coefficient covariance",
            "the matrix intertwines the two coefficient actions",
            rep.covariance_defect, rep.covariance_defect <= kCommutantGate);
  add_check(out, "analyticity",
            "the matrix commutes with every creation",
            rep.analyticity_defect, rep.analyticity_defect <= kCommutantGate);
  add_check(out, "contractive values",
            "the constant coefficient of the symbol is contractive",
            std::max(0.0, -rep.contractive_margin),
            rep.contractive_margin >= -1e-12);
  bool pure = classify(p, cfg.depth, tol).label == PairClass::CDotZero;
  add_check(out, "purity agreement",
            "the function is inner exactly when the pair is pure",
            rep.inner == pure ? 0.0 : 1.0, rep.inner == pure);
  if (rep.inner)
    add_check(out, "certified isometry",
              "on certified levels the function is an isometry",
              rep.inner_defect, rep.inner_defect <= kCommutantGate,
              "certified window");
}

void run_roundtrip(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  CovariantPair p = model_family_pair(rng, idx, out.descriptor);
  ModelRoundTrip r1 = roundtrip_model(p, cfg.depth, tol);
  add_check(out, "model compression",
            "the canonical model pair compresses back to the original pair "
            "up to unitary equivalence",
            r1.worst(), r1.pass(kModelGate));
  CharacteristicFunction th = characteristic_of(p, cfg.depth, tol);
  CharRoundTrip r2 = roundtrip_char(th, tol);
  add_check(out, "function coincidence",
            "the function rebuilt from the model pair coincides with the "
            "original after fiber unitaries",
            r2.worst(), r2.pass(kModelGate));
}

void run_morita(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  int k = std::max(1, std::min(2, cfg.caps.max_blocks));
  int emax = std::max(1, std::min(2, cfg.caps.max_quiver_entry));
  IMat a = random_counts(rng, k, emax);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.eng);
  if (idx % 2 == 0) {
    IMat b = conjugated_counts(a, perm);
    out.descriptor = "counts " + show(a) + " against relabeled counts " +
                     show(b);
    auto w = are_morita_equivalent(quiver_correspondence(a),
                                   quiver_correspondence(b), tol);
    add_check(out, "bimodule found",
              "a block bijection conjugates the multiplicity matrices",
              w ? 0.0 : 1.0, w.has_value());
    add_check(out, "tensor balance",
              "tensoring with the bimodule carries one module onto the other",
              w ? w->iso.defect : 1.0, w && w->iso.defect <= kMoritaGate);
  } else {
    IMat b = conjugated_counts(a, perm);
    b(0, 0) += 1;  // total arrow count is preserved by every bijection
    out.descriptor = "counts " + show(a) + " against inflated counts " +
                     show(b);
    auto w = are_morita_equivalent(quiver_correspondence(a),
                                   quiver_correspondence(b), tol);
    add_check(out, "no bimodule",
              "no block bijection conjugates the multiplicity matrices",
              w ? 1.0 : 0.0, !w.has_value());
  }
}

void run_diffduals(InstanceResult& out, Rng& rng, const SuiteConfig& cfg, int idx) {
  const Tolerance& tol = cfg.tolerance;
  int k = std::max(1, std::min(2, cfg.caps.max_blocks));
  int emax = std::max(1, std::min(2, cfg.caps.max_quiver_entry));
  IMat a = random_counts(rng, k, emax);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.eng);
  IMat b = conjugated_counts(a, perm);
  bool positive = idx % 2 == 0;
  if (!positive) b(0, 0) += 1;
  out.descriptor = "counts " + show(a) + " against " +
                   (positive ? "relabeled" : "inflated") + " counts " + show(b);
  DiffdualsReport rep = verify_diffduals(quiver_correspondence(a),
                                         quiver_correspondence(b), tol);
  add_check(out, "agreement",
            "shared dual source, bimodule balance, and matched duals hold or "
            "fail together",
            rep.consistent() ? 0.0 : 1.0, rep.consistent());
  if (positive)
    add_check(out, "constructed witnesses",
              "every formulation is realized by an explicit map below the gate",
              rep.worst(), rep.cond_bimodule && rep.pass(kMoritaGate));
  else
    add_check(out, "recorded obstruction",
              "a preserved invariant separates the modules",
              rep.cond_bimodule ? 1.0 : 0.0,
              !rep.cond_bimodule && !rep.obstruction.empty());
}

using SuiteFn = void (*)(InstanceResult&, Rng&, const SuiteConfig&, int);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"axioms", run_axioms},       {"duality", run_duality},
      {"span", run_span},           {"sum", run_sum},
      {"tensor", run_tensor},       {"quiver", run_quiver},
      {"commutant", run_commutant}, {"dilation", run_dilation},
      {"classify", run_classify},   {"charfn", run_charfn},
      {"roundtrip", run_roundtrip}, {"morita", run_morita},
      {"diffduals", run_diffduals}};
  return table;
}

bool needs_depth(const std::string& s) {
  return s == "dilation" || s == "classify" || s == "charfn" || s == "roundtrip";
}

json tolerance_json(const Tolerance& t) {
  return json{{"eps_rank", t.eps_rank}, {"eps_eq", t.eps_eq}, {"eps_psd", t.eps_psd}};
}

json config_json(const SuiteConfig& c) {
  return json{{"seed", c.seed},
              {"depth", c.depth},
              {"tolerance", tolerance_json(c.tolerance)},
              {"suites", c.suites},
              {"instances_per_suite", c.instances_per_suite},
              {"caps",
               json{{"max_blocks", c.caps.max_blocks},
                    {"max_block_size", c.caps.max_block_size},
                    {"max_multiplicity", c.caps.max_multiplicity},
                    {"max_quiver_entry", c.caps.max_quiver_entry}}}};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suite_table()) out.push_back(name);
    return out;
  }();
  return names;
}

Report run_suites(const SuiteConfig& cfg) {
  std::vector<std::string> wanted =
      cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& name : wanted) {
    bool known = false;
    for (const auto& [n, fn] : suite_table()) known = known || n == name;
    if (!known) throw Error(Err::UnknownSuite, "run_suites: " + name);
  }
  if (cfg.instances_per_suite < 0)
    throw Error(Err::BadConfig, "run_suites: negative instance count");
  if (cfg.caps.max_blocks < 1 || cfg.caps.max_block_size < 1 ||
      cfg.caps.max_multiplicity < 1 || cfg.caps.max_quiver_entry < 1)
    throw Error(Err::BadConfig, "run_suites: caps must be at least one");
  if (cfg.depth < 1) throw Error(Err::BadConfig, "run_suites: depth must be positive");
  for (const auto& name : wanted)
    if (cfg.depth < 2 && needs_depth(name))
      throw Error(Err::BadConfig,
                  "run_suites: suite " + name + " requires depth >= 2");

  auto t0 = std::chrono::steady_clock::now();
  Report report;
  report.config = cfg;
  report.config.suites = wanted;
  Rng master(cfg.seed);

  for (const auto& name : wanted) {
    SuiteFn fn = nullptr;
    for (const auto& [n, f] : suite_table())
      if (n == name) fn = f;
    SuiteResult sr;
    sr.suite = name;
    for (int idx = 0; idx < cfg.instances_per_suite; ++idx) {
      std::uint64_t iseed = master.eng();
      Rng rng(iseed);
      InstanceResult ir;
      ir.descriptor = "instance " + std::to_string(idx);
      try {
        fn(ir, rng, cfg, idx);
      } catch (const Error& err) {
        add_check(ir, "construction", "the instance builds without error", 1.0,
                  false);
        ir.descriptor += std::string(" (error: ") + err.what() + ")";
      }
      sr.instances.push_back(std::move(ir));
    }
    report.suites.push_back(std::move(sr));
  }

  for (const auto& sr : report.suites)
    for (const auto& ir : sr.instances)
      for (const auto& ck : ir.checks)
        (ck.passed ? report.checks_passed : report.checks_failed) += 1;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string report_json(const Report& r) {
  json out;
  out["config"] = config_json(r.config);
  json suites = json::array();
  for (const auto& sr : r.suites) {
    json js;
    js["suite"] = sr.suite;
    json instances = json::array();
    for (const auto& ir : sr.instances) {
      json ji;
      ji["descriptor"] = ir.descriptor;
      json checks = json::array();
      for (const auto& ck : ir.checks) {
        json jc;
        jc["name"] = ck.name;
        jc["anchor"] = ck.anchor;
        jc["defect"] = ck.defect;
        if (!ck.levels.empty()) jc["levels"] = ck.levels;
        jc["pass"] = ck.passed;
        checks.push_back(std::move(jc));
      }
      ji["checks"] = std::move(checks);
      instances.push_back(std::move(ji));
    }
    js["instances"] = std::move(instances);
    suites.push_back(std::move(js));
  }
  out["suites"] = std::move(suites);
  out["summary"] = json{{"checks_passed", r.checks_passed},
                        {"checks_failed", r.checks_failed},
                        {"all_pass", r.all_pass()}};
  std::time_t now = std::time(nullptr);
  char buf[32] = {0};
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out["run_stamp"] = json{{"time", buf}, {"wall_seconds", r.wall_seconds}};
  return out.dump(2) + "\n";
}

std::string report_markdown(const Report& r) {
  std::ostringstream os;
  os << "# verification report\n\n";
  os << "seed " << r.config.seed << ", depth " << r.config.depth
     << ", instances per suite " << r.config.instances_per_suite << "\n";
  for (const auto& sr : r.suites) {
    os << "\n## " << sr.suite << "\n";
    for (const auto& ir : sr.instances) {
      os << "- " << ir.descriptor << "\n";
      for (const auto& ck : ir.checks) {
        os << "  - " << (ck.passed ? "pass" : "FAIL") << " | " << ck.name
           << " | defect " << ck.defect;
        if (!ck.levels.empty()) os << " | levels " << ck.levels;
        os << "\n";
      }
    }
  }
  os << "\n" << r.checks_passed << " checks passed, " << r.checks_failed
     << " failed\n";
  return os.str();
}

namespace {

IMat parse_counts(const json& j) {
  if (!j.is_array() || j.empty())
    throw Error(Err::ParseError, "counts must be a nonempty array of rows");
  int rows = static_cast<int>(j.size());
  int cols = -1;
  for (const auto& row : j) {
    if (!row.is_array())
      throw Error(Err::ParseError, "counts rows must be arrays");
    if (cols < 0) cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != cols || cols == 0)
      throw Error(Err::ParseError, "counts rows must share a positive length");
  }
  IMat c(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const auto& v = j[i][k];
      if (!v.is_number_integer() || v.get<int>() < 0)
        throw Error(Err::ParseError, "counts entries must be nonnegative integers");
      c(i, k) = v.get<int>();
    }
  return c;
}

Mat parse_real_matrix(const json& j) {
  if (!j.is_array() || j.empty())
    throw Error(Err::ParseError, "t must be a nonempty array of rows");
  int rows = static_cast<int>(j.size());
  int cols = -1;
  for (const auto& row : j) {
    if (!row.is_array())
      throw Error(Err::ParseError, "t rows must be arrays");
    if (cols < 0) cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != cols || cols == 0)
      throw Error(Err::ParseError, "t rows must share a positive length");
  }
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const auto& v = j[i][k];
      if (!v.is_number())
        throw Error(Err::ParseError, "t entries must be numbers");
      m(i, k) = v.get<double>();
    }
  return m;
}

}  // namespace

std::string explain_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Err::ParseError, std::string("explain: ") + ex.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(Err::ParseError, "explain: descriptor needs a \"kind\" string");
  std::string kind = j["kind"].get<std::string>();
  int depth = 4;
  if (j.contains("depth")) {
    if (!j["depth"].is_number_integer() || j["depth"].get<int>() < 1)
      throw Error(Err::ParseError, "explain: depth must be a positive integer");
    depth = j["depth"].get<int>();
  }
  std::ostringstream os;
  Tolerance tol;

  if (kind == "quiver") {
    if (!j.contains("counts"))
      throw Error(Err::ParseError, "explain: quiver descriptor needs counts");
    IMat c = parse_counts(j["counts"]);
    if (c.rows() != c.cols())
      throw Error(Err::ParseError, "explain: counts must be square");
    Correspondence e = quiver_correspondence(c);
    os << "arrow module with counts " << show(c) << "\n";
    os << "module dimension " << e.dim << " over " << c.rows()
       << " abelian blocks\n";
    os << "multiplicity matrix " << show(multiplicity_matrix(e, tol)) << "\n";
    auto s = canonical_faithful(e.right_alg);
    auto d = dual(e, s, s, tol);
    os << "dual dimension " << d.corr.dim << ", counts "
       << show(multiplicity_matrix(d.corr, tol)) << "\n";
    auto f = fock(e, depth, tol);
    os << "graded level dimensions through depth " << depth << ":";
    for (int n = 0; n <= depth; ++n) os << " " << f->level_dim(n);
    os << "\n";
    return os.str();
  }

  if (kind == "scalar") {
    if (!j.contains("t"))
      throw Error(Err::ParseError, "explain: scalar descriptor needs t");
    Mat t = parse_real_matrix(j["t"]);
    int h = static_cast<int>(t.rows());
    if (t.cols() % h != 0)
      throw Error(Err::ParseError,
                  "explain: t must have a whole number of square letter blocks");
    int letters = static_cast<int>(t.cols()) / h;
    if (depth == 4 && !j.contains("depth")) depth = 5;
    CovariantPair p = scalar_pair(t, letters);
    os << "scalar pair: " << letters << " letters on a " << h
       << " dimensional space, action norm " << op_norm(t) << "\n";
    Mat defect2 = Mat::Identity(h, h) - t * t.adjoint();
    Mat delta = psd_sqrt(defect2, tol);
    os << "defect operator: norm " << op_norm(delta) << ", rank "
       << numerical_rank(delta, tol) << "\n";
    CharacteristicFunction th = characteristic_of(p, depth, tol);
    os << "symbol degree norms through depth " << depth << ":";
    for (const auto& sm : th.symbol) os << " " << op_norm(sm);
    os << "\n";
    CharFnReport rep = check_charfn(th, tol);
    os << "inner: " << (rep.inner ? "yes" : "no") << ", contractive margin "
       << rep.contractive_margin << "\n";
    return os.str();
  }

  if (kind == "identity") {
    if (!j.contains("blocks") || !j["blocks"].is_array() || j["blocks"].empty())
      throw Error(Err::ParseError, "explain: identity descriptor needs blocks");
    std::vector<int> blocks;
    for (const auto& v : j["blocks"]) {
      if (!v.is_number_integer() || v.get<int>() < 1)
        throw Error(Err::ParseError, "explain: blocks must be positive integers");
      blocks.push_back(v.get<int>());
    }
    MultiMatrixAlgebra a{blocks};
    Correspondence e = identity_correspondence(a);
    os << "identity module over blocks " << show(blocks) << "\n";
    os << "module dimension " << e.dim << "\n";
    os << "multiplicity matrix " << show(multiplicity_matrix(e, tol)) << "\n";
    return os.str();
  }

  throw Error(Err::ParseError, "explain: unknown kind \"" + kind + "\"");
}

}  // namespace corrlab
