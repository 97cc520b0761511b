// Acceptance gate: one check per release criterion, each printing a single
// pass/fail line.  Exit status is zero exactly when every criterion passes.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "corrlab/dilation.hpp"
#include "corrlab/fock.hpp"
#include "corrlab/model.hpp"
#include "corrlab/morita.hpp"
#include "corrlab/suites.hpp"
#include "json.hpp"

using namespace corrlab;

namespace {

struct Outcome {
  bool pass = true;
  double worst = 0;
  std::string note;

  void fold(double defect, bool ok, const std::string& what) {
    worst = std::max(worst, defect);
    if (!ok && pass) {
      pass = false;
      note = what;
    }
  }
};

MultiMatrixAlgebra points(int k) {
  return MultiMatrixAlgebra{std::vector<int>(k, 1)};
}

IMat random_counts(Rng& rng, int k, int emax) {
  IMat c(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c(i, j) = rng.integer(0, emax);
  if (c.cwiseAbs().sum() == 0) c(0, 0) = 1;
  return c;
}

MultiMatrixAlgebra random_algebra(Rng& rng) {
  int k = rng.integer(1, 2);
  std::vector<int> blocks(k);
  for (int& b : blocks) b = rng.integer(1, 2);
  return MultiMatrixAlgebra{blocks};
}

Representation random_faithful(Rng& rng, const MultiMatrixAlgebra& a) {
  std::vector<int> mults(a.num_blocks());
  for (int& m : mults) m = rng.integer(1, 2);
  return Representation::canonical(a, mults);
}

// Mix with half the normalized block trace map: keeps the Choi matrices away
// from rank strata so dual-side rank decisions are well posed.
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
  auto sigma =
      Representation::canonical(points(1), {static_cast<int>(ttilde.rows())});
  return covariant_pair(e, sigma, ttilde);
}

// criterion 1: constructor outputs satisfy the module laws
Outcome criterion_axioms() {
  constexpr double kGate = 1e-10;
  Outcome o;
  Rng rng(101);
  Tolerance tol;
  for (int i = 0; i < 100; ++i) {
    Correspondence e;
    double residual = 0;
    switch (i % 6) {
      case 0:
        e = identity_correspondence(random_algebra(rng));
        break;
      case 1:
        e = endomorphism_correspondence(
            random_automorphism(random_algebra(rng), rng));
        break;
      case 2:
        e = gns_correspondence(random_cp_map(random_algebra(rng), rng), tol);
        break;
      case 3:
        e = quiver_correspondence(random_counts(rng, rng.integer(1, 2), 2));
        break;
      case 4: {
        int k = rng.integer(1, 2);
        e = tensor(quiver_correspondence(random_counts(rng, k, 2)),
                   quiver_correspondence(random_counts(rng, k, 2)), tol)
                .product;
        break;
      }
      default: {
        int k = rng.integer(1, 2);
        auto s = random_faithful(rng, points(k));
        auto d = dual(quiver_correspondence(random_counts(rng, k, 2)), s, s, tol);
        e = d.corr;
        residual = d.residual;
        break;
      }
    }
    double worst = std::max(e.validate(tol).worst(), residual);
    o.fold(worst, worst <= kGate, "instance " + std::to_string(i));
  }
  return o;
}

// criterion 2: the duality theorem on mixed instance kinds
Outcome criterion_duality() {
  constexpr double kGate = 1e-8;
  Outcome o;
  Rng rng(202);
  Tolerance tol;
  for (int i = 0; i < 50; ++i) {
    Correspondence e;
    switch (i % 3) {
      case 0:
        e = quiver_correspondence(random_counts(rng, rng.integer(1, 2), 2));
        break;
      case 1:
        e = endomorphism_correspondence(
            random_automorphism(random_algebra(rng), rng));
        break;
      default:
        e = gns_correspondence(conditioned_cp_map(random_algebra(rng), rng), tol);
        break;
    }
    auto sigma = random_faithful(rng, e.left_alg);
    auto tau = random_faithful(rng, e.right_alg);
    DualityReport rep = verify_duality(e, sigma, tau, tol);
    o.fold(rep.worst(), rep.pass(kGate), "instance " + std::to_string(i));
  }
  return o;
}

// criterion 3: duals of arrow modules carry the transposed counts, checked
// exhaustively through two blocks and on seeded draws for three and four
Outcome criterion_quiver_transpose() {
  Outcome o;
  Tolerance tol;
  auto check_one = [&](const IMat& c) {
    Correspondence e = quiver_correspondence(c);
    auto s = canonical_faithful(e.right_alg);
    auto d = dual(e, s, s, tol);
    IMat got = multiplicity_matrix(d.corr, tol);
    bool ok = got.rows() == c.cols() && got.cols() == c.rows() &&
              got == IMat(c.transpose());
    o.fold(ok ? 0.0 : 1.0, ok, "counts mismatch");
  };
  for (int v = 0; v <= 3; ++v) {
    IMat c(1, 1);
    c << v;
    check_one(c);
  }
  for (int code = 0; code < 256; ++code) {
    IMat c(2, 2);
    c << code % 4, (code / 4) % 4, (code / 16) % 4, (code / 64) % 4;
    check_one(c);
  }
  Rng rng(303);
  for (int n = 3; n <= 4; ++n)
    for (int i = 0; i < 25; ++i) {
      IMat c(n, n);
      for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q) c(r, q) = rng.integer(0, 3);
      check_one(c);
    }
  return o;
}

// criterion 4: span, direct sum, and tensor laws for duals
Outcome criterion_lemmas() {
  constexpr double kGate = 1e-8;
  Outcome o;
  Rng rng(404);
  Tolerance tol;
  for (int i = 0; i < 30; ++i) {
    int k = rng.integer(1, 2);
    Correspondence e = quiver_correspondence(random_counts(rng, k, 2));
    auto sigma = random_faithful(rng, e.left_alg);
    auto tau = random_faithful(rng, e.right_alg);
    SpanReport rep = verify_span(e, sigma, tau, tol);
    o.fold(std::abs(rep.induced_dim - rep.span_rank), rep.pass(),
           "span instance " + std::to_string(i));
  }
  for (int i = 0; i < 30; ++i) {
    int k = rng.integer(1, 2);
    auto sigma = random_faithful(rng, points(k));
    auto tau = random_faithful(rng, points(k));
    DualSumReport rep =
        verify_dual_sum(quiver_correspondence(random_counts(rng, k, 2)),
                        quiver_correspondence(random_counts(rng, k, 2)), sigma,
                        tau, tol);
    o.fold(rep.iso_defect, rep.pass(kGate), "sum instance " + std::to_string(i));
  }
  for (int i = 0; i < 30; ++i) {
    int k = rng.integer(1, 2);
    auto sigma = random_faithful(rng, points(k));
    auto tau = random_faithful(rng, points(k));
    auto pi = random_faithful(rng, points(k));
    DualTensorReport rep = verify_dual_tensor(
        quiver_correspondence(random_counts(rng, k, 2)),
        quiver_correspondence(random_counts(rng, k, 2)), sigma, tau, pi, tol);
    o.fold(rep.worst(), rep.pass(kGate), "tensor instance " + std::to_string(i));
  }
  return o;
}

// criterion 5: dilations are isometric with the compression property, and
// isometric generators have an exactly vanishing defect operator
Outcome criterion_dilation() {
  constexpr double kGate = 1e-10;
  Outcome o;
  Rng rng(505);
  Tolerance tol;
  for (int i = 0; i < 30; ++i) {
    CovariantPair p = [&] {
      if (i % 3 == 2) {  // isometric generator: unitary action on one letter
        int h = rng.integer(2, 4);
        return scalar_pair(rng.unitary(h), 1);
      }
      int letters = rng.integer(1, 2), h = rng.integer(2, 3);
      IMat c(1, 1);
      c << letters;
      auto e = quiver_correspondence(c);
      auto sigma = Representation::canonical(points(1), {h});
      Localization loc = localize(e, sigma, tol);
      Mat eta = rng.ginibre(loc.dim, h);
      return pair_from_eta(e, sigma, eta, rng.real(0.4, 0.9) / op_norm(eta), tol);
    }();
    DilationData d = dilate(p, 4, tol);
    DilationReport rep = verify_dilation(d, tol);
    double worst = std::max(rep.isometry_defect, rep.compression_defect);
    o.fold(worst, worst <= kGate && rep.pass(kGate),
           "instance " + std::to_string(i));
    if (i % 3 == 2)
      o.fold(d.delta.norm(), d.delta.norm() == 0.0,
             "defect not clamped to zero on instance " + std::to_string(i));
  }
  return o;
}

// criterion 6: polynomial evaluation against direct functional calculus
Outcome criterion_scalar_oracle() {
  constexpr double kGate = 1e-10;
  Outcome o;
  Rng rng(606);
  Tolerance tol;
  auto m = points(1);
  auto e = identity_correspondence(m);
  auto f = fock(e, 6, tol);
  for (int i = 0; i < 20; ++i) {
    int d = rng.integer(1, 4);
    auto sigma = Representation::canonical(m, {d});
    Localization loc = localize(e, sigma, tol);
    Mat s = rng.with_norm(d, d, rng.real(0.3, 0.9));
    Mat eta = loc.insert(Vec::Ones(1)) * s;

    int deg = rng.integer(1, 4);
    std::vector<cplx> coeffs(deg + 1);
    for (auto& c : coeffs) c = cplx(rng.real(-1, 1), rng.real(-1, 1));

    HardyElement x = ambient(f, AlgebraElement::identity(m)) * coeffs[0];
    HardyElement power = ambient(f, AlgebraElement::identity(m));
    for (int n = 1; n <= deg; ++n) {
      power = power * creation(f, Vec::Ones(1));
      x = x + power * coeffs[n];
    }

    Mat sa = s.adjoint();
    Mat direct = coeffs[0] * Mat::Identity(d, d);
    Mat sp = Mat::Identity(d, d);
    for (int n = 1; n <= deg; ++n) {
      sp = sp * sa;
      direct += coeffs[n] * sp;
    }
    double defect = (evaluate(x, eta, loc, sigma, tol) - direct).norm();
    o.fold(defect, defect <= kGate, "instance " + std::to_string(i));
  }
  return o;
}

// criterion 7: graded commutant checks on small module families
Outcome criterion_commutant() {
  constexpr double kGate = 1e-9;
  Outcome o;
  Rng rng(707);
  Tolerance tol;
  std::vector<Correspondence> family;
  std::vector<std::string> names;
  family.push_back(identity_correspondence(points(1)));
  names.push_back("scalars");
  family.push_back(identity_correspondence(points(2)));
  names.push_back("two blocks");
  for (int i = 0; i < 3; ++i) {
    family.push_back(quiver_correspondence(random_counts(rng, 2, 1)));
    names.push_back("seeded counts " + std::to_string(i));
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto sigma = canonical_faithful(family[i].right_alg);
    CommutantReport rep = verify_commutant(family[i], sigma, 4, tol);
    double worst = std::max({rep.unitary_defect, rep.recursion_defect,
                             rep.commutation_defect});
    o.fold(worst, worst <= kGate && rep.pass(kGate, 1e-6), names[i]);
  }
  return o;
}

// criterion 8: model and symbol round trips with purity agreement
Outcome criterion_roundtrip() {
  constexpr double kGate = 1e-7;
  Outcome o;
  Rng rng(808);
  Tolerance tol;
  for (int i = 0; i < 20; ++i) {
    CovariantPair p = [&] {
      if (i == 0) return scalar_pair(Mat::Zero(1, 1), 1);
      int h = rng.integer(2, 3), letters = rng.integer(1, 2);
      return scalar_pair(nilpotent_action(rng, h, letters, rng.real(0.5, 0.9)),
                         letters);
    }();
    ModelRoundTrip r1 = roundtrip_model(p, 5, tol);
    o.fold(r1.worst(), r1.pass(kGate), "model instance " + std::to_string(i));
    CharacteristicFunction th = characteristic_of(p, 5, tol);
    CharRoundTrip r2 = roundtrip_char(th, tol);
    o.fold(r2.worst(), r2.pass(kGate), "symbol instance " + std::to_string(i));
    bool inner = check_charfn(th, tol).inner;
    bool pure = classify(p, 5, tol).label == PairClass::CDotZero;
    o.fold(inner == pure ? 0.0 : 1.0, inner == pure,
           "purity mismatch on instance " + std::to_string(i));
  }
  return o;
}

// criterion 9: three way agreement plus the brute force equivalence oracle
Outcome criterion_morita() {
  constexpr double kGate = 1e-6;
  Outcome o;
  Rng rng(909);
  Tolerance tol;
  for (int i = 0; i < 20; ++i) {
    int k = rng.integer(1, 2);
    IMat a = random_counts(rng, k, 2);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.eng);
    IMat b(k, k);
    for (int r = 0; r < k; ++r)
      for (int q = 0; q < k; ++q) b(perm[r], perm[q]) = a(r, q);
    if (i % 2 == 1) b(0, 0) += 1;
    DiffdualsReport rep = verify_diffduals(quiver_correspondence(a),
                                           quiver_correspondence(b), tol);
    bool ok = rep.consistent() && rep.pass(kGate) &&
              rep.cond_bimodule == (i % 2 == 0);
    o.fold(rep.cond_bimodule ? rep.worst() : 0.0, ok,
           "pair " + std::to_string(i));
  }

  // exhaustive family: every pair of arrow modules over at most two abelian
  // blocks with module dimension at most two, against the definition applied
  // directly: try the standard bimodule for every block bijection
  std::vector<IMat> family;
  {
    for (int v = 0; v <= 2; ++v) {
      IMat c(1, 1);
      c << v;
      family.push_back(c);
    }
    for (int code = 0; code < 81; ++code) {
      IMat c(2, 2);
      c << code % 3, (code / 3) % 3, (code / 9) % 3, (code / 27) % 3;
      if (c.sum() <= 2) family.push_back(c);
    }
  }
  auto oracle = [&](const Correspondence& e, const Correspondence& f) {
    int k = e.right_alg.num_blocks();
    if (f.right_alg.num_blocks() != k) return false;
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      EquivalenceBimodule x = standard_equivalence(e.right_alg, f.right_alg, perm);
      TensorProduct te = tensor(e, x.x, tol);
      TensorProduct tf = tensor(x.x, f, tol);
      auto iso = find_isomorphism(te.product, tf.product, false, tol);
      if (iso && iso->defect <= kGate) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  int agreements = 0;
  for (const IMat& ca : family)
    for (const IMat& cb : family) {
      Correspondence e = quiver_correspondence(ca);
      Correspondence f = quiver_correspondence(cb);
      bool fast = are_morita_equivalent(e, f, tol).has_value();
      bool slow = oracle(e, f);
      if (fast == slow) ++agreements;
      o.fold(fast == slow ? 0.0 : 1.0, fast == slow, "oracle disagreement");
    }
  o.note += o.pass ? "" : " (" + std::to_string(agreements) + " agreements)";
  return o;
}

// criterion 10: repeated runs with one seed give one report
Outcome criterion_determinism() {
  Outcome o;
  SuiteConfig cfg;
  cfg.seed = 7;
  cfg.instances_per_suite = 2;
  auto strip = [](const Report& r) {
    auto j = nlohmann::ordered_json::parse(report_json(r));
    j.erase("run_stamp");
    return j.dump();
  };
  std::string a = strip(run_suites(cfg));
  std::string b = strip(run_suites(cfg));
  bool same = a == b;
  Report r = run_suites(cfg);
  o.fold(same ? 0.0 : 1.0, same, "reports differ");
  o.fold(r.all_pass() ? 0.0 : 1.0, r.all_pass(), "default checks failed");
  return o;
}

}  // namespace

int main() {
  struct Row {
    const char* name;
    Outcome (*fn)();
  };
  const Row rows[] = {
      {"axioms: constructor outputs satisfy the module laws", criterion_axioms},
      {"duality: dual modules realize the double dual bijection",
       criterion_duality},
      {"quiver: duals of arrow modules carry transposed counts",
       criterion_quiver_transpose},
      {"lemmas: span, direct sum, and tensor laws for duals", criterion_lemmas},
      {"dilation: isometric dilations with compression", criterion_dilation},
      {"oracle: polynomial evaluation matches functional calculus",
       criterion_scalar_oracle},
      {"commutant: graded commutant identification", criterion_commutant},
      {"roundtrip: model and symbol reconstructions", criterion_roundtrip},
      {"morita: formulation agreement and equivalence oracle", criterion_morita},
      {"determinism: seeded runs reproduce their reports",
       criterion_determinism},
  };
  bool all = true;
  int index = 0;
  for (const Row& row : rows) {
    ++index;
    Outcome o;
    std::string detail;
    try {
      o = row.fn();
      detail = o.note;
    } catch (const std::exception& ex) {
      o.pass = false;
      o.worst = 1.0;
      detail = std::string("exception: ") + ex.what();
    }
    all = all && o.pass;
    std::printf("criterion %2d %s: %s (worst defect %.3g%s%s)\n", index,
                o.pass ? "PASS" : "FAIL", row.name, o.worst,
                detail.empty() ? "" : ", ", detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
  return all ? 0 : 1;
}
