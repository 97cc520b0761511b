#include "doctest.h"

#include "corrlab/suites.hpp"
#include "json.hpp"

using namespace corrlab;

namespace {

// report text with the volatile stamp removed, for byte comparison
std::string stamped_out(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  j.erase("run_stamp");
  return j.dump(2);
}

}  // namespace

TEST_SUITE("suites") {
  TEST_CASE("unknown suite names are rejected") {
    SuiteConfig cfg;
    cfg.suites = {"quiver", "nonsense"};
    CHECK_THROWS_AS(run_suites(cfg), Error);
    try {
      run_suites(cfg);
    } catch (const Error& err) {
      CHECK(err.code() == Err::UnknownSuite);
    }
  }

  TEST_CASE("bad configurations are rejected") {
    SuiteConfig cfg;
    cfg.suites = {"roundtrip"};
    cfg.depth = 1;
    CHECK_THROWS_AS(run_suites(cfg), Error);
    try {
      run_suites(cfg);
    } catch (const Error& err) {
      CHECK(err.code() == Err::BadConfig);
    }

    SuiteConfig neg;
    neg.suites = {"quiver"};
    neg.instances_per_suite = -1;
    CHECK_THROWS_AS(run_suites(neg), Error);

    SuiteConfig caps;
    caps.suites = {"quiver"};
    caps.caps.max_blocks = 0;
    CHECK_THROWS_AS(run_suites(caps), Error);
  }

  TEST_CASE("depth one is allowed for ungraded suites") {
    SuiteConfig cfg;
    cfg.suites = {"quiver"};
    cfg.depth = 1;
    cfg.instances_per_suite = 1;
    Report r = run_suites(cfg);
    CHECK(r.all_pass());
  }

  TEST_CASE("zero instances give an empty passing report") {
    SuiteConfig cfg;
    cfg.suites = {"duality"};
    cfg.instances_per_suite = 0;
    Report r = run_suites(cfg);
    CHECK(r.all_pass());
    CHECK(r.checks_passed == 0);
    CHECK(r.checks_failed == 0);
    REQUIRE(r.suites.size() == 1);
    CHECK(r.suites[0].instances.empty());
  }

  TEST_CASE("equal seeds give byte equal reports") {
    SuiteConfig cfg;
    cfg.seed = 42;
    cfg.suites = {"quiver", "morita"};
    cfg.instances_per_suite = 3;
    std::string a = stamped_out(report_json(run_suites(cfg)));
    std::string b = stamped_out(report_json(run_suites(cfg)));
    CHECK(a == b);
  }

  TEST_CASE("small arrow instances all pass") {
    SuiteConfig cfg;
    cfg.seed = 1;
    cfg.suites = {"quiver"};
    cfg.caps = {3, 3, 3, 3};
    Report r = run_suites(cfg);
    CHECK(r.all_pass());
    CHECK(r.checks_passed > 0);
    for (const auto& sr : r.suites)
      for (const auto& ir : sr.instances)
        for (const auto& ck : ir.checks) CHECK(ck.defect <= 1e-10);
  }

  TEST_CASE("graded suites run at the minimum depth") {
    SuiteConfig cfg;
    cfg.seed = 5;
    cfg.suites = {"dilation", "classify"};
    cfg.depth = 2;
    cfg.instances_per_suite = 2;
    Report r = run_suites(cfg);
    CHECK(r.all_pass());
  }

  TEST_CASE("markdown rendering lists every check") {
    SuiteConfig cfg;
    cfg.seed = 3;
    cfg.suites = {"quiver"};
    cfg.instances_per_suite = 2;
    Report r = run_suites(cfg);
    std::string md = report_markdown(r);
    CHECK(md.find("transposed counts") != std::string::npos);
    CHECK(md.find("pass") != std::string::npos);
    CHECK(md.find("FAIL") == std::string::npos);
  }

  TEST_CASE("explain traces an arrow module") {
    std::string text = explain_instance("{\"kind\":\"quiver\",\"counts\":[[2]]}");
    CHECK(text.find("module dimension 2") != std::string::npos);
    CHECK(text.find("dual dimension 2") != std::string::npos);
    CHECK(text.find("1 2 4 8 16") != std::string::npos);
  }

  TEST_CASE("explain traces a scalar pair") {
    std::string text = explain_instance("{\"kind\":\"scalar\",\"t\":[[0]]}");
    CHECK(text.find("defect operator: norm 1") != std::string::npos);
    CHECK(text.find("inner: yes") != std::string::npos);
  }

  TEST_CASE("explain rejects malformed descriptors") {
    auto code_of = [](const std::string& text) {
      try {
        explain_instance(text);
      } catch (const Error& err) {
        return err.code();
      }
      return Err::NotHermitian;  // anything that is not ParseError
    };
    CHECK(code_of("not json") == Err::ParseError);
    CHECK(code_of("{\"kind\":\"nope\"}") == Err::ParseError);
    CHECK(code_of("{\"kind\":\"quiver\",\"counts\":[[1,2]]}") == Err::ParseError);
    CHECK(code_of("{\"kind\":\"quiver\",\"counts\":[[-1]]}") == Err::ParseError);
    CHECK(code_of("{\"kind\":\"scalar\",\"t\":[[1,0],[0,1],[0,0]]}") ==
          Err::ParseError);
    CHECK(code_of("{\"kind\":\"quiver\",\"counts\":[[1]],\"depth\":0}") ==
          Err::ParseError);
  }

  TEST_CASE("the default configuration covers every suite") {
    SuiteConfig cfg;
    cfg.instances_per_suite = 1;
    Report r = run_suites(cfg);
    CHECK(r.suites.size() == suite_names().size());
    CHECK(r.all_pass());
  }
}
