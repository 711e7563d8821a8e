#include <set>

#include "core/experiments.hpp"
#include "doctest.h"

using namespace predlab;

TEST_CASE("config parsing") {
  Config cfg = Config::parse(
      "# comment\n"
      "experiment = mixture-bound\n"
      "seed = 42\n"
      "ratio = 0.25\n"
      "flag = true\n"
      "name = \"hello, world\"\n"
      "[params]\n"
      "horizons = [4, 8, 12]\n"
      "spec = bernoulli{p=0.3}\n");
  CHECK(cfg.get_string("experiment") == "mixture-bound");
  CHECK(cfg.get_int("seed") == 42);
  CHECK(cfg.get_real("ratio") == doctest::Approx(0.25));
  CHECK(cfg.get_bool("flag"));
  CHECK(cfg.get_string("name") == "hello, world");
  CHECK(cfg.get_int_list("params.horizons") == std::vector<int64_t>{4, 8, 12});
  CHECK(cfg.get_string("params.spec") == "bernoulli{p=0.3}");
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get("missing"), Error);
  CHECK_THROWS_AS(Config::parse("novalue\n"), Error);
}

TEST_CASE("measure spec grammar") {
  MeasurePtr b = build_measure_spec("bernoulli{p=0.3}");
  CHECK(b->conditional({})[0] == doctest::Approx(0.3));
  MeasurePtr d = build_measure_spec("dirac{pattern=0110, tail=1}");
  CHECK(d->log2_prob(seq_from_string("01101")) == 0.0);
  MeasurePtr m = build_measure_spec("markov{k=1, table=[0.9, 0.2]}");
  CHECK(m->conditional(seq_from_string("00"))[0] == doctest::Approx(0.9));
  MeasurePtr ch = build_measure_spec("chain{variant=stationary-plus, pattern=0101, horizon=8}");
  CHECK(ch->alphabet().size == 2);
  MeasurePtr hm = build_measure_spec("chain{variant=hidden-markov, pattern=01, horizon=8}");
  CHECK(hm->alphabet().size == 3);
  CHECK_THROWS_AS(build_measure_spec("zipf{s=1}"), Error);

  ModelClass grid = build_class_spec("bernoulli_grid{r=4}");
  CHECK(grid.size() == 5);
  ModelClass ex = build_class_spec("explicit{specs=[bernoulli{p=0.2}, laplace{}]}");
  CHECK(ex.size() == 2);
  CHECK_THROWS_AS(build_class_spec("markov_grid{K=3, r=20}"), Error);
}

TEST_CASE("csv formatting is deterministic and exact") {
  Table t{"demo", "seed=1", {"a", "b"}, {}};
  t.add_row({int64_t{1}, 0.1});
  t.add_row({int64_t{2}, std::string("x,\"y\"")});
  std::string csv = render_csv(t);
  CHECK(csv == "# seed=1\na,b\n1,0.1\n2,\"x,\"\"y\"\"\"\n");
  CHECK(format_double(0.5) == "0.5");
  double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);  // round-trip exact
}

TEST_CASE("registry is populated and well formed") {
  const auto& defs = experiment_registry();
  CHECK(defs.size() >= 14);
  std::set<std::string> ids;
  for (const auto& def : defs) {
    CHECK(ids.insert(def.id).second);  // unique ids
    CHECK(!def.line.empty());
    CHECK(!def.anchor.empty());
    CHECK(!def.example_config.empty());
    // every example config parses and names its own experiment
    Config cfg = Config::parse(def.example_config);
    CHECK(cfg.get_string("experiment") == def.id);
  }
  CHECK_THROWS_AS(find_experiment("no-such-thing"), Error);
}

TEST_CASE("running an experiment produces verdicts and a verdict table") {
  Config cfg = Config::parse("experiment = nml-negative\n");
  ExperimentResult res = run_experiment(cfg);
  CHECK(res.passed());
  CHECK(!res.verdicts.empty());
  CHECK(res.tables.back().name == "verdicts");
  CHECK(res.tables.back().rows.size() == res.verdicts.size());
}

TEST_CASE("deterministic experiments render byte-identical CSVs") {
  Config cfg = Config::parse("experiment = weights-matter\nseed = 9\n");
  ExperimentResult a = run_experiment(cfg);
  ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (size_t i = 0; i < a.tables.size(); ++i)
    CHECK(render_csv(a.tables[i]) == render_csv(b.tables[i]));
}

TEST_CASE("csv export writes one file per table") {
  Config cfg = Config::parse("experiment = nml-negative\n");
  ExperimentResult res = run_experiment(cfg);
  std::vector<std::string> files = export_result_csv(res, "test_csv_out");
  CHECK(files.size() == res.tables.size());
}
