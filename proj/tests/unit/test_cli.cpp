#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "doctest.h"
#include "nullrec/cli/config.hpp"
#include "nullrec/cli/experiments.hpp"
#include "nullrec/cli/report.hpp"

using namespace nullrec;
using namespace nullrec::cli;

namespace {

std::string error_of(const std::string& text) {
  try {
    const auto cfg = parse_config_text(text, "t.conf");
    (void)validate_globals(cfg);
    for (const auto& s : cfg.sections) {
      const auto& spec = find_kind(s.entries.at("kind").value);
      (void)validate_section(s, spec, cfg.path);
    }
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Params params_for(const std::string& text) {
  const auto cfg = parse_config_text(text, "t.conf");
  const auto& s = cfg.sections.at(0);
  return validate_section(s, find_kind(s.entries.at("kind").value), cfg.path);
}

}  // namespace

TEST_CASE("config errors name the file, line and key") {
  CHECK(error_of("[experiment.a]\nkind = moments\nmc_size = 0\n") ==
        "t.conf:3: mc_size: must be >= 2, got 0");
  CHECK(error_of("[experiment.a]\nkind = moments\nbogus = 1\n").find("t.conf:3: bogus: unknown key") == 0);
  CHECK(error_of("[experiment.a]\nkind = subordinator\nsamples = 1.5\n").find("t.conf:3: samples: expected an integer") == 0);
  CHECK(error_of("[experiment.a]\nkind = moments\nmc_size = 5\nmc_size = 6\n").find("t.conf:4: mc_size: duplicate key") == 0);
  CHECK(error_of("[experiment.a]\nkind = main-fclt\nlevy = cauchy\n").find("t.conf:3: levy: must be one of") == 0);
  CHECK(error_of("[oops]\n").find("t.conf:1: malformed section header") == 0);
  CHECK(error_of("colour = red\n[experiment.a]\nkind = moments\n").find("t.conf:1: colour: unknown global key") == 0);
  CHECK(error_of("seed = -4\n[experiment.a]\nkind = moments\n").find("t.conf:1: seed:") == 0);
  CHECK(error_of("seed = 1\n").find("no [experiment.<name>] sections") != std::string::npos);
  CHECK(error_of("[experiment.a]\nkind = moments\np_pos = 2.5\n").find("t.conf:3: p_pos:") == 0);
  CHECK_THROWS_AS((void)find_kind("nope"), ConfigError);
}

TEST_CASE("typed values and defaults") {
  const auto p = params_for("[experiment.a]\nkind = subordinator\nsamples = 1e4\nbetas = 0.2, 0.7\n");
  CHECK(p.count("samples") == 10000);
  CHECK(p.list("betas") == std::vector<double>{0.2, 0.7});
  CHECK(p.origin("samples") == "t.conf:3");
  CHECK(p.origin("tol.ml_mean") == "default");
  const auto cfg = parse_config_text("seed = 18446744073709551615\nplots = off\n[experiment.a]\nkind = moments\n", "t.conf");
  const auto g = validate_globals(cfg);
  CHECK(g.seed == 18446744073709551615ULL);
  CHECK_FALSE(g.plots);
}

TEST_CASE("every kind is described and has a consistent schema") {
  for (const auto& k : experiment_kinds()) {
    CHECK_FALSE(describe_kind(k.kind).empty());
    for (const auto& f : k.fields) {
      if (f.default_value.empty() || f.default_value == "none") continue;
      CHECK_NOTHROW((void)parse_value(f, f.default_value, f.key));
    }
  }
}

TEST_CASE("report formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  Table t{"t", {"x", "y"}, {}};
  t.add_row({0.1, 2.0});
  CHECK(render_csv(t) == "x,y\r\n0.10000000000000001,2\r\n");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(make_metric("m", 0.5, Rule::max, 0.4).pass == false);
  CHECK(make_metric("m", 1.05, Rule::rel, 0.1, 1.0).pass == true);
  CHECK(make_metric("m", 1.2, Rule::abs, 0.1, 1.0).pass == false);
  CHECK(make_metric("m", 99.0, Rule::info).pass == true);
  LinePlot lp{"p", "title <&>", "x", "y", true, false, {{"s", {1.0, 10.0}, {0.0, 1.0}, false}}};
  const auto svg = render_svg(lp);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("title &lt;&amp;&gt;") != std::string::npos);
}

TEST_CASE("FNV-1a test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("experiments are identical in serial and parallel execution") {
  const std::pair<const char*, const char*> cases[] = {
      {"subordinator", "samples = 2000\novershoot_samples = 2000\npath_points = 20\n"},
      {"chain-fclt", "n = 2000\nreplicates = 300\nwandering_n = 10000\npath_count = 1\n"},
      {"entrance-fclt", "n = 5000\nreplicates = 300\n"},
      {"sssi", "alpha = 1.2\nbeta = 0.5\nreplicates = 300\nterms = 30\ninner_samples = 500\ncf_rel_tol = 0.2\npath_count = 1\n"},
      {"main-fclt", "alpha = 1.5\nn = 1000\nreplicates = 200\nterms = 30\npilot_paths = 300\ncn_n_max = 10000\n"
                    "cn_points = 3\n"},
      {"moments", "mc_size = 2000\n"}};
  set_thread_count(4);
  for (const auto& [kind, body] : cases) {
    CAPTURE(kind);
    const auto p = params_for(std::string("[experiment.a]\nkind = ") + kind + "\n" + body);
    const auto serial = run_experiment(kind, p, Rng(77), Execution::serial);
    const auto parallel = run_experiment(kind, p, Rng(77), Execution::parallel);
    REQUIRE(serial.metrics.size() == parallel.metrics.size());
    for (std::size_t i = 0; i < serial.metrics.size(); ++i) {
      CAPTURE(serial.metrics[i].name);
      CHECK(serial.metrics[i].value == parallel.metrics[i].value);
    }
    REQUIRE(serial.tables.size() == parallel.tables.size());
    for (std::size_t i = 0; i < serial.tables.size(); ++i) {
      CHECK(render_csv(serial.tables[i]) == render_csv(parallel.tables[i]));
    }
  }
}

TEST_CASE("run_config writes reproducible results") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nullrec_test_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path conf = dir / "c.conf";
  std::ofstream(conf) << "seed = 9\n[experiment.m]\nkind = moments\nmc_size = 2000\n"
                         "[experiment.s]\nkind = subordinator\nsamples = 1000\novershoot_samples = 1000\n";
  RunOptions a;
  a.out_dir = (dir / "a").string();
  a.quiet = true;
  a.jobs = 1;
  RunOptions b = a;
  b.out_dir = (dir / "b").string();
  b.jobs = 4;
  b.plots = false;
  (void)run_config(conf.string(), a);
  (void)run_config(conf.string(), b);
  const auto ra = slurp(fs::path(a.out_dir) / "results.csv");
  CHECK(ra.find("experiment,kind,metric,value,reference,tolerance,rule,pass\r\n") == 0);
  CHECK(ra == slurp(fs::path(b.out_dir) / "results.csv"));
  CHECK(fs::exists(fs::path(a.out_dir) / "summary.txt"));
  CHECK(fs::exists(fs::path(a.out_dir) / "timing.csv"));
  CHECK(fs::exists(fs::path(a.out_dir) / "plots"));
  CHECK_FALSE(fs::exists(fs::path(b.out_dir) / "plots"));
  RunOptions c = a;
  c.seed = 10;
  c.out_dir = (dir / "c").string();
  (void)run_config(conf.string(), c);
  CHECK(ra != slurp(fs::path(c.out_dir) / "results.csv"));
  fs::remove_all(dir);
}
