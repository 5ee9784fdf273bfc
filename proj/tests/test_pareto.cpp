#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "plopt/pareto.hpp"
#include "plopt/random.hpp"

using namespace plopt;
using Catch::Approx;

namespace {

// Three-point binary distribution with a non-hull cost-insensitive optimum.
FiniteDistribution demo_distribution() {
  FiniteDistribution d;
  d.task = TaskKind::binary;
  d.num_labels = 2;
  d.points = {{0.65, {0.70}}, {0.30, {0.40}}, {0.05, {0.15}}};
  d.validate();
  return d;
}

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("parse_distribution reads masses, conditionals and ratios", "[pareto]") {
  auto d = parse_distribution("# comment\n0.65 0.70\n\n0.30 0.40\n0.05 0.15\n", TaskKind::binary, 2);
  REQUIRE(d.points.size() == 3);
  CHECK(d.points[0].mass == 0.65);
  CHECK(d.points[2].cond[0] == 0.15);

  auto r = parse_distribution("1/2 3/4\n1/4 1/8\n1/4 0\n", TaskKind::binary, 2);
  CHECK(r.points[0].mass == 0.5);
  CHECK(r.points[0].cond[0] == 0.75);
  CHECK(r.points[1].cond[0] == 0.125);

  auto mc = parse_distribution("0.5 0.25 0.25 0.5\n0.5 1/2 1/4 1/4\n", TaskKind::multiclass, 3);
  CHECK(mc.points[1].cond[0] == 0.5);

  auto ml = parse_distribution("1.0 0.25 0.75\n", TaskKind::multilabel, 2);
  CHECK(ml.points[0].cond[1] == 0.75);
}

TEST_CASE("parse_distribution rejects malformed input", "[pareto]") {
  CHECK_THROWS_AS(parse_distribution("", TaskKind::binary, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("0.5 0.5\n", TaskKind::binary, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("1.0 1.5\n", TaskKind::binary, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("1.0 0.5 0.5\n", TaskKind::binary, 2), std::runtime_error);
  CHECK_THROWS_AS(parse_distribution("1.0 x\n", TaskKind::binary, 2), std::runtime_error);
  CHECK_THROWS_AS(parse_distribution("1.0 1/0\n", TaskKind::binary, 2), std::runtime_error);
  // multiclass conditionals must sum to one
  CHECK_THROWS_AS(parse_distribution("1.0 0.5 0.4 0.4\n", TaskKind::multiclass, 3),
                  std::invalid_argument);
}

TEST_CASE("bundled demo distribution file matches the embedded one", "[pareto]") {
  std::ifstream in(std::string(PLOPT_SOURCE_DIR) + "/data/pareto_demo.dist");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  auto d = parse_distribution(ss.str(), TaskKind::binary, 2);
  auto e = demo_distribution();
  REQUIRE(d.points.size() == e.points.size());
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    CHECK(d.points[i].mass == e.points[i].mass);
    CHECK(d.points[i].cond[0] == e.points[i].cond[0]);
  }
}

TEST_CASE("enumerate_profiles lists every pointwise classifier", "[pareto]") {
  FiniteDistribution one;
  one.points = {{1.0, {0.3}}};
  auto set = enumerate_profiles(one);
  REQUIRE(set.entries.size() == 2);
  // code 0 predicts positive everywhere, code 1 negative everywhere
  CHECK(set.entries[0].profile.fp[0] == Approx(0.7));
  CHECK(set.entries[0].profile.fn[0] == 0.0);
  CHECK(set.entries[1].profile.fn[0] == Approx(0.3));
  CHECK(set.entries[1].profile.fp[0] == 0.0);
}

TEST_CASE("enumerate_profiles reproduces the demo profile table", "[pareto]") {
  auto set = enumerate_profiles(demo_distribution());
  REQUIRE(set.entries.size() == 8);
  // (fp, fn) per classifier code, derived by hand from the three points
  std::vector<std::pair<double, double>> want = {
      {0.4175, 0.0},     // predict positive everywhere
      {0.2225, 0.455},   // negative on the large point only
      {0.2375, 0.12},    // negative on the middle point only
      {0.0425, 0.575},   // positive on the small point only
      {0.375, 0.0075},   // negative on the small point only
      {0.18, 0.4625},    // positive on the middle point only
      {0.195, 0.1275},   // positive on the large point only
      {0.0, 0.5825},     // predict negative everywhere
  };
  for (int i = 0; i < 8; ++i) {
    INFO("classifier " << i);
    CHECK(set.entries[i].profile.fp[0] == Approx(want[i].first).margin(1e-12));
    CHECK(set.entries[i].profile.fn[0] == Approx(want[i].second).margin(1e-12));
    // with-reference-to-negative mirror coordinates
    CHECK(set.entries[i].profile.fn[1] == set.entries[i].profile.fp[0]);
    CHECK(set.entries[i].profile.fp[1] == set.entries[i].profile.fn[0]);
    REQUIRE_NOTHROW(set.entries[i].profile.validate(TaskKind::binary));
  }
  CHECK(set.max_norm == Approx(0.5825 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("enumerate_profiles covers multilabel and multiclass codes", "[pareto]") {
  FiniteDistribution ml;
  ml.task = TaskKind::multilabel;
  ml.num_labels = 2;
  ml.points = {{0.5, {0.8, 0.2}}, {0.5, {0.1, 0.9}}};
  auto set = enumerate_profiles(ml);
  REQUIRE(set.entries.size() == 16);
  // assignment {3, 0}: both labels on point 1, none on point 2
  bool found = false;
  for (const auto& e : set.entries) {
    if (e.assignment == std::vector<int>{3, 0}) {
      found = true;
      CHECK(e.profile.fp[0] == Approx(0.5 * 0.2));   // label 1 wrongly on at point 1
      CHECK(e.profile.fn[0] == Approx(0.5 * 0.1));   // label 1 missed at point 2
      CHECK(e.profile.fp[1] == Approx(0.5 * 0.8));
      CHECK(e.profile.fn[1] == Approx(0.5 * 0.9));
    }
  }
  CHECK(found);

  FiniteDistribution mc;
  mc.task = TaskKind::multiclass;
  mc.num_labels = 3;
  mc.points = {{0.5, {0.5, 0.25, 0.25}}, {0.5, {0.2, 0.3, 0.5}}};
  auto mcs = enumerate_profiles(mc);
  REQUIRE(mcs.entries.size() == 9);
  for (const auto& e : mcs.entries) {
    if (e.assignment == std::vector<int>{1, 2}) {
      // class 1 predicted on point 1, class 2 on point 2
      CHECK(e.profile.fp[0] == Approx(0.5 * 0.5));
      CHECK(e.profile.fn[0] == Approx(0.5 * 0.2));
      CHECK(e.profile.fp[1] == Approx(0.5 * 0.7));
      CHECK(e.profile.fn[1] == Approx(0.5 * 0.25));
      CHECK(e.profile.fn[2] == Approx(0.5 * 0.25 + 0.5 * 0.5));
      CHECK(e.profile.fp[2] == 0.0);
    }
  }
}

TEST_CASE("enumerate_profiles enforces the classifier cap", "[pareto]") {
  auto d = demo_distribution();
  CHECK_THROWS_AS(enumerate_profiles(d, 4), std::invalid_argument);
  CHECK_NOTHROW(enumerate_profiles(d, 8));
}

TEST_CASE("pareto_front drops dominated and duplicate profiles", "[pareto]") {
  auto set = enumerate_profiles(demo_distribution());
  auto front = sorted_copy(pareto_front(set));
  CHECK(front == std::vector<int>{0, 2, 3, 4, 5, 6, 7});  // classifier 1 is dominated

  FiniteDistribution sym;
  sym.points = {{0.5, {0.5}}, {0.5, {0.5}}};
  auto sset = enumerate_profiles(sym);
  REQUIRE(sset.entries.size() == 4);
  // codes 1 and 2 have identical (0.25, 0.25) profiles; only the first stays
  auto sf = sorted_copy(pareto_front(sset));
  CHECK(sf == std::vector<int>{0, 1, 3});
}

TEST_CASE("hull_candidates walks the lower-left hull", "[pareto]") {
  auto set = enumerate_profiles(demo_distribution());
  auto hull = hull_candidates(set);
  CHECK(hull == std::vector<int>{7, 6, 4, 0});

  // collinear interior points are dropped
  ProfileSet line;
  auto mk = [](double fp, double fn) {
    ProfileEntry e;
    e.profile.num_labels = 2;
    e.profile.priors = {0.5, 0.5};
    e.profile.fn = {fn, fp};
    e.profile.fp = {fp, fn};
    return e;
  };
  line.entries = {mk(0.0, 0.4), mk(0.2, 0.2), mk(0.4, 0.0), mk(0.3, 0.3)};
  auto lh = hull_candidates(line);
  CHECK(lh == std::vector<int>{0, 2});

  // equal fp keeps only the lowest fn
  ProfileSet stack;
  stack.entries = {mk(0.0, 0.5), mk(0.0, 0.2), mk(0.3, 0.0)};
  auto sh = hull_candidates(stack);
  CHECK(sh == std::vector<int>{1, 2});

  ProfileSet empty;
  CHECK_THROWS_AS(hull_candidates(empty), std::invalid_argument);
}

TEST_CASE("best_for_cost returns all tolerance-tied minimizers", "[pareto]") {
  auto set = enumerate_profiles(demo_distribution());
  CostVector fn_only;
  fn_only.costs = {2.0, 0.0, 0.0, 0.0};
  fn_only.level = 0.0;
  CHECK(best_for_cost(set, fn_only) == std::vector<int>{0});
  CostVector fp_only;
  fp_only.costs = {0.0, 2.0, 0.0, 0.0};
  fp_only.level = 2.0;
  CHECK(best_for_cost(set, fp_only) == std::vector<int>{7});

  // scaling the cost vector does not change the argmin
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    CostVector cv;
    cv.costs = {0.1 + rng.uniform(), 0.1 + rng.uniform(), 0.0, 0.0};
    cv.level = 1.0;
    auto base = best_for_cost(set, cv);
    CostVector scaled = cv;
    for (auto& c : scaled.costs) c *= 8.0;
    CHECK(best_for_cost(set, scaled) == base);
  }
}

TEST_CASE("verify_reduction certifies the demo distribution", "[pareto]") {
  auto rep = verify_reduction(demo_distribution(), MeasureSpec::binary_f(1.0));
  CHECK(rep.passed);
  CHECK(rep.violations.empty());
  CHECK(rep.best_value == Approx(0.75040783034257752).epsilon(1e-12));
  CHECK(rep.optimal == std::vector<int>{4});
  CHECK(rep.cost_minimizers == std::vector<int>{4});
  CHECK(rep.best_cost.costs[0] == Approx(2.0 - rep.best_value).epsilon(1e-12));
  CHECK(rep.best_cost.costs[1] == Approx(rep.best_value).epsilon(1e-12));
}

TEST_CASE("verify_reduction holds on random distributions", "[pareto]") {
  Rng rng(97);
  std::vector<MeasureSpec> specs = {MeasureSpec::binary_f(1.0), MeasureSpec::binary_f(2.0),
                                    MeasureSpec::binary_f(0.5), MeasureSpec::binary_jaccard()};
  for (int trial = 0; trial < 150; ++trial) {
    auto dist = oracle::random_distribution(rng, TaskKind::binary, 2, 6);
    auto rep = verify_reduction(dist, specs[trial % specs.size()]);
    INFO("binary trial " << trial);
    CHECK(rep.passed);
  }
  for (int trial = 0; trial < 50; ++trial) {
    auto dist = oracle::random_distribution(rng, TaskKind::multilabel, 2, 3);
    auto rep = verify_reduction(dist, trial % 2 == 0 ? MeasureSpec::micro_f(2, 1.0)
                                                     : MeasureSpec::micro_jaccard(2));
    INFO("multilabel trial " << trial);
    CHECK(rep.passed);
  }
  for (int trial = 0; trial < 50; ++trial) {
    auto dist = oracle::random_distribution(rng, TaskKind::multiclass, 3, 3);
    auto rep = verify_reduction(dist, trial % 2 == 0 ? MeasureSpec::micro_mc_f(3, 1.0)
                                                     : MeasureSpec::micro_mc_jaccard(3));
    INFO("multiclass trial " << trial);
    CHECK(rep.passed);
  }

  CHECK_THROWS_AS(verify_reduction(demo_distribution(), MeasureSpec::micro_f(2, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("phi_bound_witness with zero perturbation sees zero gap", "[pareto]") {
  auto rep = phi_bound_witness(demo_distribution(), MeasureSpec::binary_f(1.0), 0.0, 0.0, 50, 1);
  CHECK(rep.passed);
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio == 0.0);
  CHECK(rep.checked == 50);  // exactly the unique optimum per sample
  CHECK(rep.phi == Approx(1.0 / 0.5825).epsilon(1e-12));
  CHECK(rep.max_norm == Approx(0.5825 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("phi_bound_witness holds under perturbation", "[pareto]") {
  auto rep =
      phi_bound_witness(demo_distribution(), MeasureSpec::binary_f(1.0), 0.05, 0.01, 200, 9);
  CHECK(rep.passed);
  CHECK(rep.checked >= 200);
  CHECK(rep.max_ratio <= 1.0 + 1e-9);

  Rng rng(181);
  for (int trial = 0; trial < 80; ++trial) {
    auto dist = oracle::random_distribution(rng, TaskKind::binary, 2, 5);
    double e0 = 0.2 * rng.uniform();
    double e1 = 0.1 * rng.uniform();
    auto r = phi_bound_witness(dist, MeasureSpec::binary_f(1.0), e0, e1, 20, 1000 + trial);
    INFO("trial " << trial << " eps0 " << e0 << " eps1 " << e1);
    CHECK(r.passed);
  }

  CHECK_THROWS_AS(phi_bound_witness(demo_distribution(), MeasureSpec::binary_f(1.0), -0.1, 0.0, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(phi_bound_witness(demo_distribution(), MeasureSpec::binary_f(1.0), 0.1, 0.0, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("hull candidates are a subset of the pareto front", "[pareto]") {
  auto check_subset = [](const ProfileSet& set) {
    auto front = sorted_copy(pareto_front(set));
    for (int i : hull_candidates(set)) {
      INFO("hull index " << i);
      CHECK(std::binary_search(front.begin(), front.end(), i));
    }
  };
  check_subset(enumerate_profiles(demo_distribution()));
  Rng rng(211);
  for (int trial = 0; trial < 100; ++trial)
    check_subset(enumerate_profiles(oracle::random_distribution(rng, TaskKind::binary, 2, 6)));
}

TEST_CASE("dense cost sweep reaches exactly the hull vertices", "[pareto]") {
  auto dist = demo_distribution();
  auto set = enumerate_profiles(dist);
  auto priors = dist.priors();
  auto spec = MeasureSpec::binary_f(1.0);
  std::set<int> reached;
  for (int i = 0; i <= 2000; ++i) {
    double t = 2.0 * i / 2000.0;
    auto cv = cost_vector(spec, t, priors);
    for (int j : best_for_cost(set, cv)) reached.insert(j);
  }
  // every hull vertex is the argmin for some level, and nothing else ever is;
  // in particular the non-hull front points can never win a weighted sum
  CHECK(reached == std::set<int>{0, 4, 6, 7});
  CHECK(reached.count(2) == 0);  // positive on the middle point only
  CHECK(reached.count(3) == 0);  // positive on the small point only
  CHECK(reached.count(5) == 0);  // positive on the middle point only variant
}

TEST_CASE("the hull attains every nonnegative cost optimum", "[pareto]") {
  Rng rng(223);
  for (int trial = 0; trial < 100; ++trial) {
    auto dist = oracle::random_distribution(rng, TaskKind::binary, 2, 6);
    auto set = enumerate_profiles(dist);
    auto hull = hull_candidates(set);
    CostVector cv;
    cv.costs = {0.05 + rng.uniform(), 0.05 + rng.uniform(), 0.0, 0.0};
    cv.level = 1.0;
    double all_min = std::numeric_limits<double>::infinity();
    for (const auto& e : set.entries) all_min = std::min(all_min, weighted_cost(cv, e.profile));
    double hull_min = std::numeric_limits<double>::infinity();
    for (int i : hull) hull_min = std::min(hull_min, weighted_cost(cv, set.entries[i].profile));
    CHECK(hull_min == Approx(all_min).margin(1e-12));
  }
}

TEST_CASE("max_norm tracks the largest profile norm", "[pareto]") {
  Rng rng(227);
  for (int trial = 0; trial < 20; ++trial) {
    auto set = enumerate_profiles(oracle::random_distribution(rng, TaskKind::binary, 2, 5));
    double want = 0.0;
    for (const auto& e : set.entries) {
      double s = 0.0;
      for (double v : e.profile.flat()) s += v * v;
      want = std::max(want, std::sqrt(s));
    }
    CHECK(set.max_norm == Approx(want).margin(1e-12));
  }
}
