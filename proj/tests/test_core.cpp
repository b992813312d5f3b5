#include <doctest.h>

#include <map>

#include "admiral/qtable.hpp"
#include "test_support.hpp"

using namespace admiral;

TEST_CASE("joint_index maps row-major with agent 0 slowest") {
  ActionSpace s22({2, 2});
  CHECK(joint_index({0, 0}, s22) == 0);
  CHECK(joint_index({1, 1}, s22) == 3);
  ActionSpace s234({2, 3, 4});
  CHECK(joint_index({1, 0, 2}, s234) == 14);  // 1*12 + 0*4 + 2
}

TEST_CASE("joint_index rejects out-of-range actions") {
  ActionSpace s22({2, 2});
  CHECK_THROWS_AS(joint_index({0, 2}, s22), ConfigError);
  CHECK_THROWS_AS(joint_index({0}, s22), ConfigError);
  CHECK_THROWS_AS(joint_unindex(4, s22), ConfigError);
}

TEST_CASE("joint_index round-trips over every cell up to (4,4,4)") {
  for (int s0 = 1; s0 <= 4; ++s0) {
    for (int s1 = 1; s1 <= 4; ++s1) {
      for (int s2 = 1; s2 <= 4; ++s2) {
        ActionSpace space({s0, s1, s2});
        for (int flat = 0; flat < space.joint_count(); ++flat) {
          JointAction a = joint_unindex(flat, space);
          CHECK(joint_index(a, space) == flat);
        }
      }
    }
  }
}

TEST_CASE("advisor_q with a deterministic solution reads one table cell") {
  ActionSpace space({2, 2});
  std::vector<double> q{3.25, 0.0, 0.0, 0.0};
  auto sol = AdvisorSolution::deterministic({0, 0}, space);
  CHECK(advisor_q(sol, q, space) == doctest::Approx(3.25).epsilon(1e-12));

  Rng rng(7);
  std::vector<double> q2 = testing::random_values(4, rng);
  for (int flat = 0; flat < 4; ++flat) {
    auto one_hot = AdvisorSolution::deterministic(joint_unindex(flat, space), space);
    CHECK(advisor_q(one_hot, q2, space) == doctest::Approx(q2[flat]).epsilon(1e-12));
  }
}

TEST_CASE("advisor_q reproduces the fifty-fifty hand computation") {
  ActionSpace space({2, 2});
  AdvisorSolution sol({{0.5, 0.5}, {0.5, 0.5}});
  std::vector<double> q{1.8, 0.0, 0.0, 0.0};
  CHECK(advisor_q(sol, q, space) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("advisor_q matches the nested-loop oracle on random instances") {
  Rng rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + rng.uniform_int(3);
    std::vector<int> sizes(n);
    for (int& s : sizes) s = 1 + rng.uniform_int(4);
    ActionSpace space(sizes);
    auto sol = testing::random_solution(space, rng);
    auto q = testing::random_values(space.joint_count(), rng);
    double expected = testing::advisor_q_bruteforce(sol, q, space);
    CHECK(advisor_q(sol, q, space) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("advisor_q is multilinear in each agent's strategy") {
  Rng rng(99);
  ActionSpace space({3, 3});
  for (int trial = 0; trial < 200; ++trial) {
    auto a = testing::random_solution(space, rng);
    auto b = testing::random_solution(space, rng);
    auto q = testing::random_values(space.joint_count(), rng);
    double lambda = rng.uniform();

    AdvisorSolution mixed = a;
    for (int i = 0; i < 3; ++i)
      mixed.strategies()[0][i] = lambda * a.strategy(0)[i] + (1.0 - lambda) * b.strategy(0)[i];
    AdvisorSolution b_shared = b;
    b_shared.strategies()[1] = a.strategy(1);

    double lhs = advisor_q(mixed, q, space);
    double rhs = lambda * advisor_q(a, q, space) + (1.0 - lambda) * advisor_q(b_shared, q, space);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("advisor_q validates dimensions") {
  ActionSpace space({2, 2});
  AdvisorSolution bad({{0.5, 0.5}});
  std::vector<double> q(4, 0.0);
  CHECK_THROWS_AS(advisor_q(bad, q, space), ConfigError);
  AdvisorSolution not_normalized({{0.7, 0.7}, {0.5, 0.5}});
  CHECK_THROWS_AS(advisor_q(not_normalized, q, space), ConfigError);
  std::vector<double> short_q(3, 0.0);
  auto ok = AdvisorSolution::uniform(space);
  CHECK_THROWS_AS(advisor_q(ok, short_q, space), ConfigError);
}

TEST_CASE("greedy_own_action finds a unique argmax") {
  JointQTable q(0, 1, ActionSpace({4, 2}));
  q.set(0, JointAction{2, 1}, 5.0);
  Rng rng(1);
  CHECK(greedy_own_action(q, 0, {0, 1}, 0, rng) == 2);
}

TEST_CASE("greedy_own_action breaks ties uniformly") {
  JointQTable q(0, 1, ActionSpace({4, 2}));  // all-zero slice: full tie
  Rng rng(5);
  std::map<int, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[greedy_own_action(q, 0, {0, 0}, 0, rng)];
  // chi-square against uniform over 4 actions; 3 dof, 0.999 quantile ~ 16.27
  double chi2 = 0.0;
  for (int a = 0; a < 4; ++a) {
    double expected = draws / 4.0;
    double d = counts[a] - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 16.27);
}

TEST_CASE("greedy_own_action agrees with an exhaustive scan") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    ActionSpace space({4, 4});
    JointQTable q(0, 3, space);
    for (double& v : q.raw()) v = rng.uniform();
    StateId s = rng.uniform_int(3);
    JointAction others{0, rng.uniform_int(4)};

    int got = greedy_own_action(q, s, others, 0, rng);
    double best = -1e300;
    int expected = -1;
    for (int a = 0; a < 4; ++a) {
      double v = q.at(s, {a, others[1]});
      if (v > best) {
        best = v;
        expected = a;
      }
    }
    CHECK(got == expected);  // random values: ties have probability zero
  }
}

TEST_CASE("greedy_own_action is invariant under constant shifts") {
  Rng rng(23);
  ActionSpace space({4, 3});
  JointQTable q(0, 1, space);
  for (double& v : q.raw()) v = rng.uniform();
  JointQTable shifted = q;
  for (double& v : shifted.raw()) v += 41.5;
  for (int trial = 0; trial < 50; ++trial) {
    JointAction others{0, rng.uniform_int(3)};
    Rng r1(trial), r2(trial);
    CHECK(greedy_own_action(q, 0, others, 0, r1) == greedy_own_action(shifted, 0, others, 0, r2));
  }
}

TEST_CASE("fresh tables are all-zero and finite") {
  JointQTable q(1, 7, ActionSpace({2, 3}));
  CHECK(q.state_count() == 7);
  CHECK(q.joint_count() == 6);
  for (double v : q.raw()) CHECK(v == 0.0);
}

TEST_CASE("derived rng streams are independent and deterministic") {
  Rng a = derive_rng(42, "env");
  Rng b = derive_rng(42, "env");
  Rng c = derive_rng(42, "learner");
  CHECK(a.next_u64() == b.next_u64());
  Rng a2 = derive_rng(42, "env");
  CHECK(a2.next_u64() != c.next_u64());  // different tags, different streams
  CHECK(derive_seed(42, "env", 0) != derive_seed(42, "env", 1));
  CHECK(derive_seed(42, "env", 0) != derive_seed(43, "env", 0));
}

TEST_CASE("rng uniform stays in range and sample follows the weights") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    int k = rng.uniform_int(7);
    CHECK(k >= 0);
    CHECK(k < 7);
  }
  std::vector<double> w{0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(rng.sample(w) == 1);
}
