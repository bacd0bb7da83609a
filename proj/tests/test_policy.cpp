#include <doctest.h>

#include <cmath>

#include "explore/errors.hpp"
#include "explore/random.hpp"
#include "explore/policy.hpp"
#include "oracles.hpp"

using namespace explore;

namespace {

// Frozen values from a separate closed-form evaluation.
constexpr double kKlStdTimesE = 0.5676676416183064;  // log(e) + 1/(2e^2) - 1/2
constexpr double kLogpAtMean2d = -0.8378770664093453;  // log_std = -0.5 in two dims

Vector state(double x, double y) {
  Vector s(2);
  s << x, y;
  return s;
}

}  // namespace

TEST_CASE("sampling") {
  GaussianPolicy pol = GaussianPolicy::create(2, 2, {16, 16}, 3);
  const Vector s = state(2.5, 7.5);

  SUBCASE("logp at the mean") {
    CHECK(pol.log_prob(s, pol.mean(s)) == doctest::Approx(kLogpAtMean2d).epsilon(1e-14));
  }
  SUBCASE("tiny std returns the mean") {
    GaussianPolicy narrow(pol.mean_net(), Vector::Constant(2, -20.0));
    Rng rng(1);
    const auto a = narrow.sample_action(s, rng);
    CHECK((a.action - narrow.mean(s)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("reported logp is the density at the sample") {
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
      const auto a = pol.sample_action(s, rng);
      CHECK(a.logp == doctest::Approx(pol.log_prob(s, a.action)).epsilon(1e-12));
    }
  }
  SUBCASE("empirical mean within 3 sigma/sqrt(n)") {
    Rng rng(3);
    const int n = 100000;
    Vector sum = Vector::Zero(2);
    for (int i = 0; i < n; ++i) sum += pol.sample_action(s, rng).action;
    const Vector err = (sum / n - pol.mean(s)).cwiseAbs();
    const Vector bound = 3.0 * pol.log_std().array().exp() / std::sqrt(double(n));
    CHECK((err.array() <= bound.array()).all());
  }
  SUBCASE("density integrates to one") {
    const Vector mu = pol.mean(s);
    const double h = 0.02;
    double total = 0;
    for (double dx = -4; dx < 4; dx += h)
      for (double dy = -4; dy < 4; dy += h) {
        Vector a(2);
        a << mu[0] + dx + h / 2, mu[1] + dy + h / 2;
        total += std::exp(pol.log_prob(s, a)) * h * h;
      }
    CHECK(std::abs(total - 1.0) < 0.01);
  }
  SUBCASE("batch log-density agrees with single calls") {
    Matrix S = Matrix::Random(2, 6) * 5;
    Matrix A = Matrix::Random(2, 6);
    const Vector lp = pol.log_prob_batch(S, A);
    for (int i = 0; i < 6; ++i) CHECK(lp[i] == doctest::Approx(pol.log_prob(S.col(i), A.col(i))).epsilon(1e-13));
  }
}

TEST_CASE("log_prob gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GaussianPolicy pol = GaussianPolicy::create(2, 2, {6, 6}, seed);
    Rng rng(seed);
    Matrix S = Matrix::Random(2, 4) * 3;
    Matrix A = Matrix::Random(2, 4);
    Vector c = Vector::Random(4);
    const Vector g = pol.log_prob_gradient(S, A, c);
    auto f = [&](const Eigen::VectorXd& theta) {
      GaussianPolicy p = pol;
      p.set_parameters(theta);
      return p.log_prob_batch(S, A).dot(c);
    };
    CHECK(oracle::max_relative_error(g, oracle::finite_difference(f, pol.parameters())) < 1e-4);
  }
}

TEST_CASE("kl_estimate") {
  const GaussianPolicy b = GaussianPolicy::create(2, 2, {8}, 4);
  Matrix S = Matrix::Random(2, 10) * 4;

  SUBCASE("identical policies give exactly zero") { CHECK(kl_estimate(b, b, S) == 0.0); }
  SUBCASE("std scaled by e with equal means") {
    const GaussianPolicy t(b.mean_net(), b.log_std().array() + 1.0);
    CHECK(kl_estimate(b, t, S) == doctest::Approx(2 * kKlStdTimesE).epsilon(1e-13));
  }
  SUBCASE("duplicating the state sample changes nothing") {
    const GaussianPolicy t = GaussianPolicy::create(2, 2, {8}, 5);
    Matrix SS(2, 20);
    SS << S, S;
    CHECK(kl_estimate(b, t, SS) == doctest::Approx(kl_estimate(b, t, S)).epsilon(1e-13));
  }
  SUBCASE("non-negative on random pairs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      GaussianPolicy t = GaussianPolicy::create(2, 2, {8}, 100 + seed, -0.5 + 0.01 * double(seed % 7));
      CHECK(kl_estimate(b, t, S) >= 0.0);
    }
  }
  SUBCASE("mean shift matches the closed form") {
    Mlp net = b.mean_net();
    net.bias(net.num_layers() - 1)[0] += 0.3;
    const GaussianPolicy t(net, b.log_std());
    const double var = std::exp(2 * b.log_std()[0]);
    CHECK(kl_estimate(b, t, S) == doctest::Approx(0.09 / (2 * var)).epsilon(1e-10));
  }
  SUBCASE("empty sample is an input error") { CHECK_THROWS_AS(kl_estimate(b, b, Matrix(2, 0)), InputError); }
}

TEST_CASE("policy save and load") {
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {8, 8}, 12, -0.7);
  const std::string path = "policy_roundtrip_test.ckpt";
  pol.save(path);
  const GaussianPolicy back = GaussianPolicy::load(path);
  CHECK(back.parameters() == pol.parameters());
  std::remove(path.c_str());
}
