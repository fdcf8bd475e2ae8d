#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>

#include "erpx/errors.hpp"
#include "erpx/metrics.hpp"
#include "support.hpp"

using namespace erpx;
using test::vec;

TEST_CASE("mse hand values") {
  CHECK(mse(vec({1, 2, 3}), vec({1, 2, 3})).c == 0.0);
  CHECK(mse(vec({0, 2}), vec({1, 1})).c == doctest::Approx(1.0));
  CHECK(mse(vec({5, 5}), vec({2, 2})).c == doctest::Approx(9.0));
  Eigen::VectorXd one(1), other(1);
  one << 5;
  other << 2;
  CHECK(mse(one, other).c == doctest::Approx(9.0));
}

TEST_CASE("mse rejects mismatched lengths") {
  CHECK_THROWS_AS(mse(vec({1, 2}), vec({1, 2, 3})), ContractViolation);
}

TEST_CASE("mse detects translations") {
  Rng rng(11);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = rng.normal();
  for (double shift : {-3.5, 0.25, 2.0}) {
    const Eigen::VectorXd shifted = y.array() + shift;
    CHECK(mse(y, shifted).c == doctest::Approx(shift * shift).epsilon(1e-12));
  }
}

TEST_CASE("ensemble_predictions means and identities") {
  const PredictionVector a{vec({1, 3}), Provenance::cv};
  const PredictionVector b{vec({3, 5}), Provenance::cv};
  std::vector<PredictionVector> both{a, b};
  const PredictionVector mean = ensemble_predictions(both);
  CHECK(mean.values[0] == doctest::Approx(2.0));
  CHECK(mean.values[1] == doctest::Approx(4.0));
  CHECK(mean.provenance == Provenance::cv);

  std::vector<PredictionVector> one{a};
  CHECK(test::same_vector(ensemble_predictions(one).values, a.values));

  std::vector<PredictionVector> copies{a, a, a, a};
  CHECK(ensemble_predictions(copies).values.isApprox(a.values, 1e-15));

  std::vector<PredictionVector> empty;
  CHECK_THROWS_AS(ensemble_predictions(empty), ContractViolation);
}

TEST_CASE("ensemble_predictions is order-insensitive") {
  Rng rng(5);
  std::vector<PredictionVector> preds;
  for (int k = 0; k < 6; ++k) {
    Eigen::VectorXd v(10);
    for (int i = 0; i < 10; ++i) v[i] = rng.normal();
    preds.push_back({v, Provenance::direct});
  }
  const Eigen::VectorXd forward = ensemble_predictions(preds).values;
  std::reverse(preds.begin(), preds.end());
  const Eigen::VectorXd backward = ensemble_predictions(preds).values;
  CHECK(forward.isApprox(backward, 1e-14));
}

TEST_CASE("permute_response basics") {
  CHECK(test::same_vector(permute_response(vec({7, 7, 7}), 99), vec({7, 7, 7})));

  const Eigen::VectorXd y = vec({4, 1, 3, 2, 9, -1});
  for (Seed seed : {Seed{1}, Seed{2}, Seed{77}}) {
    Eigen::VectorXd p = permute_response(y, seed);
    std::vector<double> a(y.data(), y.data() + y.size());
    std::vector<double> b(p.data(), p.data() + p.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(test::same_vector(permute_response(y, seed), p));  // deterministic
  }
}

TEST_CASE("permute_response is uniform over permutations") {
  const Eigen::VectorXd y = vec({1, 2, 3});
  std::map<std::array<double, 3>, int> counts;
  const int n_seeds = 10000;
  for (int s = 0; s < n_seeds; ++s) {
    const Eigen::VectorXd p = permute_response(y, static_cast<Seed>(s) + 1000);
    ++counts[{p[0], p[1], p[2]}];
  }
  CHECK(counts.size() == 6);
  for (const auto& [perm, count] : counts) {
    const double freq = static_cast<double>(count) / n_seeds;
    CHECK(freq == doctest::Approx(1.0 / 6.0).epsilon(0.12));  // 1/6 +- 0.02
    CHECK(std::abs(freq - 1.0 / 6.0) < 0.02);
  }
}

TEST_CASE("permute_response differs across seeds") {
  Rng rng(3);
  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) y[i] = rng.uniform();  // distinct w.p. 1
  int differing = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd a = permute_response(y, static_cast<Seed>(2 * k + 1));
    const Eigen::VectorXd b = permute_response(y, static_cast<Seed>(2 * k + 2));
    if (!test::same_vector(a, b)) ++differing;
  }
  CHECK(differing == 100);
}

TEST_CASE("empirical_quantile examples") {
  CHECK(empirical_quantile(std::vector<double>{3.0}, 0.0) == 3.0);
  CHECK(empirical_quantile(std::vector<double>{3.0}, 0.7) == 3.0);
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(empirical_quantile(four, 0.0) == 1.0);
  CHECK(empirical_quantile(four, 1.0) == 4.0);
  CHECK(empirical_quantile(std::vector<double>{10, 20}, 0.5) == doctest::Approx(15.0));
  CHECK_THROWS_AS(empirical_quantile(four, 1.5), ContractViolation);
  CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), ContractViolation);
}

TEST_CASE("empirical_quantile is monotone in q") {
  Rng rng(17);
  std::vector<double> values(23);
  for (double& v : values) v = rng.normal();
  double last = empirical_quantile(values, 0.0);
  for (int k = 1; k <= 50; ++k) {
    const double q = static_cast<double>(k) / 50.0;
    const double current = empirical_quantile(values, q);
    CHECK(current >= last);
    last = current;
  }
}
