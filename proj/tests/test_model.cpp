#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "censee/errors.hpp"
#include "censee/model.hpp"
#include "helpers.hpp"

using namespace censee;

TEST_CASE("zero_censor_transform shifts responses and censor level") {
  Dataset d;
  d.X = Eigen::MatrixXd::Ones(2, 1);

  SUBCASE("identity at c = 0") {
    d.y = Eigen::Vector2d(1.0, 2.0);
    d.censor_level = 0.0;
    Dataset z = zero_censor_transform(d);
    CHECK(z.y == d.y);
    CHECK(z.censor_level == 0.0);
  }
  SUBCASE("constant shift") {
    d.y = Eigen::Vector2d(3.0, 5.0);
    d.censor_level = 3.0;
    Dataset z = zero_censor_transform(d);
    CHECK(z.y[0] == 0.0);
    CHECK(z.y[1] == 2.0);
    CHECK(z.censor_level == 0.0);
  }
  SUBCASE("negative censor level") {
    d.y = Eigen::Vector2d(-1.0, 2.0);
    d.censor_level = -1.0;
    Dataset z = zero_censor_transform(d);
    CHECK(z.y[0] == 0.0);
    CHECK(z.y[1] == 3.0);
  }
  SUBCASE("idempotent after one application") {
    d.y = Eigen::Vector2d(4.0, 7.0);
    d.censor_level = 4.0;
    Dataset z1 = zero_censor_transform(d);
    Dataset z2 = zero_censor_transform(z1);
    CHECK(z1.y == z2.y);
    CHECK(z2.censor_level == 0.0);
  }
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.X = Eigen::MatrixXd::Ones(2, 1);
  d.y = Eigen::Vector2d(1.0, -0.5);
  d.censor_level = 0.0;
  CHECK_THROWS_AS(d.validate(), Error);  // y below censor level
  d.y[1] = 0.0;
  CHECK_NOTHROW(d.validate());
  d.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("active_weights uses the strict inequality") {
  Eigen::MatrixXd X(3, 2);
  X << 1.0, 2.0,   // x beta = 1 > 0 with beta = (1,0)
      1.0, -2.0,   // boundary cases below
      0.0, 0.0;

  SUBCASE("zero beta gives the zero matrix") {
    ActiveWeights w = active_weights(X, CoefVector(Eigen::Vector2d(0.0, 0.0)));
    CHECK(w.W.isZero(0.0));
    CHECK(w.n_active == 0);
  }
  SUBCASE("single active row") {
    ActiveWeights w = active_weights(X, CoefVector(Eigen::Vector2d(1.0, 0.0)));
    CHECK(w.indicator[0]);
    CHECK(w.W.row(0) == X.row(0));
    CHECK(w.indicator[1]);  // x_2 beta = 1 > 0
    CHECK_FALSE(w.indicator[2]);
  }
  SUBCASE("inactive row zeroed") {
    ActiveWeights w = active_weights(X, CoefVector(Eigen::Vector2d(0.0, 1.0)));
    CHECK_FALSE(w.indicator[1]);  // x beta = -2
    CHECK(w.W.row(1).isZero(0.0));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(active_weights(X, CoefVector(Eigen::Vector3d(1, 2, 3))), Error);
  }
}

TEST_CASE("active_weights matches direct evaluation on random instances") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 5 + static_cast<int>(rng.next_u64() % 20);
    int p = 1 + static_cast<int>(rng.next_u64() % 6);
    Eigen::MatrixXd X = testutil::random_matrix(rng, n, p);
    CoefVector beta(testutil::random_vector(rng, p));
    ActiveWeights w = active_weights(X, beta);
    for (int i = 0; i < n; ++i) {
      double index = X.row(i) * beta.beta;
      if (index > 0.0) {
        CHECK(w.W.row(i) == X.row(i));
      } else {
        CHECK(w.W.row(i).isZero(0.0));
      }
    }
  }
}

TEST_CASE("clad_loss hand values") {
  Dataset d;
  d.censor_level = 0.0;

  SUBCASE("perfect fit is zero") {
    d.X = Eigen::MatrixXd::Ones(3, 1);
    d.y = Eigen::Vector3d(2.0, 2.0, 2.0);
    CHECK(clad_loss(d, CoefVector(Eigen::VectorXd::Constant(1, 2.0))) == 0.0);
  }
  SUBCASE("clamped fits") {
    Eigen::MatrixXd X(2, 1);
    X << 0.5, -3.0;
    d.X = X;
    d.y = Eigen::Vector2d(1.0, 0.0);
    // x beta = (0.5, -3), fits (0.5, 0): loss = (|1-0.5| + 0)/2
    CHECK(clad_loss(d, CoefVector(Eigen::VectorXd::Ones(1))) == doctest::Approx(0.25));
  }
  SUBCASE("zero beta clamps all fits to zero") {
    d.X = Eigen::MatrixXd::Ones(2, 1);
    d.y = Eigen::Vector2d(2.0, 4.0);
    CHECK(clad_loss(d, CoefVector(Eigen::VectorXd::Zero(1))) == doctest::Approx(3.0));
  }
}

TEST_CASE("clad_loss is nonnegative, zero iff exact fit") {
  Rng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd beta = testutil::random_vector(rng, 3);
    Dataset d = testutil::censored_dataset(rng, 20, 3, beta, 0.25);
    CoefVector b(testutil::random_vector(rng, 3));
    CHECK(clad_loss(d, b) >= 0.0);
  }
  // exact-fit case
  Dataset d;
  d.X = testutil::random_matrix(rng, 10, 2);
  CoefVector b(Eigen::Vector2d(1.0, -0.5));
  d.y = (d.X * b.beta).cwiseMax(0.0);
  d.censor_level = 0.0;
  CHECK(clad_loss(d, b) == 0.0);
}

TEST_CASE("score_psi hand values and conventions") {
  Dataset d;
  d.censor_level = 0.0;
  d.X = Eigen::MatrixXd::Ones(1, 1);

  SUBCASE("positive residual") {
    d.y = Eigen::VectorXd::Constant(1, 2.0);
    Eigen::VectorXd psi = score_psi(d, CoefVector(Eigen::VectorXd::Ones(1)));
    CHECK(psi[0] == doctest::Approx(1.0));
  }
  SUBCASE("sign(0) = 0 at the boundary residual") {
    d.y = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd psi = score_psi(d, CoefVector(Eigen::VectorXd::Ones(1)));
    CHECK(psi[0] == 0.0);
  }
  SUBCASE("fully inactive fit gives the zero vector") {
    Eigen::MatrixXd X(2, 1);
    X << -1.0, -2.0;
    d.X = X;
    d.y = Eigen::Vector2d(1.0, 1.0);
    Eigen::VectorXd psi = score_psi(d, CoefVector(Eigen::VectorXd::Ones(1)));
    CHECK(psi.isZero(0.0));
  }
}

TEST_CASE("score_psi sup-norm bounded by the design bound") {
  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd beta0 = testutil::random_vector(rng, 4);
    Dataset d = testutil::censored_dataset(rng, 30, 4, beta0, 0.2);
    CoefVector b(testutil::random_vector(rng, 4, 2.0));
    double bound = d.X.cwiseAbs().maxCoeff();
    CHECK(score_psi(d, b).cwiseAbs().maxCoeff() <= bound + 1e-12);
  }
}

TEST_CASE("sigma_hat") {
  SUBCASE("zero weights give the zero matrix") {
    ActiveWeights w;
    w.W = Eigen::MatrixXd::Zero(4, 2);
    w.indicator.assign(4, false);
    CHECK(sigma_hat(w).isZero(0.0));
  }
  SUBCASE("hand Gram computation") {
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 0.0, 1.0, 1.0;
    ActiveWeights w = active_weights(X, CoefVector(Eigen::Vector2d(1.0, 0.0)));
    Eigen::MatrixXd s = sigma_hat(w);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(0, 1) == doctest::Approx(0.5));
    CHECK(s(1, 0) == doctest::Approx(0.5));
    CHECK(s(1, 1) == doctest::Approx(0.5));
  }
  SUBCASE("symmetry is exact and the form is PSD") {
    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::MatrixXd X = testutil::random_matrix(rng, 15, 4);
      ActiveWeights w = active_weights(X, CoefVector(testutil::random_vector(rng, 4)));
      Eigen::MatrixXd s = sigma_hat(w);
      CHECK(s == s.transpose());
      for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd v = testutil::random_vector(rng, 4);
        CHECK(v.dot(s * v) >= -1e-12);
      }
    }
  }
}
