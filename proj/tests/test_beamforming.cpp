#include <doctest.h>

#include <cmath>

#include "irsee/beamforming.hpp"
#include "irsee/rng.hpp"
#include "irsee/units.hpp"

using namespace irsee;

namespace {

Eigen::VectorXd constant(double v, Eigen::Index k) { return Eigen::VectorXd::Constant(k, v); }

}  // namespace

TEST_CASE("socp reformulation matches the SINR definition") {
  SUBCASE("threshold equality for a single aligned user") {
    Eigen::MatrixXcd f(3, 1), w(3, 1);
    f.col(0) << 1.0, std::complex<double>(0.0, 2.0), -1.0;
    const double gamma = 2.0, sigma2 = 0.25;
    // ||w|| chosen so ||f||^2 ||w||^2 = gamma sigma2 with w aligned to f.
    w.col(0) = f.col(0) * std::sqrt(gamma * sigma2) / f.col(0).squaredNorm();
    const auto ok = socp_reform_check(f, w, constant(gamma, 1), constant(sigma2, 1));
    CHECK(ok[0]);
  }

  SUBCASE("zero beams fail") {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(4, 2);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(4, 2);
    const auto ok = socp_reform_check(f, w, constant(1.0, 2), constant(1.0, 2));
    CHECK(!ok[0]);
    CHECK(!ok[1]);
  }

  SUBCASE("agrees with the direct SINR comparison on random instances") {
    Rng rng(31);
    const Eigen::Index m = 4, k = 3;
    const Eigen::VectorXd gamma = constant(1.5, k), sigma2 = constant(0.6, k);
    int checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const Eigen::MatrixXcd f = rng.cnormal_matrix(m, k);
      const Eigen::MatrixXcd w = rng.cnormal_matrix(m, k);
      const Eigen::VectorXd sinr = achieved_sinr(f, w, sigma2);
      const auto ok = socp_reform_check(f, w, gamma, sigma2, 0.0);
      for (Eigen::Index u = 0; u < k; ++u) {
        if (std::abs(sinr(u) - gamma(u)) < 1e-9) continue;  // razor-edge draw
        CHECK(ok[u] == (sinr(u) >= gamma(u)));
        ++checked;
      }
    }
    CHECK(checked > 25000);
  }
}

TEST_CASE("dual fixed point") {
  const double gamma = db_to_linear(4.0), sigma2 = 0.3;

  SUBCASE("single user reduces to the matched-filter power") {
    Rng rng(7);
    const Eigen::VectorXcd f = rng.cnormal_vector(5);
    const Eigen::VectorXd lambda =
        solve_dual_fixed_point(f, constant(gamma, 1), constant(sigma2, 1));
    CHECK(lambda(0) == doctest::Approx(gamma * sigma2 / f.squaredNorm()).epsilon(1e-7));
    const BeamformingSolution sol =
        beamform_lagrangian(f, lambda, constant(gamma, 1), constant(sigma2, 1));
    CHECK(sol.total_power() ==
          doctest::Approx(gamma * sigma2 / f.squaredNorm()).epsilon(1e-7));
    // Direction is maximum ratio transmission.
    const double align = std::abs(f.normalized().dot(sol.w.col(0).normalized()));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("strong duality: sum of duals equals the transmit power") {
    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::MatrixXcd f = rng.cnormal_matrix(4, 2);
      const Eigen::VectorXd lambda =
          solve_dual_fixed_point(f, constant(gamma, 2), constant(sigma2, 2));
      const BeamformingSolution sol =
          beamform_lagrangian(f, lambda, constant(gamma, 2), constant(sigma2, 2));
      CHECK(lambda.sum() == doctest::Approx(sol.total_power()).epsilon(1e-4));
    }
  }

  SUBCASE("orthogonal channels decouple") {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(4, 2);
    f(0, 0) = 2.0;
    f(2, 1) = std::complex<double>(0.0, 1.5);
    const Eigen::VectorXd lambda =
        solve_dual_fixed_point(f, constant(gamma, 2), constant(sigma2, 2));
    const BeamformingSolution sol =
        beamform_lagrangian(f, lambda, constant(gamma, 2), constant(sigma2, 2));
    for (Eigen::Index u = 0; u < 2; ++u)
      CHECK(sol.powers(u) ==
            doctest::Approx(gamma * sigma2 / f.col(u).squaredNorm()).epsilon(1e-7));
  }
}

TEST_CASE("minimum-power beams hit every target with equality") {
  Rng rng(9);
  const double gamma = db_to_linear(4.0), sigma2 = 1e-3;
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::MatrixXcd f = rng.cnormal_matrix(6, 3);
    const Eigen::VectorXd lambda =
        solve_dual_fixed_point(f, constant(gamma, 3), constant(sigma2, 3));
    const BeamformingSolution sol =
        beamform_lagrangian(f, lambda, constant(gamma, 3), constant(sigma2, 3));
    const Eigen::VectorXd sinr = achieved_sinr(f, sol.w, constant(sigma2, 3));
    for (Eigen::Index u = 0; u < 3; ++u)
      CHECK(sinr(u) == doctest::Approx(gamma).epsilon(1e-6));
  }
}

TEST_CASE("power allocation decouples for orthogonal directions") {
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(4, 2);
  f(0, 0) = 1.0;
  f(1, 1) = 3.0;
  const Eigen::MatrixXcd dirs = Eigen::MatrixXcd::Identity(4, 2);
  const Eigen::VectorXd p = allocate_powers(f, dirs, constant(2.0, 2), constant(0.5, 2));
  CHECK(p(0) == doctest::Approx(2.0 * 0.5 / 1.0));
  CHECK(p(1) == doctest::Approx(2.0 * 0.5 / 9.0));
}

TEST_CASE("zero forcing") {
  SUBCASE("orthonormal channels reduce to matched filtering") {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(4, 2);
    f(0, 0) = 1.0;
    f(3, 1) = 1.0;
    const Eigen::MatrixXcd dirs = zf_directions(f);
    CHECK(std::abs(f.col(0).normalized().dot(dirs.col(0))) == doctest::Approx(1.0));
    CHECK(std::abs(f.col(1).normalized().dot(dirs.col(1))) == doctest::Approx(1.0));
  }

  SUBCASE("random full-rank instances null all cross terms") {
    Rng rng(10);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::MatrixXcd f = rng.cnormal_matrix(6, 3);
      const BeamformingSolution sol = beamform_zf(f, constant(2.0, 3));
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) {
          if (i == j) continue;
          CHECK(std::abs(f.col(i).dot(sol.w.col(j))) <= 1e-8);
        }
      CHECK(sol.powers == constant(2.0, 3));
    }
  }

  SUBCASE("near-singular square channel errors or blows up the power") {
    Rng rng(11);
    Eigen::MatrixXcd f = rng.cnormal_matrix(4, 4);
    f.col(3) = f.col(2) + 1e-8 * rng.cnormal_vector(4);  // condition ~1e8
    bool flagged = false;
    try {
      const Eigen::MatrixXcd dirs = zf_directions(f);
      const Eigen::VectorXd p = allocate_powers(f, dirs, constant(1.0, 4), constant(1.0, 4));
      flagged = p.sum() > 1e6;  // channel-inversion power blow-up
    } catch (const BfError&) {
      flagged = true;
    }
    CHECK(flagged);
  }
}

TEST_CASE("regularized inversion limits") {
  Rng rng(12);
  const Eigen::MatrixXcd f = rng.cnormal_matrix(6, 3);
  const double sigma2 = 1.0;

  SUBCASE("lambda -> 0 gives per-column matched filters") {
    const Eigen::MatrixXcd dirs = mmse_directions(f, 1e-12, sigma2);
    for (Eigen::Index u = 0; u < 3; ++u)
      CHECK(std::abs(f.col(u).normalized().dot(dirs.col(u))) ==
            doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("lambda -> infinity approaches zero forcing") {
    const Eigen::MatrixXcd mmse = mmse_directions(f, 1e8, sigma2);
    const Eigen::MatrixXcd zf = zf_directions(f);
    for (Eigen::Index u = 0; u < 3; ++u) {
      const double cosang = std::min(1.0, std::abs(zf.col(u).dot(mmse.col(u))));
      CHECK(std::acos(cosang) < 1e-4);
    }
  }

  SUBCASE("single user direction is MRT for any lambda") {
    const Eigen::MatrixXcd f1 = rng.cnormal_matrix(5, 1);
    for (double lambda : {1e-6, 1.0, 1e6}) {
      const Eigen::MatrixXcd dirs = mmse_directions(f1, lambda, sigma2);
      CHECK(std::abs(f1.col(0).normalized().dot(dirs.col(0))) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("mmse line search") {
  Rng rng(13);
  const Eigen::MatrixXcd f = rng.cnormal_matrix(6, 3);
  const double budget = 12.0;
  const Eigen::VectorXd gamma = constant(1.5, 3), sigma2 = constant(0.8, 3);

  SUBCASE("the default lambda = budget/K is a grid point and wins a synthetic peak") {
    const double center = budget / 3.0;
    const auto res = mmse_line_search(
        f, budget,
        [&](const BeamformingSolution& sol) {
          const double d = std::log10(sol.lambda(0)) - std::log10(center);
          return -d * d;
        },
        0.1, gamma, sigma2);
    CHECK(res.lambda == doctest::Approx(center).epsilon(1e-12));
  }

  SUBCASE("a peak off the default is located within one grid step") {
    const double target = budget / 3.0 * std::pow(10.0, 0.63);
    const auto res = mmse_line_search(
        f, budget,
        [&](const BeamformingSolution& sol) {
          const double d = std::log10(sol.lambda(0)) - std::log10(target);
          return -d * d;
        },
        0.1, gamma, sigma2);
    CHECK(std::abs(std::log10(res.lambda) - std::log10(target)) <= 0.1 + 1e-12);
  }

  SUBCASE("constant objective resolves ties to the smallest lambda") {
    const Eigen::MatrixXcd f1 = rng.cnormal_matrix(4, 1);
    const auto res = mmse_line_search(
        f1, budget, [](const BeamformingSolution&) { return 1.0; }, 0.1, constant(1.5, 1),
        constant(0.8, 1));
    CHECK(res.lambda <= budget * std::pow(10.0, -2.9));
  }

  SUBCASE("single user: power is independent of the regularization") {
    const Eigen::MatrixXcd f1 = rng.cnormal_matrix(4, 1);
    std::vector<double> powers;
    mmse_line_search(
        f1, budget,
        [&](const BeamformingSolution& sol) {
          powers.push_back(sol.total_power());
          return 0.0;
        },
        0.1, constant(1.5, 1), constant(0.8, 1));
    for (double p : powers) CHECK(p == doctest::Approx(powers.front()).epsilon(1e-12));
  }
}

TEST_CASE("achieved SINRs are invariant to per-user channel phase rotations") {
  Rng rng(14);
  const Eigen::MatrixXcd f = rng.cnormal_matrix(5, 3);
  const Eigen::MatrixXcd w = rng.cnormal_matrix(5, 3);
  const Eigen::VectorXd sigma2 = constant(0.4, 3);
  Eigen::MatrixXcd rotated = f;
  rotated.col(1) *= std::polar(1.0, 1.234);
  const Eigen::VectorXd a = achieved_sinr(f, w, sigma2);
  const Eigen::VectorXd b = achieved_sinr(rotated, w, sigma2);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}
