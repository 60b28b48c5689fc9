#include <cmath>
#include <vector>

#include "../support/oracles.hpp"
#include "iclscope/rng.hpp"
#include "iclscope/stats/distributions.hpp"
#include "iclscope/stats/mantel.hpp"
#include "iclscope/stats/tests.hpp"
#include "test_helpers.hpp"

using namespace iclscope;
using namespace iclscope::stats;
using doctest::Approx;

namespace {

Eigen::MatrixXd random_symmetric(std::size_t m, std::uint64_t seed) {
  Rng r(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) a(i, j) = a(j, i) = r.uniform();
  }
  return a;
}

Eigen::MatrixXd permuted(const Eigen::MatrixXd& a, const std::vector<std::size_t>& p) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out(i, j) = a(static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(p[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("distribution functions against reference values") {
    CHECK(normal_sf(1.96) == Approx(0.024997895148220435).epsilon(1e-10));
    CHECK(normal_cdf(0.0) == Approx(0.5));
    CHECK(student_t_cdf(0.0, 5.0) == Approx(0.5));
    CHECK(student_t_cdf(-1.5, 3.7) == Approx(0.10679908460100665).epsilon(1e-9));
    // F(2, 6) survival has the closed form (1 + f/3)^-3.
    CHECK(f_sf(3.0, 2.0, 6.0) == Approx(0.125).epsilon(1e-12));
    CHECK(f_sf(3.0, 2.0, 6.0) + f_cdf(3.0, 2.0, 6.0) == Approx(1.0));
    CHECK(kolmogorov_sf(1.36) == Approx(0.049485876755377876).epsilon(1e-9));
    CHECK(kolmogorov_sf(0.5) == Approx(0.9639452436648751).epsilon(1e-9));
    CHECK(kolmogorov_cdf(0.0) == 0.0);
  }

  TEST_CASE("moments") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(mean(x) == 2.5);
    CHECK(variance(x) == Approx(5.0 / 3.0));
    CHECK(variance(x, 0) == Approx(1.25));
  }

  TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3};
    CHECK(pearson(x, std::vector<double>{3, 5, 7}) == Approx(1.0));
    CHECK(pearson(x, std::vector<double>{-1, -2, -3}) == Approx(-1.0));
    CHECK(pearson(x, std::vector<double>{1, 3, 2}) == Approx(0.5).epsilon(1e-12));
    CHECK_ERROR_CODE(pearson(x, std::vector<double>{2, 2, 2}), ErrorCode::kConstantInput);
  }

  TEST_CASE("spearman and average ranks") {
    CHECK(average_ranks(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(spearman(x, std::vector<double>{1, 8, 27, 64}) == Approx(1.0));
    CHECK(spearman(x, std::vector<double>{4, 3, 2, 1}) == Approx(-1.0));
    CHECK(spearman(x, std::vector<double>{1, 3, 2, 4}) == Approx(0.8).epsilon(1e-12));
  }

  TEST_CASE("welch t test") {
    const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
    auto r = welch_t_test(a, b);
    CHECK(r.statistic == Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(*r.df == Approx(4.0));
    CHECK(r.p_value == Approx(0.2878641347266908).epsilon(1e-9));
    r = welch_t_test(a, a);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == Approx(1.0));
    r = welch_t_test(std::vector<double>{2.1, 3.4, 1.9, 5.0, 4.4}, std::vector<double>{6.2, 5.9, 7.7, 6.1});
    CHECK(r.statistic == Approx(-4.218617699290732).epsilon(1e-10));
    CHECK(*r.df == Approx(6.637633251400818).epsilon(1e-10));
    CHECK(r.p_value == Approx(0.004443100836920716).epsilon(1e-8));
    CHECK_ERROR_CODE(welch_t_test(std::vector<double>{1}, b), ErrorCode::kTooFewSamples);
  }

  TEST_CASE("planted one-sigma shift with n=100 is detected") {
    Rng r(3);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) {
      a.push_back(r.gaussian());
      b.push_back(r.gaussian() + 1.0);
    }
    CHECK(welch_t_test(a, b).p_value < 1e-3);
  }

  TEST_CASE("anova") {
    auto r = anova_oneway({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    CHECK(r.statistic == Approx(3.0).epsilon(1e-12));
    CHECK(r.p_value == Approx(0.125).epsilon(1e-10));
    CHECK(*r.df == 2.0);
    CHECK(*r.df2 == 6.0);
    r = anova_oneway({{2.1, 3.4, 1.9, 5.0, 4.4}, {6.2, 5.9, 7.7, 6.1}, {3.3, 4.1, 2.8}});
    CHECK(r.statistic == Approx(11.090292802538576).epsilon(1e-10));
    CHECK(r.p_value == Approx(0.0037291692027791707).epsilon(1e-8));
    r = anova_oneway({{1, 2, 3}, {1, 2, 3}});
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == Approx(1.0));
    CHECK_ERROR_CODE(anova_oneway({{1, 2, 3}}), ErrorCode::kTooFewGroups);
  }

  TEST_CASE("fisher z comparison") {
    auto r = fisher_z_compare(0.5, 103, 0.3, 103);
    CHECK(r.statistic == Approx(1.69555).epsilon(1e-5));
    CHECK(r.p_value == Approx(0.08997).epsilon(1e-4));
    const auto s = fisher_z_compare(0.3, 103, 0.5, 103);
    CHECK(s.statistic == Approx(-r.statistic));
    CHECK(s.p_value == Approx(r.p_value));
    r = fisher_z_compare(0.4, 50, 0.4, 80);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == Approx(1.0));
  }

  TEST_CASE("kolmogorov smirnov") {
    const std::vector<double> a{0.1, 0.4, 0.7};
    CHECK(ks_two_sample(a, a).statistic == 0.0);
    CHECK(ks_two_sample(std::vector<double>{0, 0}, std::vector<double>{1, 1}).statistic == 1.0);
    const auto r = ks_two_sample(std::vector<double>{0.1, 0.4, 0.7, 1.2, 1.9},
                                 std::vector<double>{0.3, 0.8, 1.5, 2.2, 2.8, 3.1});
    CHECK(r.statistic == Approx(0.5));
    CHECK(r.p_value == Approx(0.502914033641129).epsilon(1e-9));
    Rng g(1);
    std::vector<double> u, v;
    for (int i = 0; i < 200; ++i) {
      u.push_back(g.uniform());
      v.push_back(g.uniform() + 0.5);
    }
    CHECK(ks_two_sample(u, v).p_value < 1e-3);
  }

  TEST_CASE("mantel: identity, equivariance, determinism") {
    const auto M = random_symmetric(12, 5);
    const auto r = mantel(M, M, 999, CorrelationMethod::kPearson, 1);
    CHECK(r.statistic == Approx(1.0));
    CHECK(r.p_value == Approx(1.0 / 1000.0));

    const auto H = random_symmetric(12, 6);
    const auto base = mantel(M, H, 499, CorrelationMethod::kPearson, 3);
    CHECK(base.p_value == mantel(M, H, 499, CorrelationMethod::kPearson, 3).p_value);
    std::vector<std::size_t> p{3, 0, 11, 5, 1, 2, 4, 10, 9, 8, 7, 6};
    // Relabel items consistently: the permutation set relabels with them.
    std::vector<std::vector<std::size_t>> perms, perms_relabelled;
    std::vector<std::size_t> inv(12);
    for (std::size_t i = 0; i < 12; ++i) inv[p[i]] = i;
    for (std::size_t k = 0; k < 200; ++k) {
      const auto q = mantel_permutation(12, 9, k);
      perms.push_back(q);
      std::vector<std::size_t> q2(12);
      for (std::size_t i = 0; i < 12; ++i) q2[i] = inv[q[p[i]]];
      perms_relabelled.push_back(q2);
    }
    const auto a = mantel_with_permutations(M, H, perms, CorrelationMethod::kPearson);
    const auto b = mantel_with_permutations(permuted(M, p), permuted(H, p), perms_relabelled, CorrelationMethod::kPearson);
    CHECK(a.statistic == Approx(b.statistic).epsilon(1e-12));
    CHECK(a.p_value == b.p_value);
  }

  TEST_CASE("mantel statistic equals the longhand triangle correlation") {
    const auto M = random_symmetric(9, 21), H = random_symmetric(9, 22);
    const auto r = mantel(M, H, 0, CorrelationMethod::kPearson, 0);
    CHECK(r.statistic == Approx(oracle::pearson_longhand(oracle::triangle(M), oracle::triangle(H))).epsilon(1e-12));
    CHECK(upper_triangle(M) == oracle::triangle(M));
  }
}
