#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <optional>
#include <random>
#include <sfce/simplex.hpp>

using namespace sfce;

namespace {

LpProblem make(std::vector<double> obj, std::vector<double> lo, std::vector<double> hi,
               std::vector<LpConstraint> rows) {
  LpProblem p;
  p.objective = std::move(obj);
  p.lower = std::move(lo);
  p.upper = std::move(hi);
  p.rows = std::move(rows);
  return p;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference optimum by vertex enumeration: every basic solution from n active
// constraints (rows treated as equalities plus variable bounds), kept when
// feasible. Exponential, so only for tiny instances.
std::optional<double> vertex_opt(const LpProblem& p) {
  const int n = p.num_vars();
  // Collect all hyperplanes a.x = b.
  std::vector<std::pair<std::vector<double>, double>> planes;
  for (const auto& r : p.rows) {
    std::vector<double> a(n, 0.0);
    for (auto [j, c] : r.terms) a[j] += c;
    planes.push_back({a, r.rhs});
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    planes.push_back({a, p.lower[j]});
    if (p.upper[j] < kInf) planes.push_back({a, p.upper[j]});
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < p.lower[j] - 1e-7 || x[j] > p.upper[j] + 1e-7) return false;
    }
    for (const auto& r : p.rows) {
      double lhs = 0;
      for (auto [j, c] : r.terms) lhs += c * x[j];
      if (r.sense == RowSense::LessEq && lhs > r.rhs + 1e-7) return false;
      if (r.sense == RowSense::GreaterEq && lhs < r.rhs - 1e-7) return false;
      if (r.sense == RowSense::Equal && std::abs(lhs - r.rhs) > 1e-7) return false;
    }
    return true;
  };

  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == n) {
      // Solve the n x n system by Gaussian elimination.
      std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
      for (int r = 0; r < n; ++r) {
        for (int j = 0; j < n; ++j) a[r][j] = planes[pick[r]].first[j];
        a[r][n] = planes[pick[r]].second;
      }
      for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
          if (piv == -1 || std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-9) return;  // singular choice
        std::swap(a[col], a[piv]);
        for (int r = 0; r < n; ++r) {
          if (r == col) continue;
          double f = a[r][col] / a[col][col];
          for (int j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
        }
      }
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j) x[j] = a[j][n] / a[j][j];
      if (!feasible(x)) return;
      double obj = 0;
      for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int i = start; i < static_cast<int>(planes.size()); ++i) {
      pick[depth] = i;
      choose(i + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

}  // namespace

TEST_CASE("textbook instances") {
  SUBCASE("bounded minimum at a constraint intersection") {
    // min -x - 2y s.t. x + y <= 4, x <= 3, y <= 3
    auto p = make({-1, -2}, {0, 0}, {3, 3}, {{{{0, 1.0}, {1, 1.0}}, RowSense::LessEq, 4}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-7.0));
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.x[1] == doctest::Approx(3.0));
  }
  SUBCASE("equality and greater-equal rows") {
    // min x + y s.t. x + y = 2, x >= 0.5
    auto p = make({1, 1}, {0, 0}, {kInf, kInf},
                  {{{{0, 1.0}, {1, 1.0}}, RowSense::Equal, 2}, {{{0, 1.0}}, RowSense::GreaterEq, 0.5}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(2.0));
  }
  SUBCASE("negative lower bounds are shifted") {
    // min x s.t. x >= -5 (bound), x + y >= -2, y in [0,1]
    auto p = make({1, 0}, {-5, 0}, {kInf, 1}, {{{{0, 1.0}, {1, 1.0}}, RowSense::GreaterEq, -2}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-3.0));
    CHECK(r.x[1] == doctest::Approx(1.0));
  }
  SUBCASE("fixed variables are substituted") {
    auto p = make({1, 1}, {2, 0}, {2, kInf}, {{{{0, 1.0}, {1, 1.0}}, RowSense::GreaterEq, 5}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.x[1] == doctest::Approx(3.0));
  }
  SUBCASE("infeasible systems are reported") {
    auto p = make({1}, {0}, {1},
                  {{{{0, 1.0}}, RowSense::GreaterEq, 2}});
    CHECK(solve_lp(p).status == LpStatus::Infeasible);
    auto q = make({1, 1}, {0, 0}, {kInf, kInf},
                  {{{{0, 1.0}, {1, 1.0}}, RowSense::Equal, 1},
                   {{{0, 1.0}, {1, 1.0}}, RowSense::Equal, 3}});
    CHECK(solve_lp(q).status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded directions are reported") {
    auto p = make({-1}, {0}, {kInf}, {});
    CHECK(solve_lp(p).status == LpStatus::Unbounded);
  }
  SUBCASE("bounds crossing makes the problem infeasible") {
    auto p = make({1}, {3}, {2}, {});
    CHECK(solve_lp(p).status == LpStatus::Infeasible);
  }
  SUBCASE("redundant equalities do not break phase one") {
    auto p = make({1, 1}, {0, 0}, {kInf, kInf},
                  {{{{0, 1.0}, {1, 1.0}}, RowSense::Equal, 2},
                   {{{0, 2.0}, {1, 2.0}}, RowSense::Equal, 4}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(2.0));
  }
  SUBCASE("degenerate vertex (Beale-style cycling trap)") {
    auto p = make({-0.75, 150, -0.02, 6}, {0, 0, 0, 0}, {kInf, kInf, kInf, kInf},
                  {{{{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, RowSense::LessEq, 0},
                   {{{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, RowSense::LessEq, 0},
                   {{{2, 1.0}}, RowSense::LessEq, 1}});
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-0.05));
  }
  SUBCASE("lower bounds must be finite") {
    auto p = make({1}, {-kInf}, {kInf}, {});
    CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
  }
}

TEST_CASE("random instances agree with vertex enumeration") {
  std::mt19937 rng(20240817);
  auto coef = [&] { return static_cast<double>(static_cast<int>(rng() % 21)) - 10.0; };
  int optimal = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int n = 2 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 4);
    LpProblem p;
    for (int j = 0; j < n; ++j) {
      p.objective.push_back(coef());
      p.lower.push_back(0.0);
      p.upper.push_back(1.0 + static_cast<double>(rng() % 9));  // boxed: always bounded
    }
    for (int r = 0; r < m; ++r) {
      LpConstraint c;
      for (int j = 0; j < n; ++j) {
        double a = coef();
        if (a != 0) c.terms.push_back({j, a});
      }
      c.rhs = coef();
      unsigned s = rng() % 3;
      c.sense = s == 0 ? RowSense::LessEq : s == 1 ? RowSense::GreaterEq : RowSense::Equal;
      p.rows.push_back(std::move(c));
    }
    auto expect = vertex_opt(p);
    auto got = solve_lp(p);
    if (expect) {
      REQUIRE_MESSAGE(got.status == LpStatus::Optimal, "trial ", trial);
      CHECK_MESSAGE(got.objective == doctest::Approx(*expect).epsilon(1e-6), "trial ", trial);
    } else {
      CHECK_MESSAGE(got.status == LpStatus::Infeasible, "trial ", trial);
    }
    if (got.status == LpStatus::Optimal) ++optimal;
  }
  CHECK(optimal > 100);  // the generator must exercise the feasible branch
}

TEST_CASE("reported point is feasible and consistent with the objective") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    LpProblem p;
    for (int j = 0; j < n; ++j) {
      p.objective.push_back(static_cast<double>(rng() % 7) - 3.0);
      p.lower.push_back(0.0);
      p.upper.push_back(5.0);
    }
    LpConstraint c;
    for (int j = 0; j < n; ++j) c.terms.push_back({j, 1.0});
    c.sense = RowSense::GreaterEq;
    c.rhs = static_cast<double>(rng() % (2 * n));
    p.rows.push_back(c);
    auto r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    double lhs = 0, obj = 0;
    for (int j = 0; j < n; ++j) {
      CHECK(r.x[j] >= -1e-9);
      CHECK(r.x[j] <= 5.0 + 1e-9);
      lhs += r.x[j];
      obj += p.objective[j] * r.x[j];
    }
    CHECK(lhs >= c.rhs - 1e-7);
    CHECK(obj == doctest::Approx(r.objective));
  }
}
