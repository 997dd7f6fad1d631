#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lieforms/errors.hpp"
#include "lieforms/quadrature.hpp"

#include <cmath>

using namespace lieforms;

namespace {
double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }
} // namespace

TEST_CASE("gauss rules integrate polynomials exactly") {
    for (int n = 1; n <= 12; ++n) {
        const auto& r = gauss_line(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(gauss_line(0), InvalidArgument);
}

TEST_CASE("triangle rules integrate barycentric monomials exactly") {
    for (int deg : {1, 2, 3, 4, 5, 6, 9, 10, 14}) {
        const auto& r = triangle_rule(deg);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b)
                for (int c = 0; a + b + c <= deg; ++c) {
                    double s = 0.0;
                    for (std::size_t q = 0; q < r.points.size(); ++q) {
                        const auto& l = r.points[q];
                        s += r.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
                    }
                    // Normalised to unit area.
                    const double exact = 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
                    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
                }
    }
    CHECK_THROWS_AS(triangle_rule(31), InvalidArgument);
}
