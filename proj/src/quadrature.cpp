#include "lieforms/quadrature.hpp"

#include "lieforms/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace lieforms {

namespace {

LineRule make_gauss(int n) {
    LineRule r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.points[n - 1 - i] = 0.5 * (1.0 + x);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

void add_orbit3(TriangleRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({b, a, a});
    r.points.push_back({a, b, a});
    r.points.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

std::vector<TriangleRule> make_triangle_rules() {
    std::vector<TriangleRule> rules(6);
    rules[0].points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    rules[0].weights = {1.0};
    rules[1] = rules[0];
    add_orbit3(rules[2], 1.0 / 6, 1.0 / 3);
    // Degree 3 uses the degree 4 rule (positive weights).
    add_orbit3(rules[4], 0.091576213509770743, 0.109951743655321885);
    add_orbit3(rules[4], 0.445948490915964886, 0.223381589678011466);
    rules[3] = rules[4];
    rules[5].points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    rules[5].weights = {0.225};
    add_orbit3(rules[5], 0.101286507323456339, 0.125939180544827153);
    add_orbit3(rules[5], 0.470142064105115090, 0.132394152788506181);
    return rules;
}

} // namespace

const LineRule& gauss_line(int n) {
    if (n < 1 || n > 64) throw InvalidArgument("gauss_line: number of points must be in 1..64");
    static std::mutex mu;
    static std::map<int, LineRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

namespace {

// Collapsed (Duffy) tensor Gauss rule with n points per direction; exact to degree 2n-2.
TriangleRule make_collapsed(int n) {
    const auto& g = gauss_line(n);
    TriangleRule r;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = g.points[i], v = g.points[j];
            const double l1 = u, l2 = v * (1.0 - u);
            r.points.push_back({1.0 - l1 - l2, l1, l2});
            r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
        }
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
    static const std::vector<TriangleRule> rules = make_triangle_rules();
    if (degree < 1 || degree > 30) throw InvalidArgument("triangle_rule: degree must be in 1..30");
    if (degree <= 5) return rules[degree];
    static std::mutex mu;
    static std::map<int, TriangleRule> cache;
    std::lock_guard lock(mu);
    const int n = (degree + 3) / 2;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_collapsed(n)).first;
    return it->second;
}

} // namespace lieforms
