#include "lieforms/problems.hpp"

#include <cmath>
#include <numbers>

namespace lieforms {

using std::numbers::pi;

VelocityField swirl_velocity() {
    VelocityField b;
    b.value = [](const Vec2& p, double) {
        const double x = p.x, y = p.y;
        const double ax = 1 - x * x, ay = 1 - y * y;
        return Vec2{ax * ax * (y - y * y * y), -ay * ay * (x - x * x * x)};
    };
    b.jacobian = [](const Vec2& p, double) {
        const double x = p.x, y = p.y;
        const double ax = 1 - x * x, ay = 1 - y * y;
        return Mat2{-4 * x * ax * (y - y * y * y), ax * ax * (1 - 3 * y * y), -ay * ay * (1 - 3 * x * x),
                    4 * y * ay * (x - x * x * x)};
    };
    return b;
}

VelocityField compressible_velocity() {
    VelocityField b;
    b.value = [](const Vec2& p, double) {
        return Vec2{std::sin(pi * p.x) * (1 - p.y * p.y), std::sin(pi * p.y) * (1 - p.x * p.x)};
    };
    b.jacobian = [](const Vec2& p, double) {
        return Mat2{pi * std::cos(pi * p.x) * (1 - p.y * p.y), -2 * p.y * std::sin(pi * p.x),
                    -2 * p.x * std::sin(pi * p.y), pi * std::cos(pi * p.y) * (1 - p.x * p.x)};
    };
    return b;
}

namespace {

// Spatial profile and its derivatives up to second order.
struct Profile {
    double u1, u2;
    double u1x, u1y, u2x, u2y;
    double u1xx, u1xy, u1yy, u2xx, u2xy, u2yy;
};

Profile profile(const Vec2& p) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    const double cx = std::cos(pi * p.x), cy = std::cos(pi * p.y);
    const double ax = 1 - p.x * p.x, ay = 1 - p.y * p.y;
    Profile f;
    f.u1 = sx * sy;
    f.u2 = ax * ay;
    f.u1x = pi * cx * sy;
    f.u1y = pi * sx * cy;
    f.u2x = -2 * p.x * ay;
    f.u2y = -2 * p.y * ax;
    f.u1xx = -pi * pi * sx * sy;
    f.u1yy = -pi * pi * sx * sy;
    f.u1xy = pi * pi * cx * cy;
    f.u2xx = -2 * ay;
    f.u2yy = -2 * ax;
    f.u2xy = 4 * p.x * p.y;
    return f;
}

double curl_of(const Profile& f) { return f.u2x - f.u1y; }

// (d/dy c, -d/dx c) with c the scalar curl.
Vec2 curl_curl(const Profile& f) {
    const double cx = f.u2xx - f.u1xy;
    const double cy = f.u2xy - f.u1yy;
    return {cy, -cx};
}

// beta div u + R grad(u . R beta)
Vec2 flux_transport(const Profile& f, const Vec2& b, const Mat2& db) {
    const double div = f.u1x + f.u2y;
    // s = -u1 b2 + u2 b1
    const double sx = -f.u1x * b.y - f.u1 * db.c + f.u2x * b.x + f.u2 * db.a;
    const double sy = -f.u1y * b.y - f.u1 * db.d + f.u2y * b.x + f.u2 * db.b;
    return Vec2{b.x * div - sy, b.y * div + sx};
}

// grad(beta . u) + curl(u) R beta
Vec2 lie_transport(const Profile& f, const Vec2& b, const Mat2& db) {
    const double gx = db.a * f.u1 + b.x * f.u1x + db.c * f.u2 + b.y * f.u2x;
    const double gy = db.b * f.u1 + b.x * f.u1y + db.d * f.u2 + b.y * f.u2y;
    const double c = curl_of(f);
    return Vec2{gx - c * b.y, gy + c * b.x};
}

} // namespace

AnalyticForm transient_solution() {
    return AnalyticForm::one_form(
        [](const Vec2& x, double t) {
            const auto f = profile(x);
            return std::cos(2 * pi * t) * Vec2{f.u1, f.u2};
        },
        [](const Vec2& x, double t) { return std::cos(2 * pi * t) * curl_of(profile(x)); });
}

AnalyticForm stationary_solution() {
    return AnalyticForm::one_form(
        [](const Vec2& x, double) {
            const auto f = profile(x);
            return Vec2{f.u1, f.u2};
        },
        [](const Vec2& x, double) { return curl_of(profile(x)); });
}

AnalyticForm transient_source(const VelocityField& beta, double eps) {
    return AnalyticForm::one_form([beta, eps](const Vec2& x, double t) {
        const auto f = profile(x);
        const double tc = std::cos(2 * pi * t);
        const double dtc = -2 * pi * std::sin(2 * pi * t);
        const Vec2 b = beta(x, t);
        const Mat2 db = beta.gradient(x, t);
        return dtc * Vec2{f.u1, f.u2} + tc * (eps * curl_curl(f) + flux_transport(f, b, db));
    });
}

AnalyticForm stationary_source(const VelocityField& beta, double eps) {
    return AnalyticForm::one_form([beta, eps](const Vec2& x, double t) {
        const auto f = profile(x);
        const Vec2 b = beta(x, t);
        const Mat2 db = beta.gradient(x, t);
        return Vec2{f.u1, f.u2} + eps * curl_curl(f) + lie_transport(f, b, db);
    });
}

} // namespace lieforms
