#include "catch_amalgamated.hpp"

#include "qualidetect/errors.hpp"
#include "qualidetect/solver.hpp"

#include <algorithm>
#include <cmath>

using namespace qualidetect;
using Catch::Approx;

namespace {

FunctionSystem decay() {
    return FunctionSystem({"x"}, [](double, std::span<const double> x, std::span<double> d) { d[0] = -x[0]; });
}

double final_error(Method m, double dt) {
    IntegratorConfig cfg;
    cfg.method = m;
    cfg.dt = dt;
    cfg.t_end = 10.0;
    cfg.record_stride = 1;
    const auto tr = integrate(decay(), {1.0}, cfg);
    return std::abs(tr.channel("x").back() - std::exp(-10.0));
}

double peak_to_peak_tail(const std::vector<double>& y, double fraction) {
    const auto first = y.begin() + static_cast<std::ptrdiff_t>((1.0 - fraction) * static_cast<double>(y.size()));
    const auto [lo, hi] = std::minmax_element(first, y.end());
    return *hi - *lo;
}

}  // namespace

TEST_CASE("RK4 on exponential decay", "[solver]") {
    CHECK(final_error(Method::RK4Fixed, 0.01) < 1e-8);
}

TEST_CASE("RK4 is fourth order", "[solver][property]") {
    const double ratio = final_error(Method::RK4Fixed, 0.1) / final_error(Method::RK4Fixed, 0.05);
    CHECK(ratio == Approx(16.0).epsilon(0.2));
}

TEST_CASE("Dormand-Prince meets its tolerance on exponential decay", "[solver]") {
    CHECK(final_error(Method::DormandPrince45, 0.01) < 1e-9);
}

TEST_CASE("records every stride-th step on the exact grid", "[solver]") {
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 5.0;
    cfg.record_stride = 10;
    for (Method m : {Method::RK4Fixed, Method::DormandPrince45}) {
        cfg.method = m;
        const auto tr = integrate(decay(), {1.0}, cfg);
        REQUIRE(tr.size() == 51);
        CHECK(tr.times().front() == 0.0);
        CHECK(tr.times().back() == 5.0);
        CHECK(tr.sample_interval() == Approx(0.1).epsilon(1e-9));
        CHECK(tr.channel("x").front() == 1.0);
    }
}

TEST_CASE("planar system below threshold converges", "[solver]") {
    PlanarParams p;
    p.beta = 0.5;
    IntegratorConfig cfg;
    cfg.t_end = 10000.0;
    const auto tr = integrate(PlanarSystem(p), {0.3, 0.2}, cfg);
    REQUIRE(tr.termination == Termination::Completed);
    const auto& x = tr.channel("x_f");
    CHECK(std::abs(x.back() - x[x.size() / 2]) < 1e-4);
}

TEST_CASE("planar system above threshold oscillates", "[solver]") {
    PlanarParams p;
    p.beta = 1.2;
    IntegratorConfig cfg;
    cfg.t_end = 5000.0;
    const auto tr = integrate(PlanarSystem(p), {0.3, 0.2}, cfg);
    CHECK(peak_to_peak_tail(tr.channel("x_f"), 0.2) > 0.5);
}

TEST_CASE("RK4 and Dormand-Prince agree on the cascade", "[solver]") {
    PlanarParams p;
    p.beta = 1.2;
    CascadeSystem sys(p, DetectorParams{5.0});
    IntegratorConfig cfg;
    cfg.t_end = 200.0;
    cfg.dt = 0.005;
    const auto a = integrate(sys, {0.3, 0.2, 0.0}, cfg);
    cfg.method = Method::DormandPrince45;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    const auto b = integrate(sys, {0.3, 0.2, 0.0}, cfg);
    REQUIRE(a.size() == b.size());
    double sup = 0.0;
    for (const char* ch : {"x_f", "x_s", "beta_hat"}) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            sup = std::max(sup, std::abs(a.channel(ch)[i] - b.channel(ch)[i]));
        }
    }
    CHECK(sup < 1e-6);
}

TEST_CASE("planar trajectories stay in the absorbing box", "[solver][property]") {
    // |x_f| <= max(|x_f(0)|, 1) for tanh; x_s then follows x_f.
    for (double beta : {0.3, 1.0, 1.4, 1.9}) {
        for (double x0 : {-1.5, 0.0, 0.7}) {
            PlanarParams p;
            p.beta = beta;
            p.eps = 0.01;
            IntegratorConfig cfg;
            cfg.t_end = 2000.0;
            const auto tr = integrate(PlanarSystem(p), {x0, -x0}, cfg);
            const double bound = std::max(std::abs(x0), 1.0) + 1e-9;
            for (const char* ch : {"x_f", "x_s"}) {
                for (double v : tr.channel(ch)) CHECK(std::abs(v) <= bound);
            }
        }
    }
}

TEST_CASE("blow-up ends the run as diverged", "[solver]") {
    FunctionSystem grow({"x"}, [](double, std::span<const double> x, std::span<double> d) { d[0] = x[0] * x[0]; });
    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.dt = 1e-3;
    for (Method m : {Method::RK4Fixed, Method::DormandPrince45}) {
        cfg.method = m;
        const auto tr = integrate(grow, {1.0}, cfg);
        CHECK(tr.termination == Termination::Diverged);
        CHECK(tr.times().back() < 1.01);
    }
}

TEST_CASE("non-finite right-hand side throws", "[solver]") {
    FunctionSystem bad({"x"}, [](double t, std::span<const double>, std::span<double> d) {
        d[0] = t > 0.5 ? std::nan("") : 0.0;
    });
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(integrate(bad, {0.0}, cfg), IntegrationError);
}

TEST_CASE("configuration errors", "[solver]") {
    PlanarParams p;
    IntegratorConfig cfg;
    cfg.dt = 0.5;
    CHECK_THROWS_AS(integrate(PlanarSystem(p), {0.0, 0.0}, cfg), ConfigError);
    cfg.dt = -1.0;
    CHECK_THROWS_AS(integrate(PlanarSystem(p), {0.0, 0.0}, cfg), ConfigError);
    cfg.dt = 0.01;
    cfg.t_end = 0.0;
    CHECK_THROWS_AS(integrate(PlanarSystem(p), {0.0, 0.0}, cfg), ConfigError);
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(integrate(PlanarSystem(p), {0.0}, cfg), ConfigError);
    cfg.dt = 0.02;
    const auto hh0 = hh::initial_state(HHParams{}).to_array();
    CHECK_THROWS_AS(integrate(HHSystem(HHParams{}), std::vector<double>(hh0.begin(), hh0.end()), cfg), ConfigError);
    CHECK(parse_method("rk4") == Method::RK4Fixed);
    CHECK(parse_method("dopri45") == Method::DormandPrince45);
    CHECK_THROWS_AS(parse_method("euler"), ConfigError);
}

TEST_CASE("scheduled gain flips the detector sign during the ramp", "[solver][schedule]") {
    const auto s = BetaSchedule::parse("0:300:0.5:0;300:425:0.5:0.005;425:1000:1.2:0");
    PlanarParams p;
    IntegratorConfig cfg;
    cfg.t_end = 1000.0;
    const auto tr = integrate_piecewise_beta(s, p, DetectorParams{5.0}, CascadeState{}, cfg);
    REQUIRE(tr.has_channel("beta"));
    const auto& t = tr.times();
    const auto& bh = tr.channel("beta_hat");
    double flip = -1.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] > 300.0 && bh[i - 1] <= 0.0 && bh[i] > 0.0) {
            flip = t[i];
            break;
        }
    }
    CHECK(flip >= 370.0);
    CHECK(flip <= 430.0);
    // resting part of the schedule keeps the estimate negative
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > 150.0 && t[i] < 300.0) CHECK(bh[i] < 0.0);
    }
}

TEST_CASE("constant schedule reproduces the fixed-gain run", "[solver][schedule]") {
    PlanarParams p;
    p.beta = 1.2;
    IntegratorConfig cfg;
    cfg.t_end = 300.0;
    const auto a = integrate_piecewise_beta(BetaSchedule::constant(1.2, 300.0), p, DetectorParams{5.0},
                                            CascadeState{}, cfg);
    const auto b = integrate(CascadeSystem(p, DetectorParams{5.0}), {0.3, 0.2, 0.0}, cfg);
    REQUIRE(a.size() == b.size());
    for (const char* ch : {"x_f", "x_s", "beta_hat", "beta"}) CHECK(a.channel(ch) == b.channel(ch));
}

TEST_CASE("schedule must cover the integration interval", "[solver][schedule]") {
    IntegratorConfig cfg;
    cfg.t_end = 500.0;
    CHECK_THROWS_AS(integrate_piecewise_beta(BetaSchedule::constant(1.0, 400.0), PlanarParams{}, DetectorParams{},
                                             CascadeState{}, cfg),
                    ConfigError);
}

TEST_CASE("trajectory invariants", "[solver]") {
    Trajectory tr({"a", "b"});
    const double v[2] = {1.0, 2.0};
    tr.append(0.0, v);
    tr.append(1.0, v);
    CHECK_THROWS_AS(tr.append(1.0, v), AnalysisError);
    const double one[1] = {1.0};
    CHECK_THROWS_AS(tr.append(2.0, one), AnalysisError);
    CHECK_THROWS_AS(tr.add_channel("c", {1.0}), AnalysisError);
    tr.add_channel("c", {3.0, 4.0});
    CHECK(tr.channel("c")[1] == 4.0);
    CHECK_THROWS_AS(tr.add_channel("a", {0.0, 0.0}), AnalysisError);
    CHECK_THROWS_AS(tr.channel("zzz"), AnalysisError);
    tr.append(3.0, std::vector<double>{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(tr.sample_interval(), AnalysisError);
}

TEST_CASE("HH system projects tiny gating overshoot", "[solver][hh]") {
    HHSystem sys(HHParams{});
    std::vector<double> x = {-65.0, 1.0 + 1e-12, -1e-12, 0.5, 0.0, -65.0, 0.3};
    sys.project(x);
    CHECK(x[1] == 1.0);
    CHECK(x[2] == 0.0);
    x[3] = 1.1;
    CHECK_THROWS_AS(sys.project(x), IntegrationError);
}

TEST_CASE("driven detector pair contracts under a constant nonzero input", "[solver]") {
    std::vector<double> t, xf, xs;
    for (int i = 0; i <= 1000; ++i) {
        t.push_back(0.1 * i);
        xf.push_back(0.5);
        xs.push_back(0.0);
    }
    DrivenDetectorSystem sys(DetectorParams{2.0}, t, xf, xs, 0.0);
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    cfg.dt = 0.01;
    const auto tr = integrate(sys, {1.0, -1.0}, cfg);
    // difference decays like exp(-k x^2 t); at t = 10 that is exp(-5)
    REQUIRE(tr.times()[100] == Approx(10.0));
    const double d = tr.channel("beta_hat_1")[100] - tr.channel("beta_hat_2")[100];
    CHECK(d == Approx(2.0 * std::exp(-5.0)).epsilon(1e-8));
    CHECK(std::abs(tr.channel("beta_hat_1").back() - tr.channel("beta_hat_2").back()) < 1e-12);
}
