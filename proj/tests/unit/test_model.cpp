#include <doctest.h>

#include <cmath>
#include <random>

#include "kamlab/hamiltonian.hpp"
#include "kamlab/registry.hpp"

using namespace kamlab;
using namespace kamlab::model;

namespace {

// Forwards a mechanical Hamiltonian through the generic interface only, so
// the Newton path of legendre_transform is exercised against the closed form.
class GenericView final : public Hamiltonian {
  public:
    explicit GenericView(std::shared_ptr<const Hamiltonian> inner) : inner_(std::move(inner)) {}
    int dim() const override { return inner_->dim(); }
    double period() const override { return inner_->period(); }
    double value(const Vec& x, const Vec& p) const override { return inner_->value(x, p); }
    void grad_x(const Vec& x, const Vec& p, Vec& o) const override { inner_->grad_x(x, p, o); }
    void grad_p(const Vec& x, const Vec& p, Vec& o) const override { inner_->grad_p(x, p, o); }
    void hess_pp(const Vec& x, const Vec& p, Mat& o) const override { inner_->hess_pp(x, p, o); }

  private:
    std::shared_ptr<const Hamiltonian> inner_;
};

}  // namespace

TEST_CASE("trig poly evaluates periodically and differentiates analytically") {
    TrigPoly p({0.3, 0.7071067811865475, 0.25}, {-2.0, 0.4});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-30.0, 30.0);
    for (int k = 0; k < 200; ++k) {
        const double x = unif(rng);
        CHECK(p.value(x + kTwoPi) == doctest::Approx(p.value(x)).epsilon(1e-13));
        const double h = 1e-5;
        const double fd1 = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
        const double fd2 = (p.value(x + h) + p.value(x - h) - 2.0 * p.value(x)) / (h * h);
        CHECK(p.deriv(x) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(p.deriv2(x) == doctest::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("trig poly combine is termwise") {
    TrigPoly a({1.0, 2.0}, {0.5});
    TrigPoly b({0.0, -1.0, 3.0}, {0.25, 0.1});
    TrigPoly c = TrigPoly::combine(2.0, a, -1.0, b);
    for (double x : {0.0, 0.4, 2.9, 5.5})
        CHECK(c.value(x) == doctest::Approx(2.0 * a.value(x) - b.value(x)).epsilon(1e-14));
}

TEST_CASE("registered example values") {
    auto fig1 = make_fig1();
    // H(0,0) = 2 + 1/sqrt(2) + 1/4
    CHECK(fig1->h(0.0, 0.0) == doctest::Approx(2.9571067811865475).epsilon(1e-14));
    // restricted to the invariant graph: H(x, sin x) = 9/4 + cos(x)/sqrt(2)
    CHECK(fig1->h(kTwoPi / 4.0, 1.0) == doctest::Approx(2.25).epsilon(1e-14));
    for (int i = 0; i < 100; ++i) {
        const double x = kTwoPi * i / 100.0;
        CHECK(fig1->h(x, std::sin(x)) ==
              doctest::Approx(2.25 + std::cos(x) / std::sqrt(2.0)).epsilon(1e-13));
    }
    auto pend = make_pendulum();
    CHECK(pend->h(0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("family endpoints") {
    auto interp1 = make_fig2_interp(1.0);
    auto fig1 = make_fig1();
    auto interp0 = make_fig2_interp(0.0);
    auto fig2_0 = make_fig2(0.0);
    auto pend = make_pendulum();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi), up(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double x = ux(rng), p = up(rng);
        CHECK(interp1->h(x, p) == doctest::Approx(fig1->h(x, p)).epsilon(1e-13));
        CHECK(interp0->h(x, p) == doctest::Approx(pend->h(x, p)).epsilon(1e-13));
        CHECK(fig2_0->h(x, p) == doctest::Approx(pend->h(x, p)).epsilon(1e-13));
    }
    // the published family at alpha = 1 is NOT the fig1 system
    auto fig2_1 = make_fig2(1.0);
    CHECK(std::abs(fig2_1->h(kTwoPi / 4.0, 0.0) - fig1->h(kTwoPi / 4.0, 0.0)) > 1.0);
}

TEST_CASE("eval bundle checks finiteness and H_pp identity") {
    auto fig1 = make_fig1();
    const auto b = eval_hamiltonian(*fig1, {0.3}, {1.1});
    CHECK(b.h_pp(0, 0) == 1.0);
    CHECK(std::isfinite(b.h));
    CHECK_THROWS_AS(eval_hamiltonian(*fig1, {std::nan("")}, {0.0}), DomainError);
    CHECK_THROWS_AS(eval_hamiltonian(*fig1, {0.0, 1.0}, {0.0}), DomainError);
}

TEST_CASE("gradients agree with central differences") {
    auto check = [](const Hamiltonian& h) {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(0.0, kTwoPi), up(-2.0, 2.0);
        Vec hx, hp;
        for (int k = 0; k < 40; ++k) {
            const double x = ux(rng), p = up(rng), eps = 1e-6;
            h.grad_x({x}, {p}, hx);
            h.grad_p({x}, {p}, hp);
            const double fdx = (h.value({x + eps}, {p}) - h.value({x - eps}, {p})) / (2.0 * eps);
            const double fdp = (h.value({x}, {p + eps}) - h.value({x}, {p - eps})) / (2.0 * eps);
            CHECK(hx[0] == doctest::Approx(fdx).epsilon(1e-5));
            CHECK(hp[0] == doctest::Approx(fdp).epsilon(1e-5));
        }
    };
    check(*make_fig1());
    check(*make_pendulum());
    check(RigidRotor(1.3));
}

TEST_CASE("legendre transform closed forms") {
    // H = p^2/2: conjugate pair L = v^2/2
    MechanicalHamiltonian free(0.0, TrigPoly({0.0}, {}));
    const auto l0 = legendre_transform(free, {0.7}, {1.4});
    CHECK(l0.value == doctest::Approx(0.5 * 1.4 * 1.4).epsilon(1e-14));
    CHECK(l0.maximizer_p[0] == doctest::Approx(1.4).epsilon(1e-14));

    const auto l1 = legendre_transform(*make_fig1(), {0.0}, {2.0});
    CHECK(l1.value == doctest::Approx(-2.9571067811865475).epsilon(1e-13));
    CHECK(l1.maximizer_p[0] == doctest::Approx(0.0));

    const auto l2 = legendre_transform(*make_pendulum(), {kTwoPi / 2.0}, {0.0});
    CHECK(l2.value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(l2.maximizer_p[0] == doctest::Approx(0.0));
}

TEST_CASE("newton path matches the closed form") {
    auto fig1 = make_fig1();
    GenericView generic(fig1);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi), uv(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double x = ux(rng), v = uv(rng);
        const auto closed = legendre_transform(*fig1, {x}, {v});
        const auto numeric = legendre_transform(generic, {x}, {v});
        CHECK(numeric.value == doctest::Approx(closed.value).epsilon(1e-10));
        CHECK(numeric.maximizer_p[0] == doctest::Approx(closed.maximizer_p[0]).epsilon(1e-8));
    }
}

TEST_CASE("fenchel involution") {
    auto fig1 = make_fig1();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi), uv(-4.0, 4.0);
    Vec hp;
    for (int k = 0; k < 200; ++k) {
        const double x = ux(rng), v = uv(rng);
        const auto l = legendre_transform(*fig1, {x}, {v});
        const double p = l.maximizer_p[0];
        CHECK(fig1->value({x}, {p}) + l.value == doctest::Approx(p * v).epsilon(1e-8));
        fig1->grad_p({x}, {p}, hp);
        CHECK(hp[0] == doctest::Approx(v).epsilon(1e-8));
    }
}

TEST_CASE("legendre rejects degenerate Hamiltonians") {
    RigidRotor rotor(1.0);
    CHECK_THROWS_AS(legendre_transform(rotor, {0.0}, {2.0}), ConvergenceError);
}

TEST_CASE("tonelli check") {
    const auto r1 = tonelli_check(*make_fig1());
    CHECK(r1.pass);
    CHECK(r1.min_eigenvalue == doctest::Approx(1.0));

    MechanicalHamiltonian free(0.0, TrigPoly({0.0}, {}));
    CHECK(tonelli_check(free).pass);

    const auto r2 = tonelli_check(RigidRotor(1.0));
    CHECK_FALSE(r2.pass);
    CHECK(r2.min_eigenvalue == doctest::Approx(0.0));
}

TEST_CASE("registry lookup") {
    CHECK_NOTHROW(make_by_name("fig1"));
    CHECK_NOTHROW(make_by_name("fig2:0.75"));
    CHECK_NOTHROW(make_by_name("fig2_interp:0.3"));
    CHECK_NOTHROW(make_by_name("rigid:1.5"));
    CHECK_THROWS_AS(make_by_name("nosuch"), ConfigError);
    CHECK_THROWS_AS(make_by_name("fig2:abc"), ConfigError);
}
