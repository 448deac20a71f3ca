#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "superres/errors.hpp"
#include "superres/fisher.hpp"
#include "superres/qfi.hpp"
#include "test_support.hpp"

using namespace superres;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}

}  // namespace

TEST_SUITE("qfi") {

TEST_CASE("closed form reference values") {
    const auto g = PointSpreadFunction::gaussian(1.0);
    const auto far = qfi_closed_form(OnePhotonModel::from_budget(g, 0.0, 40.0, 1.0));
    CHECK(far.j11 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(far.j22 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(far.j12 == 0.0);
    CHECK(far.provenance == Provenance::Quantum);

    const auto zero = qfi_closed_form(OnePhotonModel::from_budget(g, 0.0, 0.0, 1.0));
    CHECK(zero.j11 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(zero.j22 == 0.25);

    const auto s = qfi_closed_form(OnePhotonModel::from_budget(PointSpreadFunction::sinc(1.0), 0.0, 0.7, 3.0));
    CHECK(s.j22 == doctest::Approx(kPi * kPi).epsilon(1e-12));
    CHECK(s.photon_budget == doctest::Approx(3.0));
}

TEST_CASE("eigenvalues and SLD elements of the four-dimensional decomposition") {
    const auto m = OnePhotonModel::from_budget(PointSpreadFunction::gaussian(1.0), 0.0, 2.0, 1.0);
    const auto d = sld_decompose(m);
    CHECK(d.eigenvalues[1] == doctest::Approx((1.0 + std::exp(-0.5)) / 2.0).epsilon(1e-14));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.80327).epsilon(1e-5));
    CHECK(d.eigenvalues[0] + d.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.eigenvalues[2] == 0.0);
    CHECK(d.eigenvalues[3] == 0.0);

    // Basis norms from quadrature agree with the Gram identities.
    CHECK(d.c3 * d.c3 == doctest::Approx(d.c3_sq_identity).epsilon(1e-9));
    CHECK(d.c4 * d.c4 == doctest::Approx(d.c4_sq_identity).epsilon(1e-9));

    const double delta = d.overlaps.delta;
    const double gamma = d.overlaps.gamma;
    const double sm = std::sqrt(1.0 - delta);
    const double sp = std::sqrt(1.0 + delta);
    const Eigen::Matrix4d& l1 = d.sld_x1;
    const Eigen::Matrix4d& l2 = d.sld_x2;
    const double tol = 1e-9;
    CHECK(l1(0, 0) == doctest::Approx(gamma / (1.0 - delta)).epsilon(tol));
    CHECK(l2(0, 0) == doctest::Approx(-gamma / (1.0 - delta)).epsilon(tol));
    CHECK(l1(0, 1) == doctest::Approx(gamma * delta / std::sqrt(1.0 - delta * delta)).epsilon(tol));
    CHECK(l2(0, 1) == doctest::Approx(l1(0, 1)).epsilon(tol));
    CHECK(l1(0, 2) == doctest::Approx(d.c3 / sm).epsilon(tol));
    CHECK(l2(0, 2) == doctest::Approx(-d.c3 / sm).epsilon(tol));
    CHECK(l1(0, 3) == doctest::Approx(d.c4 / sm).epsilon(tol));
    CHECK(l2(0, 3) == doctest::Approx(d.c4 / sm).epsilon(tol));
    CHECK(l1(1, 1) == doctest::Approx(-gamma / (1.0 + delta)).epsilon(tol));
    CHECK(l2(1, 1) == doctest::Approx(gamma / (1.0 + delta)).epsilon(tol));
    CHECK(l1(1, 2) == doctest::Approx(d.c3 / sp).epsilon(tol));
    CHECK(l2(1, 2) == doctest::Approx(d.c3 / sp).epsilon(tol));
    CHECK(l1(1, 3) == doctest::Approx(d.c4 / sp).epsilon(tol));
    CHECK(l2(1, 3) == doctest::Approx(-d.c4 / sp).epsilon(tol));
    CHECK(std::abs(l1(2, 2)) + std::abs(l1(2, 3)) + std::abs(l1(3, 3)) < 1e-14);

    for (const Eigen::Matrix4d* m4 : {&d.sld_x1, &d.sld_x2, &d.sld_centroid, &d.sld_separation}) {
        CHECK(((*m4) - m4->transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK((d.sld_centroid - (l1 + l2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((d.sld_separation - 0.5 * (l2 - l1)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("SLD oracle reproduces the closed form") {
    const auto g = PointSpreadFunction::gaussian(1.0);
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const auto m = OnePhotonModel::from_budget(g, 0.0, t, 1.0);
        const auto c = qfi_closed_form(m);
        const auto o = qfi_from_sld(sld_decompose(m), m);
        CHECK(rel_diff(o.j11, c.j11) < 1e-9);
        CHECK(rel_diff(o.j22, c.j22) < 1e-9);
        CHECK(std::abs(o.j12) < 1e-9);
    }
    for (const auto& psf : {g, PointSpreadFunction::sinc(1.0)}) {
        for (double t : log_grid(1e-2, 10.0, 50)) {
            const auto q = qfi_with_oracle(OnePhotonModel::from_budget(psf, 0.0, t * psf.width(), 1.0));
            REQUIRE(q.oracle.has_value());
            CHECK(q.deviation <= 1e-8);
        }
    }
}

TEST_CASE("K22 is constant and K11 bounded") {
    for (const auto& psf : {PointSpreadFunction::gaussian(1.0), PointSpreadFunction::sinc(2.0)}) {
        const double dk2 = spatial_frequency_variance(psf);
        for (int i = 0; i <= 120; ++i) {
            const auto k = qfi_closed_form(OnePhotonModel::from_budget(psf, 0.0, 0.05 * i * psf.width(), 2.0));
            CHECK(rel_diff(k.j22 / 2.0, dk2) <= 1e-9);
            CHECK(k.j11 > 0.0);
            CHECK(k.j11 <= 4.0 * 2.0 * dk2 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("direct imaging is dominated by the quantum information") {
    for (const auto& psf : {PointSpreadFunction::gaussian(1.0), PointSpreadFunction::sinc(1.0)}) {
        const double scale = spatial_frequency_variance(psf);
        for (int i = 0; i <= 24; ++i) {
            const auto m = OnePhotonModel::from_budget(psf, 0.0, 0.25 * i * psf.width(), 1.0);
            const auto k = qfi_closed_form(m);
            const auto j = direct_imaging_fisher(m);
            Eigen::Matrix2d diff;
            diff << k.j11 - j.j11, k.j12 - j.j12, k.j12 - j.j12, k.j22 - j.j22;
            const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(diff).eigenvalues();
            CHECK(ev.minCoeff() >= -1e-8 * scale);
        }
    }
}

TEST_CASE("source relabeling and degenerate basis") {
    const auto g = PointSpreadFunction::gaussian(1.0);
    const OnePhotonModel a(g, -0.6, 0.9, 0.05, 40);
    const OnePhotonModel b(g, 0.9, -0.6, 0.05, 40);
    const auto ka = qfi_with_oracle(a);
    const auto kb = qfi_with_oracle(b);
    CHECK(ka.closed_form.j11 == kb.closed_form.j11);
    CHECK(ka.closed_form.j22 == kb.closed_form.j22);
    CHECK(rel_diff(ka.oracle->j11, kb.oracle->j11) < 1e-12);
    CHECK(rel_diff(ka.oracle->j22, kb.oracle->j22) < 1e-12);
    CHECK(ka.closed_form.photon_budget == doctest::Approx(2.0));

    const auto zero = OnePhotonModel::from_budget(g, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(sld_decompose(zero), DegenerateBasis);
    CHECK_THROWS_AS(sld_decompose(OnePhotonModel::from_budget(g, 0.0, 1e-7, 1.0)), DegenerateBasis);
    const auto q0 = qfi_with_oracle(zero);
    CHECK_FALSE(q0.oracle.has_value());
    CHECK(q0.closed_form.j22 == 0.25);
}

TEST_CASE("model validation") {
    const auto g = PointSpreadFunction::gaussian(1.0);
    CHECK_THROWS_AS(OnePhotonModel(g, 0.0, 1.0, 0.2, 10), InvalidArgument);
    CHECK_THROWS_AS(OnePhotonModel(g, 0.0, 1.0, 0.0, 10), InvalidArgument);
    CHECK_THROWS_AS(OnePhotonModel(g, 0.0, 1.0, 0.05, 0), InvalidArgument);
    CHECK_THROWS_AS(OnePhotonModel::from_budget(g, 0.0, -1.0, 1.0), InvalidArgument);
    const auto m = OnePhotonModel::from_budget(g, 0.3, 1.0, 7.3);
    CHECK(m.epsilon() <= 0.1);
    CHECK(m.photons() == doctest::Approx(7.3).epsilon(1e-14));
    CHECK(m.centroid() == doctest::Approx(0.3));
    CHECK(m.separation() == doctest::Approx(1.0));
}

}
