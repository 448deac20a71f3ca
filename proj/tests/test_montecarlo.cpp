#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "doctest.h"
#include "superres/errors.hpp"
#include "superres/fisher.hpp"
#include "superres/model.hpp"
#include "superres/montecarlo.hpp"
#include "superres/report_io.hpp"

using namespace superres;

namespace {

// Pearson chi-square p-value of observed counts against Poisson(mean), with
// adjacent bins pooled until every expected count is at least 5.
double poisson_gof_pvalue(const std::map<std::int64_t, std::int64_t>& hist, std::int64_t n, double mean) {
    boost::math::poisson_distribution<double> pd(mean);
    std::vector<double> expected, observed;
    double e = 0.0, o = 0.0, cum = 0.0;
    const std::int64_t top = hist.empty() ? 0 : hist.rbegin()->first;
    for (std::int64_t k = 0; k <= top; ++k) {
        const double pk = boost::math::pdf(pd, static_cast<double>(k));
        cum += pk;
        e += n * pk;
        auto it = hist.find(k);
        o += it == hist.end() ? 0.0 : static_cast<double>(it->second);
        if (e >= 5.0) {
            expected.push_back(e);
            observed.push_back(o);
            e = o = 0.0;
        }
    }
    // Upper tail joins the last bin.
    e += n * (1.0 - cum);
    if (expected.empty()) return 1.0;
    expected.back() += e;
    observed.back() += o;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double d = observed[i] - expected[i];
        chi2 += d * d / expected[i];
    }
    const double dof = static_cast<double>(expected.size()) - 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), chi2));
}

std::vector<double> mc_grid() {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back((0.05 * (19 - i) + 2.0 * i) / 19.0);
    return g;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("HG sufficient statistic sampler") {
    Philox4x32 rng(1, 0, 0, 0);
    for (int i = 0; i < 100; ++i) CHECK(sample_hg_sufficient(50, 0.0, rng) == 0);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(sample_hg_sufficient(100, 1.0, rng));
        sum += s;
        sum2 += s * s;
    }
    const double mean = sum / n;
    const double var = (sum2 - n * mean * mean) / (n - 1);
    CHECK(std::abs(mean - 100.0) <= 1.0);
    CHECK(std::abs(var - 100.0) <= 2.0);
    CHECK_THROWS_AS(sample_hg_sufficient(-1, 1.0, rng), InvalidArgument);
}

TEST_CASE("binary sampler") {
    Philox4x32 rng(2, 0, 0, 0);
    for (int i = 0; i < 50; ++i) {
        CHECK(sample_binary(37, 1.0, rng).counts[0] == 37);
        CHECK(sample_binary(37, 0.0, rng).counts[0] == 0);
    }
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto r = sample_binary(1000, 0.5, rng);
        CHECK(r.consistent());
        sum += static_cast<double>(r.counts[0]);
    }
    CHECK(std::abs(sum / n - 500.0) <= 1.5);
    CHECK_THROWS_AS(sample_binary(10, 1.5, rng), InvalidArgument);
}

TEST_CASE("categorical photon draws reproduce the sufficient-statistic shortcut") {
    const std::int64_t l = 10;
    const double q = 0.6;
    const auto probs = hg_mode_probabilities(q, q, poisson_mode_cutoff(q));
    const std::int64_t n = 40000;
    std::map<std::int64_t, std::int64_t> categorical, shortcut;
    for (std::int64_t t = 0; t < n; ++t) {
        Philox4x32 a(99, static_cast<std::uint32_t>(t), 0, 3);
        const auto rec = sample_hg_categorical(l, probs, a);
        REQUIRE(rec.consistent());
        ++categorical[rec.excitation_sum()];
        Philox4x32 b(99, static_cast<std::uint32_t>(t), 0, 1);
        ++shortcut[sample_hg_sufficient(l, q, b)];
    }
    CHECK(poisson_gof_pvalue(categorical, n, static_cast<double>(l) * q) > 1e-3);
    CHECK(poisson_gof_pvalue(shortcut, n, static_cast<double>(l) * q) > 1e-3);
}

TEST_CASE("estimators") {
    CHECK(mle_hg(0, 10, 1.0) == 0.0);
    CHECK(mle_hg(10, 10, 1.0) == 4.0);
    CHECK(mle_hg(25, 100, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mle_hg(25, 100, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(mle_hg(0, 0, 1.0), ZeroPhotons);

    CHECK(mle_binary(10, 10, 1.0) == 0.0);
    CHECK(mle_binary(0, 10, 1.0) == 2.0);
    CHECK(mle_binary(0, 10, 3.0) == 6.0);
    // m0 / L = e^{-1} exactly is not representable with integers; use the formula at a rational point.
    CHECK(mle_binary(1, 4, 1.0) == doctest::Approx(4.0 * std::sqrt(std::log(4.0))).epsilon(1e-15));
    CHECK_THROWS_AS(mle_binary(0, 0, 1.0), ZeroPhotons);
    CHECK_THROWS_AS(mle_binary(11, 10, 1.0), InvalidArgument);
}

TEST_CASE("binary estimator at m0/L = 1/e") {
    // Large L with m0 = round(L/e) approaches Q = 1, theta2 = 4 sigma.
    const std::int64_t l = 1'000'000'000;
    const auto m0 = static_cast<std::int64_t>(std::llround(static_cast<double>(l) * std::exp(-1.0)));
    CHECK(mle_binary(m0, l, 1.0) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("mode count records") {
    ModeCountRecord full{6, false, {3, 1, 1, 1}};
    CHECK(full.consistent());
    CHECK(full.excitation_sum() == 6);
    ModeCountRecord bin{5, true, {2, 3}};
    CHECK(bin.consistent());
    CHECK(bin.excitation_sum() == 3);
    ModeCountRecord bad{5, true, {2, 2}};
    CHECK_FALSE(bad.consistent());
    ModeCountRecord negative{0, false, {1, -1}};
    CHECK_FALSE(negative.consistent());
}

TEST_CASE("conditional CRB") {
    CHECK(conditional_crb(Scheme::HgSpade, 1.0, 1.0, 100) == doctest::Approx(0.04));
    CHECK(conditional_crb(Scheme::BinarySpade, 0.0, 1.0, 100) == doctest::Approx(0.04));
    CHECK(conditional_crb(Scheme::BinarySpade, 4.0, 1.0, 100) ==
          doctest::Approx(0.04 * (std::exp(1.0) - 1.0)).epsilon(1e-14));
    // Inverse of the binary information at budget L.
    const auto m = OnePhotonModel::from_budget(PointSpreadFunction::gaussian(1.0), 0.0, 1.3, 100.0);
    CHECK(conditional_crb(Scheme::BinarySpade, 1.3, 1.0, 100) ==
          doctest::Approx(1.0 / binary_spade_fisher_gaussian(m).j22).epsilon(1e-12));
}

TEST_CASE("sweeps are reproducible and independent of thread count") {
    SweepConfig cfg;
    cfg.scheme = Scheme::BinarySpade;
    cfg.photons = 50;
    cfg.theta2_grid = {0.1, 0.8, 1.6};
    cfg.trials = 3000;
    cfg.seed = 5;
    cfg.threads = 1;
    const auto a = run_error_sweep(cfg);
    cfg.threads = 3;
    const auto b = run_error_sweep(cfg);
    CHECK(a.mse == b.mse);
    CHECK(a.crb == b.crb);
    cfg.seed = 6;
    CHECK(run_error_sweep(cfg).mse != a.mse);
    for (double v : a.mse) CHECK(v >= 0.0);
    CHECK(a.mse.size() == a.theta2_grid.size());
    CHECK(a.crb.size() == a.theta2_grid.size());
}

TEST_CASE("aligned and zero-misalignment binary sweeps draw identically") {
    const auto grid = mc_grid();
    const auto a = run_error_sweep(Scheme::BinarySpade, 100, grid, 2000, 0.0, 11);
    const auto b = run_error_sweep(Scheme::MisalignedBinary, 100, grid, 2000, 0.0, 11);
    CHECK(a.mse == b.mse);
}

TEST_CASE("HG estimator approaches the bound as L grows") {
    std::vector<double> mse;
    for (std::int64_t l : {100, 1000, 10000}) {
        mse.push_back(run_error_sweep(Scheme::HgSpade, l, {1.0}, 10000, 0.0, 3).mse[0]);
    }
    CHECK(mse[1] < mse[0]);
    CHECK(mse[2] < mse[1]);
    CHECK(std::abs(mse[2] * 10000.0 / 4.0 - 1.0) <= 0.1);
}

TEST_CASE("misaligned schemes") {
    const auto grid = mc_grid();
    const auto rb = run_error_sweep(Scheme::MisalignedBinary, 100, grid, 4000, 0.1, 17);
    // Well below the direct-imaging bound at budget L for small separations.
    const auto g = PointSpreadFunction::gaussian(1.0);
    const double direct = direct_imaging_fisher(OnePhotonModel::from_budget(g, 0.0, grid[1], 100.0)).j22;
    CHECK(rb.mse[1] < 0.5 / direct);

    SweepConfig cfg;
    cfg.scheme = Scheme::MisalignedHg;
    cfg.photons = 20;
    cfg.theta2_grid = {0.2, 1.0};
    cfg.trials = 2000;
    cfg.xi = 0.2;
    const auto rh = run_error_sweep(cfg);
    CHECK(rh.mse[0] > 0.0);
    CHECK(rh.crb[0] == doctest::Approx(0.2));

    CHECK_THROWS_AS(run_error_sweep(Scheme::HgSpade, 100, grid, 10, 0.1, 1), InvalidArgument);
    CHECK_THROWS_AS(run_error_sweep(Scheme::HgSpade, 0, grid, 10, 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(run_error_sweep(Scheme::HgSpade, 10, grid, 0, 0.0, 1), InvalidArgument);
}

TEST_CASE("random photon number mode") {
    SweepConfig cfg;
    cfg.scheme = Scheme::HgSpade;
    cfg.photons = 3;
    cfg.theta2_grid = {0.5};
    cfg.trials = 20000;
    cfg.random_photons = true;
    const auto r = run_error_sweep(cfg);
    // P(L = 0) = e^{-3} and those trials report 2 sigma: error (1.5)^2 each.
    CHECK(r.mse[0] > std::exp(-3.0) * 2.25 * 0.8);
    CHECK(r.random_photons);
    cfg.zero_photon_estimate = 0.5;
    CHECK(run_error_sweep(cfg).mse[0] < r.mse[0]);
}

TEST_CASE("report serialization") {
    const auto r = run_error_sweep(Scheme::HgSpade, 20, {0.05, 1.0}, 100, 0.0, 9);
    std::ostringstream out;
    write_report_csv(out, r, {"note"});
    const std::string s = out.str();
    CHECK(s.rfind("# note\ntheta2,mse,crb,trials,L,xi,scheme,seed\n0.05,", 0) == 0);
    CHECK(s.find(",100,20,0,HgSpade,9\n") != std::string::npos);
    const auto j = report_to_json(r);
    CHECK(j["scheme"] == "HgSpade");
    CHECK(j["seed"] == 9);
    CHECK(j["mse"].size() == 2);
    CHECK(scheme_from_string("MisalignedBinary") == Scheme::MisalignedBinary);
    CHECK_THROWS_AS(scheme_from_string("nope"), InvalidArgument);
}

}
