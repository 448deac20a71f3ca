#include "superres/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "superres/errors.hpp"
#include "superres/fisher.hpp"

namespace superres {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::HgSpade: return "HgSpade";
        case Scheme::BinarySpade: return "BinarySpade";
        case Scheme::MisalignedBinary: return "MisalignedBinary";
        case Scheme::MisalignedHg: return "MisalignedHg";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    for (Scheme s : {Scheme::HgSpade, Scheme::BinarySpade, Scheme::MisalignedBinary, Scheme::MisalignedHg}) {
        if (to_string(s) == name) return s;
    }
    throw InvalidArgument("unknown scheme '" + name + "'");
}

std::int64_t ModeCountRecord::excitation_sum() const {
    if (binary) return counts.size() == 2 ? counts[1] : 0;
    std::int64_t sum = 0;
    for (std::size_t q = 0; q < counts.size(); ++q) sum += static_cast<std::int64_t>(q) * counts[q];
    return sum;
}

bool ModeCountRecord::consistent() const {
    if (photons < 0) return false;
    if (binary && counts.size() != 2) return false;
    std::int64_t total = 0;
    for (auto c : counts) {
        if (c < 0) return false;
        total += c;
    }
    return total == photons;
}

std::int64_t sample_hg_sufficient(std::int64_t photons, double q, Philox4x32& rng) {
    if (photons < 0 || !(q >= 0.0)) throw InvalidArgument("sample_hg_sufficient: need L >= 0 and Q >= 0");
    const double mean = static_cast<double>(photons) * q;
    if (mean == 0.0) return 0;
    boost::random::poisson_distribution<std::int64_t, double> dist(mean);
    return dist(rng);
}

ModeCountRecord sample_hg_categorical(std::int64_t photons, const std::vector<double>& mode_probs, Philox4x32& rng) {
    if (photons < 0 || mode_probs.empty()) throw InvalidArgument("sample_hg_categorical: bad arguments");
    ModeCountRecord rec;
    rec.photons = photons;
    rec.counts.assign(mode_probs.size(), 0);
    boost::random::discrete_distribution<std::size_t, double> dist(mode_probs.begin(), mode_probs.end());
    for (std::int64_t l = 0; l < photons; ++l) ++rec.counts[dist(rng)];
    return rec;
}

double mle_hg(std::int64_t stat, std::int64_t photons, double sigma) {
    if (photons == 0) throw ZeroPhotons("mle_hg: no photons detected");
    if (photons < 0 || stat < 0) throw InvalidArgument("mle_hg: counts must be non-negative");
    return 4.0 * sigma * std::sqrt(static_cast<double>(stat) / static_cast<double>(photons));
}

ModeCountRecord sample_binary(std::int64_t photons, double p0, Philox4x32& rng) {
    if (photons < 0 || !(p0 >= 0.0 && p0 <= 1.0)) throw InvalidArgument("sample_binary: need L >= 0, p0 in [0,1]");
    std::int64_t m0 = 0;
    if (p0 == 1.0) {
        m0 = photons;
    } else if (p0 > 0.0 && photons > 0) {
        boost::random::binomial_distribution<std::int64_t, double> dist(photons, p0);
        m0 = dist(rng);
    }
    return {photons, true, {m0, photons - m0}};
}

double mle_binary(std::int64_t m0, std::int64_t photons, double sigma) {
    if (photons == 0) throw ZeroPhotons("mle_binary: no photons detected");
    if (photons < 0 || m0 < 0 || m0 > photons) throw InvalidArgument("mle_binary: need 0 <= m0 <= L");
    if (m0 == 0) return 2.0 * sigma;
    const double q = -std::log(static_cast<double>(m0) / static_cast<double>(photons));
    return 4.0 * sigma * std::sqrt(q);
}

double conditional_crb(Scheme scheme, double theta2, double sigma, std::int64_t photons) {
    if (photons <= 0) throw InvalidArgument("conditional_crb: L must be positive");
    const double base = 4.0 * sigma * sigma / static_cast<double>(photons);
    if (scheme == Scheme::HgSpade || scheme == Scheme::MisalignedHg) return base;
    const double q = hg_excitation(theta2, sigma);
    return q == 0.0 ? base : base * std::expm1(q) / q;
}

namespace {

// Stream family in the counter; both binary schemes share one so that a
// zero misalignment reproduces the aligned draws exactly.
std::uint32_t stream_family(Scheme s) {
    switch (s) {
        case Scheme::HgSpade: return 1;
        case Scheme::BinarySpade:
        case Scheme::MisalignedBinary: return 2;
        case Scheme::MisalignedHg: return 3;
    }
    return 0;
}

struct GridPoint {
    double theta2 = 0.0;
    double q = 0.0;   // aligned excitation
    double p0 = 1.0;  // fundamental-mode probability
    std::vector<double> mode_probs;
};

GridPoint prepare_point(const SweepConfig& cfg, double theta2) {
    GridPoint g;
    g.theta2 = theta2;
    g.q = hg_excitation(theta2, cfg.sigma);
    const MisalignmentConfig mis{cfg.xi, cfg.xi_sign};
    switch (cfg.scheme) {
        case Scheme::HgSpade: break;
        case Scheme::BinarySpade: g.p0 = std::exp(-g.q); break;
        case Scheme::MisalignedBinary: {
            if (cfg.xi == 0.0) {
                g.p0 = std::exp(-g.q);
                break;
            }
            const auto e = misaligned_excitation(theta2, cfg.sigma, mis);
            g.p0 = 0.5 * (std::exp(-e.q1) + std::exp(-e.q2));
            break;
        }
        case Scheme::MisalignedHg: {
            const auto e = misaligned_excitation(theta2, cfg.sigma, mis);
            g.mode_probs = hg_mode_probabilities(e.q1, e.q2, poisson_mode_cutoff(std::max(e.q1, e.q2)));
            break;
        }
    }
    return g;
}

double estimate_once(const SweepConfig& cfg, const GridPoint& g, Philox4x32& rng) {
    std::int64_t photons = cfg.photons;
    if (cfg.random_photons) {
        boost::random::poisson_distribution<std::int64_t, double> dist(static_cast<double>(cfg.photons));
        photons = dist(rng);
    }
    if (photons == 0) return cfg.zero_photon_estimate * cfg.sigma;
    switch (cfg.scheme) {
        case Scheme::HgSpade: return mle_hg(sample_hg_sufficient(photons, g.q, rng), photons, cfg.sigma);
        case Scheme::MisalignedHg: {
            const auto rec = sample_hg_categorical(photons, g.mode_probs, rng);
            return mle_hg(rec.excitation_sum(), photons, cfg.sigma);
        }
        case Scheme::BinarySpade:
        case Scheme::MisalignedBinary: {
            const auto rec = sample_binary(photons, g.p0, rng);
            return mle_binary(rec.counts[0], photons, cfg.sigma);
        }
    }
    return 0.0;
}

}  // namespace

EstimationReport run_error_sweep(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw InvalidArgument("run_error_sweep: trials must be >= 1");
    if (cfg.photons < 1) throw InvalidArgument("run_error_sweep: L must be >= 1");
    if (!(cfg.sigma > 0.0)) throw InvalidArgument("run_error_sweep: sigma must be positive");
    if (cfg.trials > std::int64_t{std::numeric_limits<std::uint32_t>::max()}) {
        throw InvalidArgument("run_error_sweep: too many trials");
    }
    if ((cfg.scheme == Scheme::HgSpade || cfg.scheme == Scheme::BinarySpade) && cfg.xi != 0.0) {
        throw InvalidArgument("run_error_sweep: aligned schemes take xi = 0");
    }

    std::vector<GridPoint> points;
    points.reserve(cfg.theta2_grid.size());
    for (double t : cfg.theta2_grid) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("run_error_sweep: grid values must be >= 0");
        points.push_back(prepare_point(cfg, t));
    }

    // Work units are (grid point, block of trials); each unit sums its trials
    // in index order and units are reduced in a fixed order afterwards.
    const std::int64_t blocks = (cfg.trials + kTrialBlock - 1) / kTrialBlock;
    const std::size_t units = points.size() * static_cast<std::size_t>(blocks);
    std::vector<double> partial(units, 0.0);
    const std::uint32_t family = stream_family(cfg.scheme);

    auto run_unit = [&](std::size_t u) {
        const std::size_t i = u / static_cast<std::size_t>(blocks);
        const std::int64_t b = static_cast<std::int64_t>(u % static_cast<std::size_t>(blocks));
        const std::int64_t first = b * kTrialBlock;
        const std::int64_t last = std::min(cfg.trials, first + kTrialBlock);
        double sum = 0.0;
        for (std::int64_t t = first; t < last; ++t) {
            Philox4x32 rng(cfg.seed, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(i), family);
            const double err = estimate_once(cfg, points[i], rng) - points[i].theta2;
            sum += err * err;
        }
        partial[u] = sum;
    };

    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(units, 1)));
    if (workers <= 1) {
        for (std::size_t u = 0; u < units; ++u) run_unit(u);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t u; (u = next.fetch_add(1)) < units;) run_unit(u);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = units;
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    EstimationReport rep;
    rep.scheme = cfg.scheme;
    rep.photons = cfg.photons;
    rep.theta2_grid = cfg.theta2_grid;
    rep.trials = cfg.trials;
    rep.seed = cfg.seed;
    rep.xi = cfg.xi;
    rep.xi_sign = cfg.xi_sign;
    rep.sigma = cfg.sigma;
    rep.random_photons = cfg.random_photons;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double sum = 0.0;
        for (std::int64_t b = 0; b < blocks; ++b) sum += partial[i * static_cast<std::size_t>(blocks) + static_cast<std::size_t>(b)];
        rep.mse.push_back(sum / static_cast<double>(cfg.trials));
        rep.crb.push_back(conditional_crb(cfg.scheme, points[i].theta2, cfg.sigma, cfg.photons));
    }
    return rep;
}

EstimationReport run_error_sweep(Scheme scheme, std::int64_t photons, const std::vector<double>& theta2_grid,
                                 std::int64_t trials, double xi, std::uint64_t seed) {
    SweepConfig cfg;
    cfg.scheme = scheme;
    cfg.photons = photons;
    cfg.theta2_grid = theta2_grid;
    cfg.trials = trials;
    cfg.xi = xi;
    cfg.seed = seed;
    return run_error_sweep(cfg);
}

}  // namespace superres
