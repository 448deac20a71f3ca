#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "superres/philox.hpp"

namespace superres {

enum class Scheme { HgSpade, BinarySpade, MisalignedBinary, MisalignedHg };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Photon counts of one trial. `binary` records hold {m0, L - m0}; full
/// records hold m_q indexed by q.
struct ModeCountRecord {
    std::int64_t photons = 0;
    bool binary = false;
    std::vector<std::int64_t> counts;

    /// sum_q q m_q (full records) or L - m0 (binary records).
    std::int64_t excitation_sum() const;
    bool consistent() const;
};

/// Sum_q q m_q for L photons, which is Poisson(L Q) for an aligned sorter.
std::int64_t sample_hg_sufficient(std::int64_t photons, double q, Philox4x32& rng);

/// Draws each of L photons from the categorical distribution `mode_probs`
/// (indexed by q) and tallies the per-mode counts.
ModeCountRecord sample_hg_categorical(std::int64_t photons, const std::vector<double>& mode_probs, Philox4x32& rng);

/// theta2 = 4 sigma sqrt(stat / L). Throws ZeroPhotons for L = 0.
double mle_hg(std::int64_t stat, std::int64_t photons, double sigma);

ModeCountRecord sample_binary(std::int64_t photons, double p0, Philox4x32& rng);

/// theta2 = 4 sigma sqrt(-ln(m0 / L)), or 2 sigma when m0 = 0. Assumes an
/// aligned sorter. Throws ZeroPhotons for L = 0.
double mle_binary(std::int64_t m0, std::int64_t photons, double sigma);

inline constexpr std::uint64_t kDefaultSeed = 20160901;
inline constexpr std::int64_t kDefaultTrials = 100000;
inline constexpr std::int64_t kTrialBlock = 1024;

struct SweepConfig {
    Scheme scheme = Scheme::HgSpade;
    double sigma = 1.0;
    /// Detected photons per trial, or the mean of Poisson(L) when random_photons.
    std::int64_t photons = 100;
    std::vector<double> theta2_grid;
    std::int64_t trials = kDefaultTrials;
    double xi = 0.0;
    int xi_sign = +1;
    std::uint64_t seed = kDefaultSeed;
    /// Estimate reported when a trial detects no photons, in units of sigma.
    double zero_photon_estimate = 2.0;
    bool random_photons = false;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct EstimationReport {
    Scheme scheme = Scheme::HgSpade;
    std::int64_t photons = 0;
    std::vector<double> theta2_grid;
    std::vector<double> mse;
    std::vector<double> crb;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double xi = 0.0;
    int xi_sign = +1;
    double sigma = 1.0;
    bool random_photons = false;
};

/// Cramer-Rao bound conditioned on L photons: 4 sigma^2 / L for HG sorting,
/// (4 sigma^2 / L)(e^Q - 1)/Q for binary sorting (aligned model, also used
/// for the misaligned schemes).
double conditional_crb(Scheme scheme, double theta2, double sigma, std::int64_t photons);

/// Mean-square error of the aligned maximum-likelihood estimator at each grid
/// point. Results depend only on (config, seed), not on thread count.
EstimationReport run_error_sweep(const SweepConfig& config);

EstimationReport run_error_sweep(Scheme scheme, std::int64_t photons, const std::vector<double>& theta2_grid,
                                 std::int64_t trials, double xi, std::uint64_t seed);

}  // namespace superres
