#include "superres/fisher.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "superres/errors.hpp"
#include "superres/overlaps.hpp"
#include "superres/quadrature.hpp"

namespace superres {

namespace {

void require_gaussian(const PointSpreadFunction& psf, const char* what) {
    if (psf.kind() != PsfKind::Gaussian) {
        throw NotGaussianPsf(std::string(what) + " requires a Gaussian PSF");
    }
}

FisherMatrix separation_only(double j22, Provenance p, double n) {
    FisherMatrix f;
    f.j22 = j22;
    f.provenance = p;
    f.photon_budget = n;
    return f;
}

// Pois(q; mean) for q = 0..cutoff by forward recursion.
std::vector<double> poisson_pmf(double mean, int cutoff) {
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
    p[0] = std::exp(-mean);
    for (int q = 1; q <= cutoff; ++q) {
        p[static_cast<std::size_t>(q)] = p[static_cast<std::size_t>(q - 1)] * mean / q;
    }
    return p;
}

}  // namespace

double hg_excitation(double theta2, double sigma) { return theta2 * theta2 / (16.0 * sigma * sigma); }

int poisson_mode_cutoff(double mean, double tail) {
    if (!(mean >= 0.0)) throw InvalidArgument("poisson_mode_cutoff: mean must be non-negative");
    if (mean == 0.0) return 0;
    for (int q = 0; q < kMaxModeCutoff; ++q) {
        // P(X > q) = P(q + 1, mean), the regularized lower incomplete gamma.
        if (boost::math::gamma_p(static_cast<double>(q + 1), mean) < tail) return q;
    }
    return kMaxModeCutoff;
}

namespace {

// Cutoff for Fisher sums over Poisson modes. The omitted information relative
// to the total is Q P(X >= K-1) + P(X >= K) <= (1 + Q) P(X > K-2).
int fisher_mode_cutoff(double mean) {
    return std::min(kMaxModeCutoff, poisson_mode_cutoff(mean, kPoissonTail / (1.0 + mean)) + 2);
}

}  // namespace

MisalignedExcitation misaligned_excitation(double theta2, double sigma, const MisalignmentConfig& mis) {
    if (!(mis.xi >= 0.0)) throw InvalidArgument("misalignment level must be non-negative");
    const double offset = (mis.sign >= 0 ? 1.0 : -1.0) * mis.xi * sigma;
    const double s4 = 4.0 * sigma * sigma;
    const double a = offset + 0.5 * theta2;
    const double b = offset - 0.5 * theta2;
    return {a * a / s4, b * b / s4, a / s4, -b / s4};
}

std::vector<double> hg_mode_probabilities(double q1, double q2, int cutoff) {
    const auto p1 = poisson_pmf(q1, cutoff);
    const auto p2 = poisson_pmf(q2, cutoff);
    std::vector<double> p(p1.size());
    for (std::size_t q = 0; q < p.size(); ++q) p[q] = 0.5 * (p1[q] + p2[q]);
    return p;
}

FisherMatrix direct_imaging_fisher(const OnePhotonModel& model, double lambda_floor) {
    const PointSpreadFunction& psf = model.psf();
    const double x1 = std::min(model.x1(), model.x2());
    const double x2 = std::max(model.x1(), model.x2());
    const double lo = x1 + psf.support_lo();
    const double hi = x2 + psf.support_hi();

    QuadratureOptions opts;
    opts.rel_tol = psf.kind() == PsfKind::Sinc ? kSincQuadTol : kGaussianQuadTol;
    opts.abs_tol = opts.rel_tol * 1e-2 / (psf.width() * psf.width());
    opts.breakpoints = psf.breakpoints(x1, lo, hi);
    auto more = psf.breakpoints(x2, lo, hi);
    opts.breakpoints.insert(opts.breakpoints.end(), more.begin(), more.end());

    // Lambda = (psi1^2 + psi2^2)/2 with psi_s = psi(x - X_s),
    // X1 = theta1 - theta2/2, X2 = theta1 + theta2/2.
    auto integrand = [&](double x) {
        const double p1 = psf.evaluate(x - x1);
        const double p2 = psf.evaluate(x - x2);
        const double lambda = 0.5 * (p1 * p1 + p2 * p2);
        if (lambda < lambda_floor) return std::array<double, 3>{0.0, 0.0, 0.0};
        const double g1 = p1 * psf.derivative(x - x1);
        const double g2 = p2 * psf.derivative(x - x2);
        const double d_centroid = -(g1 + g2);
        const double d_separation = 0.5 * (g1 - g2);
        return std::array<double, 3>{d_centroid * d_centroid / lambda, d_centroid * d_separation / lambda,
                                     d_separation * d_separation / lambda};
    };
    const auto r = integrate_n<3>(integrand, lo, hi, opts);

    const double n = model.photons();
    FisherMatrix f;
    f.j11 = n * r.value[0];
    f.j12 = n * r.value[1];
    f.j22 = n * r.value[2];
    f.provenance = Provenance::Direct;
    f.photon_budget = n;
    return f;
}

FisherMatrix hg_spade_fisher(const OnePhotonModel& model, int q_max) {
    require_gaussian(model.psf(), "hg_spade_fisher");
    const double sigma = model.psf().width();
    const double n = model.photons();
    const double theta2 = model.separation();
    if (theta2 == 0.0) {
        return separation_only(n / (4.0 * sigma * sigma), Provenance::HgSpade, n);
    }
    const double q = hg_excitation(theta2, sigma);
    const int cutoff = q_max < 0 ? fisher_mode_cutoff(q) : q_max;
    const auto p = poisson_pmf(q, cutoff);
    // d ln P1(m) / d theta2 = (m/Q - 1) dQ/dtheta2 = 2 (m - Q) / theta2.
    double sum = 0.0;
    for (int m = 0; m <= cutoff; ++m) {
        const double score = 2.0 * (m - q) / theta2;
        sum += p[static_cast<std::size_t>(m)] * score * score;
    }
    return separation_only(n * sum, Provenance::HgSpade, n);
}

FisherMatrix binary_spade_fisher_gaussian(const OnePhotonModel& model) {
    require_gaussian(model.psf(), "binary_spade_fisher_gaussian");
    const double sigma = model.psf().width();
    const double n = model.photons();
    const double q = hg_excitation(model.separation(), sigma);
    // Q e^{-Q} / (1 - e^{-Q}) = Q / expm1(Q), -> 1 as Q -> 0.
    const double ratio = q == 0.0 ? 1.0 : q / std::expm1(q);
    return separation_only(n / (4.0 * sigma * sigma) * ratio, Provenance::BinarySpade, n);
}

FisherMatrix binary_spade_fisher_general(const PointSpreadFunction& psf, double theta2, double photons) {
    if (!(theta2 >= 0.0)) throw InvalidArgument("separation must be non-negative");
    if (theta2 == 0.0) {
        return separation_only(photons * spatial_frequency_variance(psf), Provenance::BinarySpade, photons);
    }
    // With Upsilon = C(s)^2, s = theta2/2: dUpsilon/dtheta2 = C C'(s), so the
    // information is N C'(s)^2 / (1 - C^2), finite where C vanishes. C' by
    // central differences on 1 - C (well conditioned near s = 0), one
    // Richardson step.
    const double s = 0.5 * theta2;
    const double h = 1e-4 * psf.width();
    auto complement = [&](double x) { return autocorrelation(psf, x).complement; };
    auto slope = [&](double step) { return (complement(s - step) - complement(s + step)) / (2.0 * step); };
    const double dc = (4.0 * slope(0.5 * h) - slope(h)) / 3.0;
    const Autocorrelation c = autocorrelation(psf, s);
    const double j22 = photons * dc * dc / (c.complement * (1.0 + c.value));
    return separation_only(j22, Provenance::BinarySpade, photons);
}

FisherMatrix misaligned_hg_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis) {
    require_gaussian(model.psf(), "misaligned_hg_fisher");
    if (mis.xi == 0.0) return hg_spade_fisher(model);
    const double sigma = model.psf().width();
    const double n = model.photons();
    const MisalignedExcitation e = misaligned_excitation(model.separation(), sigma, mis);
    const int cutoff = fisher_mode_cutoff(std::max(e.q1, e.q2));
    const auto p1 = poisson_pmf(e.q1, cutoff);
    const auto p2 = poisson_pmf(e.q2, cutoff);
    double sum = 0.0;
    for (std::size_t q = 0; q < p1.size(); ++q) {
        const double prob = 0.5 * (p1[q] + p2[q]);
        if (prob < kLambdaFloor) continue;
        // d Pois(q; Q) / dQ = Pois(q - 1; Q) - Pois(q; Q).
        const double prev1 = q > 0 ? p1[q - 1] : 0.0;
        const double prev2 = q > 0 ? p2[q - 1] : 0.0;
        const double dp = 0.5 * ((prev1 - p1[q]) * e.dq1 + (prev2 - p2[q]) * e.dq2);
        sum += dp * dp / prob;
    }
    return separation_only(n * sum, Provenance::HgSpade, n);
}

FisherMatrix misaligned_binary_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis) {
    require_gaussian(model.psf(), "misaligned_binary_fisher");
    if (mis.xi == 0.0) return binary_spade_fisher_gaussian(model);
    const double sigma = model.psf().width();
    const double n = model.photons();
    const MisalignedExcitation e = misaligned_excitation(model.separation(), sigma, mis);
    const double p0 = 0.5 * (std::exp(-e.q1) + std::exp(-e.q2));
    const double p_rest = -0.5 * (std::expm1(-e.q1) + std::expm1(-e.q2));
    const double dp0 = -0.5 * (std::exp(-e.q1) * e.dq1 + std::exp(-e.q2) * e.dq2);
    const double j22 = (p0 > 0.0 && p_rest > 0.0) ? n * dp0 * dp0 / (p0 * p_rest) : 0.0;
    return separation_only(j22, Provenance::BinarySpade, n);
}

FisherMatrix hybrid_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis) {
    const FisherMatrix direct = direct_imaging_fisher(model);
    FisherMatrix binary;
    if (model.psf().kind() == PsfKind::Gaussian) {
        binary = misaligned_binary_fisher(model, mis);
    } else {
        if (mis.xi != 0.0) throw NotGaussianPsf("misaligned hybrid scheme requires a Gaussian PSF");
        binary = binary_spade_fisher_general(model.psf(), model.separation(), model.photons());
    }
    FisherMatrix f;
    f.j11 = 0.5 * direct.j11;
    f.j12 = 0.0;
    f.j22 = 0.5 * direct.j22 + 0.5 * binary.j22;
    f.provenance = Provenance::Hybrid;
    f.photon_budget = model.photons();
    return f;
}

double localization_bound(const FisherMatrix& fm) {
    if (std::abs(fm.j12) > 1e-8 * std::sqrt(std::abs(fm.j11 * fm.j22)) + 1e-300) {
        throw InvalidArgument("localization_bound: information matrix must be diagonal");
    }
    if (!(fm.j11 > 0.0) || !(fm.j22 > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / fm.j11 + 1.0 / (4.0 * fm.j22);
}

}  // namespace superres
