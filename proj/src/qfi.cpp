#include "superres/qfi.hpp"

#include <cmath>

#include "superres/errors.hpp"
#include "superres/quadrature.hpp"

namespace superres {

namespace {

constexpr double kDegenerateGap = 1e-12;

struct BasisNorms {
    double c3_sq;
    double c4_sq;
};

BasisNorms basis_norms(const PointSpreadFunction& psf, double theta2, const OverlapQuantities& o) {
    const double g_minus = o.gamma / o.one_minus_delta;
    const double g_plus = o.gamma / (2.0 - o.one_minus_delta);
    const double h = 0.5 * theta2;
    const double inv_w2 = 1.0 / (psf.width() * psf.width());

    if (psf.has_spectral_density()) {
        QuadratureOptions opts;
        opts.rel_tol = kSpectralQuadTol;
        opts.abs_tol = kSpectralQuadTol * 1e-6 * inv_w2;
        const double kmax = psf.spectral_halfwidth();
        auto r = integrate_n<2>(
            [&](double k) {
                const double s = std::sin(k * h);
                const double c = std::cos(k * h);
                const double a = k * c + g_minus * s;
                const double b = k * s + g_plus * c;
                const double S = psf.spectral_density(k);
                return std::array<double, 2>{S * a * a, S * b * b};
            },
            0.0, kmax, opts);
        return {4.0 * r.value[0], 4.0 * r.value[1]};
    }

    QuadratureOptions opts;
    opts.rel_tol = kGaussianQuadTol;
    opts.abs_tol = kGaussianQuadTol * 1e-6 * inv_w2;
    const double lo = psf.support_lo() - h;
    const double hi = psf.support_hi() + h;
    opts.breakpoints = psf.breakpoints(-h, lo, hi);
    auto more = psf.breakpoints(h, lo, hi);
    opts.breakpoints.insert(opts.breakpoints.end(), more.begin(), more.end());
    auto r = integrate_n<2>(
        [&](double x) {
            const double p1 = psf.evaluate(x + h);
            const double p2 = psf.evaluate(x - h);
            const double d1 = psf.derivative(x + h);
            const double d2 = psf.derivative(x - h);
            const double a = d1 + d2 + g_minus * (p1 - p2);
            const double b = d1 - d2 - g_plus * (p1 + p2);
            return std::array<double, 2>{a * a, b * b};
        },
        lo, hi, opts);
    return {0.5 * r.value[0], 0.5 * r.value[1]};
}

Eigen::Matrix4d helstrom_sld(const Eigen::Matrix4d& drho, const std::array<double, 4>& d) {
    Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            const double denom = d[j] + d[k];
            if (denom > 0.0) l(j, k) = 2.0 * drho(j, k) / denom;
        }
    }
    return l;
}

}  // namespace

FisherMatrix qfi_closed_form(const OnePhotonModel& model) {
    const OverlapQuantities o = overlaps(model.psf(), model.separation());
    const double n = model.photons();
    FisherMatrix k;
    k.j11 = 4.0 * n * (o.dk2 - o.gamma * o.gamma);
    k.j12 = 0.0;
    k.j22 = n * o.dk2;
    k.provenance = Provenance::Quantum;
    k.photon_budget = n;
    return k;
}

SldDecomposition sld_decompose(const OnePhotonModel& model) {
    const double theta2 = model.separation();
    if (!(theta2 > 0.0)) {
        throw DegenerateBasis("sld basis is undefined at zero separation");
    }
    SldDecomposition out;
    const OverlapQuantities o = overlaps(model.psf(), theta2);
    out.overlaps = o;
    const double omd = o.one_minus_delta;
    const double opd = 2.0 - omd;
    if (omd < kDegenerateGap) {
        throw DegenerateBasis("sld basis: 1 - delta below 1e-12");
    }

    out.c3_sq_identity = o.dk2 + o.b2 - o.gamma * o.gamma / omd;
    out.c4_sq_identity = o.dk2 - o.b2 - o.gamma * o.gamma / opd;
    if (out.c3_sq_identity < -kDegenerateGap * o.dk2 || out.c4_sq_identity < -kDegenerateGap * o.dk2) {
        throw DegenerateBasis("sld basis: negative basis norm beyond rounding");
    }

    const BasisNorms norms = basis_norms(model.psf(), theta2, o);
    out.c3 = std::sqrt(std::max(norms.c3_sq, 0.0));
    out.c4 = std::sqrt(std::max(norms.c4_sq, 0.0));

    out.eigenvalues = {0.5 * omd, 0.5 * opd, 0.0, 0.0};

    // Coordinates of psi_s and d psi_s / d X_s in the e-basis.
    const double a = std::sqrt(0.5 * omd);
    const double b = std::sqrt(0.5 * opd);
    const Eigen::Vector4d v1(a, b, 0.0, 0.0);
    const Eigen::Vector4d v2(-a, b, 0.0, 0.0);
    const double gm = o.gamma / std::sqrt(omd);
    const double gp = o.gamma / std::sqrt(opd);
    const double r2 = std::sqrt(0.5);
    const Eigen::Vector4d u1 = r2 * Eigen::Vector4d(gm, -gp, out.c3, out.c4);
    const Eigen::Vector4d u2 = r2 * Eigen::Vector4d(gm, gp, out.c3, -out.c4);

    const Eigen::Matrix4d drho1 = 0.5 * (u1 * v1.transpose() + v1 * u1.transpose());
    const Eigen::Matrix4d drho2 = 0.5 * (u2 * v2.transpose() + v2 * u2.transpose());

    out.sld_x1 = helstrom_sld(drho1, out.eigenvalues);
    out.sld_x2 = helstrom_sld(drho2, out.eigenvalues);
    // X1 = theta1 - theta2/2, X2 = theta1 + theta2/2.
    out.sld_centroid = out.sld_x1 + out.sld_x2;
    out.sld_separation = 0.5 * (out.sld_x2 - out.sld_x1);
    return out;
}

FisherMatrix qfi_from_sld(const SldDecomposition& decomp, const OnePhotonModel& model) {
    const Eigen::Vector4d d(decomp.eigenvalues[0], decomp.eigenvalues[1], decomp.eigenvalues[2],
                            decomp.eigenvalues[3]);
    auto element = [&](const Eigen::Matrix4d& lm, const Eigen::Matrix4d& ln) {
        return (lm * ln * d.asDiagonal()).trace();
    };
    const double n = model.photons();
    FisherMatrix k;
    k.j11 = n * element(decomp.sld_centroid, decomp.sld_centroid);
    k.j12 = n * element(decomp.sld_centroid, decomp.sld_separation);
    k.j22 = n * element(decomp.sld_separation, decomp.sld_separation);
    k.provenance = Provenance::Quantum;
    k.photon_budget = n;
    return k;
}

QfiWithOracle qfi_with_oracle(const OnePhotonModel& model) {
    QfiWithOracle out;
    out.closed_form = qfi_closed_form(model);
    if (model.separation() > 0.0) {
        const SldDecomposition decomp = sld_decompose(model);
        const FisherMatrix oracle = qfi_from_sld(decomp, model);
        const double scale = out.closed_form.j22;
        out.deviation = std::max({std::abs(oracle.j11 - out.closed_form.j11),
                                  std::abs(oracle.j12 - out.closed_form.j12),
                                  std::abs(oracle.j22 - out.closed_form.j22)}) /
                        scale;
        out.oracle = oracle;
    }
    return out;
}

}  // namespace superres
