#include "superres/overlaps.hpp"

#include <algorithm>
#include <cmath>

#include "superres/errors.hpp"
#include "superres/quadrature.hpp"

namespace superres {

namespace {

OverlapRoute resolve(const PointSpreadFunction& psf, OverlapRoute route) {
    if (route != OverlapRoute::Automatic) {
        if (route == OverlapRoute::ClosedForm && psf.kind() != PsfKind::Gaussian) {
            throw InvalidArgument("closed-form overlaps exist only for the Gaussian PSF");
        }
        if (route == OverlapRoute::Spectral && !psf.has_spectral_density()) {
            throw InvalidArgument("spectral overlaps need an analytic transfer function");
        }
        return route;
    }
    switch (psf.kind()) {
        case PsfKind::Gaussian: return OverlapRoute::ClosedForm;
        case PsfKind::Sinc: return OverlapRoute::Spectral;
        case PsfKind::Tabulated: return OverlapRoute::Position;
    }
    return OverlapRoute::Position;
}

void check_finite(double theta2) {
    if (!std::isfinite(theta2)) throw InvalidArgument("overlaps: separation must be finite");
}

// Position-space integration window covering psi(x + t/2) and psi(x - t/2).
struct Window {
    double lo;
    double hi;
    std::vector<double> breaks;
};

Window position_window(const PointSpreadFunction& psf, double theta2) {
    const double h = 0.5 * std::abs(theta2);
    Window w{psf.support_lo() - h, psf.support_hi() + h, {}};
    w.breaks = psf.breakpoints(-0.5 * theta2, w.lo, w.hi);
    auto more = psf.breakpoints(0.5 * theta2, w.lo, w.hi);
    w.breaks.insert(w.breaks.end(), more.begin(), more.end());
    return w;
}

double position_tol(const PointSpreadFunction& psf) {
    return psf.kind() == PsfKind::Sinc ? kSincQuadTol : kGaussianQuadTol;
}

template <class F>
double integrate_position(const F& f, const Window& w, double rel_tol, double abs_tol) {
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.breakpoints = w.breaks;
    return integrate(f, w.lo, w.hi, opts).value[0];
}

// Even integrands over [-K, K], folded onto [0, K].
template <class F>
double integrate_spectral(const PointSpreadFunction& psf, const F& f, double abs_scale) {
    QuadratureOptions opts;
    opts.rel_tol = kSpectralQuadTol;
    opts.abs_tol = kSpectralQuadTol * 1e-3 * abs_scale;
    return 2.0 * integrate(f, 0.0, psf.spectral_halfwidth(), opts).value[0];
}

OverlapQuantities overlaps_closed_form(const PointSpreadFunction& psf, double t) {
    const double s2 = psf.width() * psf.width();
    OverlapQuantities o;
    const double exponent = -t * t / (8.0 * s2);
    o.delta = std::exp(exponent);
    o.one_minus_delta = -std::expm1(exponent);
    o.gamma = -t / (4.0 * s2) * o.delta;
    o.dk2 = 1.0 / (4.0 * s2);
    o.b2 = o.delta * (1.0 / (4.0 * s2) - t * t / (16.0 * s2 * s2));
    return o;
}

OverlapQuantities overlaps_position(const PointSpreadFunction& psf, double t) {
    const Window w = position_window(psf, t);
    const double tol = position_tol(psf);
    const double inv_w = 1.0 / psf.width();
    const double h = 0.5 * t;
    auto p1 = [&](double x) { return psf.evaluate(x + h); };
    auto p2 = [&](double x) { return psf.evaluate(x - h); };
    auto d1 = [&](double x) { return psf.derivative(x + h); };
    auto d2 = [&](double x) { return psf.derivative(x - h); };

    OverlapQuantities o;
    o.delta = integrate_position([&](double x) { return p1(x) * p2(x); }, w, tol, tol * 1e-2);
    o.one_minus_delta = integrate_position(
        [&](double x) {
            const double d = p1(x) - p2(x);
            return 0.5 * d * d;
        },
        w, tol, tol * 1e-6);
    // gamma = int psi'(u) psi(u - t) du, with u = x + t/2.
    o.gamma = integrate_position([&](double x) { return d1(x) * p2(x); }, w, tol, tol * 1e-2 * inv_w);
    o.dk2 = integrate_position([&](double x) { return d1(x) * d1(x); }, w, tol, tol * 1e-2 * inv_w * inv_w);
    o.b2 = integrate_position([&](double x) { return d1(x) * d2(x); }, w, tol, tol * 1e-2 * inv_w * inv_w);
    return o;
}

OverlapQuantities overlaps_spectral(const PointSpreadFunction& psf, double t) {
    const double inv_w = 1.0 / psf.width();
    auto S = [&](double k) { return psf.spectral_density(k); };
    OverlapQuantities o;
    o.delta = integrate_spectral(psf, [&](double k) { return S(k) * std::cos(k * t); }, 1.0);
    o.one_minus_delta = integrate_spectral(
        psf,
        [&](double k) {
            const double s = std::sin(0.5 * k * t);
            return 2.0 * S(k) * s * s;
        },
        1e-4);
    o.gamma = -integrate_spectral(psf, [&](double k) { return k * S(k) * std::sin(k * t); }, inv_w);
    o.dk2 = integrate_spectral(psf, [&](double k) { return k * k * S(k); }, inv_w * inv_w);
    o.b2 = integrate_spectral(psf, [&](double k) { return k * k * S(k) * std::cos(k * t); }, inv_w * inv_w);
    return o;
}

}  // namespace

OverlapQuantities overlaps(const PointSpreadFunction& psf, double theta2, OverlapRoute route) {
    check_finite(theta2);
    switch (resolve(psf, route)) {
        case OverlapRoute::ClosedForm: return overlaps_closed_form(psf, theta2);
        case OverlapRoute::Spectral: return overlaps_spectral(psf, theta2);
        case OverlapRoute::Position:
        case OverlapRoute::Automatic: break;
    }
    return overlaps_position(psf, theta2);
}

double spatial_frequency_variance(const PointSpreadFunction& psf, OverlapRoute route) {
    const double inv_w = 1.0 / psf.width();
    switch (resolve(psf, route)) {
        case OverlapRoute::ClosedForm:
            return 0.25 * inv_w * inv_w;
        case OverlapRoute::Spectral:
            return integrate_spectral(psf, [&](double k) { return k * k * psf.spectral_density(k); },
                                      inv_w * inv_w);
        case OverlapRoute::Position:
        case OverlapRoute::Automatic:
            break;
    }
    const Window w = position_window(psf, 0.0);
    const double tol = position_tol(psf);
    return integrate_position(
        [&](double x) {
            const double d = psf.derivative(x);
            return d * d;
        },
        w, tol, tol * 1e-2 * inv_w * inv_w);
}

Autocorrelation autocorrelation(const PointSpreadFunction& psf, double shift, OverlapRoute route) {
    check_finite(shift);
    Autocorrelation c;
    switch (resolve(psf, route)) {
        case OverlapRoute::ClosedForm: {
            const double exponent = -shift * shift / (8.0 * psf.width() * psf.width());
            c.value = std::exp(exponent);
            c.complement = -std::expm1(exponent);
            return c;
        }
        case OverlapRoute::Spectral: {
            auto S = [&](double k) { return psf.spectral_density(k); };
            c.value = integrate_spectral(psf, [&](double k) { return S(k) * std::cos(k * shift); }, 1.0);
            c.complement = integrate_spectral(
                psf,
                [&](double k) {
                    const double s = std::sin(0.5 * k * shift);
                    return 2.0 * S(k) * s * s;
                },
                1e-4);
            return c;
        }
        case OverlapRoute::Position:
        case OverlapRoute::Automatic:
            break;
    }
    const Window w = position_window(psf, shift);
    const double tol = position_tol(psf);
    const double h = 0.5 * shift;
    c.value = integrate_position([&](double x) { return psf.evaluate(x + h) * psf.evaluate(x - h); }, w, tol,
                                 tol * 1e-2);
    c.complement = integrate_position(
        [&](double x) {
            const double d = psf.evaluate(x + h) - psf.evaluate(x - h);
            return 0.5 * d * d;
        },
        w, tol, tol * 1e-6);
    return c;
}

ModeOverlap mode_overlap(const PointSpreadFunction& psf, double theta2, OverlapRoute route) {
    // <psi|psi_s> = C(theta2 / 2) for either source; Upsilon = C^2.
    const Autocorrelation c = autocorrelation(psf, 0.5 * theta2, route);
    ModeOverlap m;
    m.upsilon = c.value * c.value;
    m.complement = c.complement * (1.0 + c.value);
    m.upsilon = std::clamp(m.upsilon, 0.0, 1.0);
    return m;
}

double transfer_overlap(const PointSpreadFunction& psf, double theta2, OverlapRoute route) {
    return mode_overlap(psf, theta2, route).upsilon;
}

}  // namespace superres
