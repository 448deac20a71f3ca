#pragma once

#include "superres/psf.hpp"

namespace superres {

/// Scalar overlap integrals for two copies of the PSF centered at
/// X1 = -theta2/2 and X2 = +theta2/2.
struct OverlapQuantities {
    double delta = 1.0;            ///< int psi(x - X1) psi(x - X2) dx
    double one_minus_delta = 0.0;  ///< 1 - delta, computed without cancellation
    double gamma = 0.0;            ///< int psi'(x) psi(x - theta2) dx
    double dk2 = 0.0;              ///< int psi'(x)^2 dx
    double b2 = 0.0;               ///< int d_X1 psi(x - X1) d_X2 psi(x - X2) dx
};

/// Which evaluation path an overlap uses. `Automatic` picks the closed form
/// for Gaussians, the transfer-function (k-space) quadrature for sinc and
/// position-space quadrature for tabulated PSFs.
enum class OverlapRoute { Automatic, ClosedForm, Position, Spectral };

/// Per-integral quadrature tolerances (relative, with a matching absolute
/// floor in the natural units of the PSF width).
inline constexpr double kGaussianQuadTol = 1e-10;
inline constexpr double kSincQuadTol = 1e-8;
inline constexpr double kSpectralQuadTol = 1e-12;

/// Any finite theta2 is accepted; negative values swap the two sources.
OverlapQuantities overlaps(const PointSpreadFunction& psf, double theta2,
                           OverlapRoute route = OverlapRoute::Automatic);

/// int psi'(x)^2 dx. Independent of separation.
double spatial_frequency_variance(const PointSpreadFunction& psf,
                                  OverlapRoute route = OverlapRoute::Automatic);

/// C(s) = int psi(x) psi(x - s) dx and 1 - C(s).
struct Autocorrelation {
    double value = 1.0;
    double complement = 0.0;
};

Autocorrelation autocorrelation(const PointSpreadFunction& psf, double shift,
                                OverlapRoute route = OverlapRoute::Automatic);

/// Mode overlap factor Upsilon(theta2) = |int psi(x) psi(x + theta2/2) dx|^2,
/// i.e. the probability that a photon from either source couples into the
/// PSF-matched fundamental mode, with its complement 1 - Upsilon.
struct ModeOverlap {
    double upsilon = 1.0;
    double complement = 0.0;
};

ModeOverlap mode_overlap(const PointSpreadFunction& psf, double theta2,
                         OverlapRoute route = OverlapRoute::Automatic);

double transfer_overlap(const PointSpreadFunction& psf, double theta2,
                        OverlapRoute route = OverlapRoute::Automatic);

}  // namespace superres
