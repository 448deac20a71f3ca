#pragma once

#include <vector>

#include "superres/model.hpp"

namespace superres {

/// Demultiplexer centered at centroid + sign * xi * sigma.
struct MisalignmentConfig {
    double xi = 0.0;
    int sign = +1;
};

/// Intensity values below this are treated as zero in the direct-imaging
/// integrand (1/Lambda)(dLambda)^2.
inline constexpr double kLambdaFloor = 1e-30;
inline constexpr double kPoissonTail = 1e-12;
inline constexpr int kMaxModeCutoff = 512;

/// Mean higher-mode excitation Q = theta2^2 / (16 sigma^2) of an aligned
/// Hermite-Gaussian demultiplexer.
double hg_excitation(double theta2, double sigma);

/// Smallest q with P(Poisson(mean) > q) < tail, capped at kMaxModeCutoff.
int poisson_mode_cutoff(double mean, double tail = kPoissonTail);

/// Excitations of the two sources under misalignment and their theta2
/// derivatives.
struct MisalignedExcitation {
    double q1 = 0.0;
    double q2 = 0.0;
    double dq1 = 0.0;
    double dq2 = 0.0;
};

MisalignedExcitation misaligned_excitation(double theta2, double sigma, const MisalignmentConfig& mis);

/// P1(q) = 1/2 [Pois(q; Q1) + Pois(q; Q2)] for q = 0..cutoff.
std::vector<double> hg_mode_probabilities(double q1, double q2, int cutoff);

/// Poisson photon counting on the image plane, full 2x2 matrix by quadrature.
FisherMatrix direct_imaging_fisher(const OnePhotonModel& model, double lambda_floor = kLambdaFloor);

/// Separation information of Hermite-Gaussian mode sorting (Gaussian PSF
/// only). `q_max < 0` selects the cutoff automatically. j11 is reported as 0.
FisherMatrix hg_spade_fisher(const OnePhotonModel& model, int q_max = -1);

/// Fundamental-mode vs rest counting, Gaussian closed form
/// N/(4 sigma^2) * Q / (e^Q - 1).
FisherMatrix binary_spade_fisher_gaussian(const OnePhotonModel& model);

/// Fundamental-mode vs rest counting for any PSF, from the mode overlap
/// factor: N (dUpsilon/dtheta2)^2 / (Upsilon (1 - Upsilon)), evaluated as
/// N C'(s)^2 / (1 - C(s)^2) with Upsilon = C(s)^2, s = theta2/2.
FisherMatrix binary_spade_fisher_general(const PointSpreadFunction& psf, double theta2, double photons);

FisherMatrix misaligned_hg_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis);
FisherMatrix misaligned_binary_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis);

/// 50-50 split between direct imaging and binary SPADE; diagonal.
FisherMatrix hybrid_fisher(const OnePhotonModel& model, const MisalignmentConfig& mis = {});

/// Mean-square error bound 1/j11 + 1/(4 j22) for locating either source.
/// Returns +infinity when either information vanishes.
double localization_bound(const FisherMatrix& fm);

}  // namespace superres
