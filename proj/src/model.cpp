#include "superres/model.hpp"

#include <cmath>

#include "superres/errors.hpp"

namespace superres {

OnePhotonModel::OnePhotonModel(PointSpreadFunction psf, double x1, double x2, double epsilon,
                               std::int64_t intervals)
    : psf_(std::move(psf)), x1_(x1), x2_(x2), epsilon_(epsilon), intervals_(intervals) {
    if (!std::isfinite(x1) || !std::isfinite(x2)) {
        throw InvalidArgument("source positions must be finite");
    }
    if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon)) {
        throw InvalidArgument("epsilon must lie in (0, 0.1]");
    }
    if (intervals < 1) {
        throw InvalidArgument("number of coherence intervals must be positive");
    }
}

OnePhotonModel OnePhotonModel::from_budget(PointSpreadFunction psf, double theta1, double theta2,
                                           double photons) {
    if (!(theta2 >= 0.0)) throw InvalidArgument("separation must be non-negative");
    if (!(photons > 0.0) || !std::isfinite(photons)) throw InvalidArgument("photon budget must be positive");
    const auto m = static_cast<std::int64_t>(std::ceil(photons / kMaxEpsilon));
    const double eps = photons / static_cast<double>(m);
    return {std::move(psf), theta1 - 0.5 * theta2, theta1 + 0.5 * theta2, eps, m};
}

double OnePhotonModel::separation() const { return std::abs(x2_ - x1_); }

OnePhotonModel OnePhotonModel::with_separation(double theta2) const {
    if (!(theta2 >= 0.0)) throw InvalidArgument("separation must be non-negative");
    const double c = centroid();
    return {psf_, c - 0.5 * theta2, c + 0.5 * theta2, epsilon_, intervals_};
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Quantum: return "quantum";
        case Provenance::Direct: return "direct";
        case Provenance::HgSpade: return "hg_spade";
        case Provenance::BinarySpade: return "binary_spade";
        case Provenance::Hybrid: return "hybrid";
    }
    return "unknown";
}

std::pair<double, double> FisherMatrix::eigenvalues() const {
    const double mean = 0.5 * (j11 + j22);
    const double half_diff = 0.5 * (j11 - j22);
    const double r = std::hypot(half_diff, j12);
    return {mean - r, mean + r};
}

}  // namespace superres
