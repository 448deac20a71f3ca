#pragma once

#include <cstdint>
#include <string>

#include "superres/psf.hpp"

namespace superres {

/// Weak thermal light from two equal, incoherent point sources at X1 and X2,
/// observed over M coherence intervals with mean photon number epsilon each.
/// Only the one-photon component is kept (first order in epsilon).
class OnePhotonModel {
public:
    static constexpr double kMaxEpsilon = 0.1;

    OnePhotonModel(PointSpreadFunction psf, double x1, double x2, double epsilon, std::int64_t intervals);

    /// Builds a model with centroid `theta1`, separation `theta2 >= 0` and
    /// photon budget N, choosing the fewest intervals with epsilon <= 0.1.
    static OnePhotonModel from_budget(PointSpreadFunction psf, double theta1, double theta2, double photons);

    const PointSpreadFunction& psf() const { return psf_; }
    double x1() const { return x1_; }
    double x2() const { return x2_; }
    double epsilon() const { return epsilon_; }
    std::int64_t intervals() const { return intervals_; }

    /// N = M epsilon.
    double photons() const { return epsilon_ * static_cast<double>(intervals_); }
    double centroid() const { return 0.5 * (x1_ + x2_); }
    /// |X2 - X1|; the state is symmetric under relabeling the sources.
    double separation() const;

    OnePhotonModel with_separation(double theta2) const;

private:
    PointSpreadFunction psf_;
    double x1_;
    double x2_;
    double epsilon_;
    std::int64_t intervals_;
};

enum class Provenance { Quantum, Direct, HgSpade, BinarySpade, Hybrid };

std::string to_string(Provenance p);

/// Symmetric 2x2 information matrix over (centroid, separation).
struct FisherMatrix {
    double j11 = 0.0;
    double j12 = 0.0;
    double j22 = 0.0;
    Provenance provenance = Provenance::Quantum;
    double photon_budget = 0.0;

    double determinant() const { return j11 * j22 - j12 * j12; }
    /// Eigenvalues of [[j11, j12], [j12, j22]], ascending.
    std::pair<double, double> eigenvalues() const;
};

}  // namespace superres
