#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "superres/model.hpp"
#include "superres/overlaps.hpp"

namespace superres {

/// Quantum Fisher information of the one-photon state in closed form:
/// K11 = 4N(dk2 - gamma^2), K22 = N dk2, K12 = 0.
FisherMatrix qfi_closed_form(const OnePhotonModel& model);

/// Eigen-decomposition of the one-photon state on the four-dimensional
/// subspace spanned by the two source modes and their position derivatives,
/// with the symmetric logarithmic derivatives expressed in that basis.
///
/// Basis: e1 ~ psi1 - psi2, e2 ~ psi1 + psi2, and e3, e4 the parts of
/// (d psi1 +- d psi2) orthogonal to e1, e2. The SLD matrices are assembled
/// from the matrix elements of d(rho)/dX via L_jk = 2 <e_j|d rho|e_k> / (D_j + D_k).
struct SldDecomposition {
    std::array<double, 4> eigenvalues{};
    OverlapQuantities overlaps;
    /// Basis-vector norms, computed as squared-norm integrals of the
    /// constructed vectors.
    double c3 = 0.0;
    double c4 = 0.0;
    /// dk2 + b2 - gamma^2/(1-delta) and dk2 - b2 - gamma^2/(1+delta); these
    /// must agree with c3^2, c4^2 and are what the degeneracy check uses.
    double c3_sq_identity = 0.0;
    double c4_sq_identity = 0.0;
    Eigen::Matrix4d sld_x1 = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d sld_x2 = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d sld_centroid = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d sld_separation = Eigen::Matrix4d::Zero();
};

/// Requires theta2 > 0. Throws DegenerateBasis when 1 - delta < 1e-12 or a
/// basis norm identity is negative beyond 1e-12 dk2.
SldDecomposition sld_decompose(const OnePhotonModel& model);

/// K_{mu nu} = N Re sum_{jk} L_{mu,jk} L_{nu,kj} D_k.
FisherMatrix qfi_from_sld(const SldDecomposition& decomp, const OnePhotonModel& model);

/// Closed form plus the SLD oracle where the basis exists (theta2 > 0).
struct QfiWithOracle {
    FisherMatrix closed_form;
    std::optional<FisherMatrix> oracle;
    /// max over elements |oracle - closed| / (N dk2); 0 when no oracle.
    double deviation = 0.0;
};

QfiWithOracle qfi_with_oracle(const OnePhotonModel& model);

}  // namespace superres
