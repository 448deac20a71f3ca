#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace superres {

enum class PsfKind { Gaussian, Sinc, Tabulated };

std::string to_string(PsfKind kind);

/// Real, unit-norm amplitude point-spread function psi(x).
///
/// Gaussian: psi(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2)).
/// Sinc:     psi(x) = W^(-1/2) sinc(x / W), sinc(u) = sin(pi u) / (pi u).
/// Tabulated: cubic (modified Akima) interpolation of user samples,
///            renormalized to unit L2 norm, zero outside the grid.
///
/// Instances are immutable and cheap to copy (tabulated data is shared).
class PointSpreadFunction {
public:
    static PointSpreadFunction gaussian(double sigma);
    static PointSpreadFunction sinc(double width);
    static PointSpreadFunction tabulated(std::vector<double> x, std::vector<double> psi);

    /// Reads two whitespace-separated columns (x, psi). Blank lines and lines
    /// starting with '#' are skipped. Throws InvalidArgument on malformed or
    /// non-monotone input.
    static PointSpreadFunction load_tabulated(const std::filesystem::path& path);
    static PointSpreadFunction read_tabulated(std::istream& in);

    PsfKind kind() const { return kind_; }

    /// sigma for Gaussian, W for sinc, rms width of psi^2 for tabulated.
    double width() const { return width_; }

    /// Interval [support_lo, support_hi] used for position-space quadrature;
    /// psi is treated as zero outside it. Gaussian: +-12 sigma. Sinc: +-200 W.
    /// Tabulated: the grid range.
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    double support_halfwidth() const;

    double evaluate(double x) const;
    double derivative(double x) const;

    /// |Psi(k)|^2 with Psi(k) = (2 pi)^(-1/2) int psi(x) exp(-i k x) dx.
    /// Only available for the analytic kinds.
    bool has_spectral_density() const { return kind_ != PsfKind::Tabulated; }
    double spectral_density(double k) const;
    /// |Psi|^2 vanishes (sinc) or is negligible (Gaussian) beyond this |k|.
    double spectral_halfwidth() const;

    /// Points in [lo, hi] where psi(x - shift) vanishes or loses smoothness,
    /// for seeding quadrature panels.
    std::vector<double> breakpoints(double shift, double lo, double hi) const;

private:
    struct Table;

    PointSpreadFunction(PsfKind kind, double width, double lo, double hi);

    PsfKind kind_;
    double width_;
    double lo_;
    double hi_;
    std::shared_ptr<const Table> table_;
};

}  // namespace superres
