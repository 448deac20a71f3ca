#include "superres/psf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "superres/errors.hpp"
#include "superres/quadrature.hpp"

namespace superres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGaussianSupport = 12.0;  // in sigma
constexpr double kSincSupport = 200.0;     // in W

// sin(pi u) / (pi u) and its u-derivative.
double sinc_value(double u) {
    const double z = kPi * u;
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

double sinc_prime(double u) {
    const double z = kPi * u;
    if (std::abs(z) < 1e-4) return kPi * (-z / 3.0 + z * z * z / 30.0);
    return kPi * (z * std::cos(z) - std::sin(z)) / (z * z);
}

}  // namespace

// Slopes at the nodes from the Lagrange polynomial through (up to) five
// neighbouring samples; fourth order on smooth data.
static std::vector<double> node_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t width = std::min<std::size_t>(5, n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = std::min(i >= width / 2 ? i - width / 2 : 0, n - width);
        double slope = 0.0;
        for (std::size_t j = first; j < first + width; ++j) {
            // L_j'(x_i)
            double lj = 0.0;
            if (j == i) {
                for (std::size_t m = first; m < first + width; ++m) {
                    if (m != i) lj += 1.0 / (x[i] - x[m]);
                }
            } else {
                lj = 1.0 / (x[j] - x[i]);
                for (std::size_t m = first; m < first + width; ++m) {
                    if (m != i && m != j) lj *= (x[i] - x[m]) / (x[j] - x[m]);
                }
            }
            slope += y[j] * lj;
        }
        d[i] = slope;
    }
    return d;
}

struct PointSpreadFunction::Table {
    std::vector<double> x;
    std::vector<double> y;
    boost::math::interpolators::cubic_hermite<std::vector<double>> spline;

    Table(std::vector<double> xs, std::vector<double> ys)
        : x(xs), y(ys), spline(std::move(xs), std::move(ys), node_slopes(x, y)) {}

    double operator()(double t) const {
        if (t < x.front() || t > x.back()) return 0.0;
        return spline(t);
    }

    double prime(double t) const {
        if (t < x.front() || t > x.back()) return 0.0;
        return spline.prime(t);
    }
};

std::string to_string(PsfKind kind) {
    switch (kind) {
        case PsfKind::Gaussian: return "gaussian";
        case PsfKind::Sinc: return "sinc";
        case PsfKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

PointSpreadFunction::PointSpreadFunction(PsfKind kind, double width, double lo, double hi)
    : kind_(kind), width_(width), lo_(lo), hi_(hi) {}

PointSpreadFunction PointSpreadFunction::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian PSF: sigma must be positive and finite");
    }
    return {PsfKind::Gaussian, sigma, -kGaussianSupport * sigma, kGaussianSupport * sigma};
}

PointSpreadFunction PointSpreadFunction::sinc(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw InvalidArgument("sinc PSF: width must be positive and finite");
    }
    return {PsfKind::Sinc, width, -kSincSupport * width, kSincSupport * width};
}

PointSpreadFunction PointSpreadFunction::tabulated(std::vector<double> x, std::vector<double> psi) {
    if (x.size() != psi.size()) {
        throw InvalidArgument("tabulated PSF: x and psi columns differ in length");
    }
    if (x.size() < 4) {
        throw InvalidArgument("tabulated PSF: at least four samples are required");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(psi[i])) {
            throw InvalidArgument("tabulated PSF: non-finite sample at row " + std::to_string(i + 1));
        }
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw InvalidArgument("tabulated PSF: x must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
        }
    }

    auto norm2_of = [](const Table& t) {
        QuadratureOptions opts;
        opts.abs_tol = 1e-14;
        opts.rel_tol = 1e-12;
        opts.breakpoints = t.x;
        return integrate([&](double s) { return t(s) * t(s); }, t.x.front(), t.x.back(), opts).value[0];
    };

    const double norm2 = norm2_of(Table(x, psi));
    if (!(norm2 > 0.0)) {
        throw InvalidArgument("tabulated PSF: samples have zero norm");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : psi) v *= scale;
    auto table = std::make_shared<const Table>(x, psi);

    QuadratureOptions opts;
    opts.abs_tol = 1e-14;
    opts.rel_tol = 1e-12;
    opts.breakpoints = table->x;
    const double lo = x.front();
    const double hi = x.back();
    const double mean = integrate([&](double s) { return s * (*table)(s) * (*table)(s); }, lo, hi, opts).value[0];
    const double second = integrate([&](double s) { return (s - mean) * (s - mean) * (*table)(s) * (*table)(s); },
                                    lo, hi, opts).value[0];

    PointSpreadFunction out(PsfKind::Tabulated, std::sqrt(second), lo, hi);
    out.table_ = std::move(table);
    return out;
}

PointSpreadFunction PointSpreadFunction::read_tabulated(std::istream& in) {
    std::vector<double> xs, ys;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        std::string extra;
        if (!(row >> a >> b) || (row >> extra)) {
            throw InvalidArgument("tabulated PSF: expected two numeric columns at line " +
                                  std::to_string(lineno));
        }
        xs.push_back(a);
        ys.push_back(b);
    }
    return tabulated(std::move(xs), std::move(ys));
}

PointSpreadFunction PointSpreadFunction::load_tabulated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("tabulated PSF: cannot open " + path.string());
    }
    return read_tabulated(in);
}

double PointSpreadFunction::support_halfwidth() const { return std::max(std::abs(lo_), std::abs(hi_)); }

double PointSpreadFunction::evaluate(double x) const {
    switch (kind_) {
        case PsfKind::Gaussian: {
            const double s = width_;
            return std::pow(2.0 * kPi * s * s, -0.25) * std::exp(-x * x / (4.0 * s * s));
        }
        case PsfKind::Sinc:
            return sinc_value(x / width_) / std::sqrt(width_);
        case PsfKind::Tabulated:
            return (*table_)(x);
    }
    return 0.0;
}

double PointSpreadFunction::derivative(double x) const {
    switch (kind_) {
        case PsfKind::Gaussian:
            return -x / (2.0 * width_ * width_) * evaluate(x);
        case PsfKind::Sinc:
            return sinc_prime(x / width_) / (width_ * std::sqrt(width_));
        case PsfKind::Tabulated:
            return table_->prime(x);
    }
    return 0.0;
}

double PointSpreadFunction::spectral_density(double k) const {
    switch (kind_) {
        case PsfKind::Gaussian: {
            const double s = width_;
            return s * std::sqrt(2.0 / kPi) * std::exp(-2.0 * s * s * k * k);
        }
        case PsfKind::Sinc:
            return std::abs(k) <= kPi / width_ ? width_ / (2.0 * kPi) : 0.0;
        case PsfKind::Tabulated:
            break;
    }
    throw InvalidArgument("spectral density is not available for tabulated PSFs");
}

double PointSpreadFunction::spectral_halfwidth() const {
    switch (kind_) {
        case PsfKind::Gaussian: return 10.0 / width_;  // exp(-200) beyond
        case PsfKind::Sinc: return kPi / width_;
        case PsfKind::Tabulated: break;
    }
    throw InvalidArgument("spectral density is not available for tabulated PSFs");
}

std::vector<double> PointSpreadFunction::breakpoints(double shift, double lo, double hi) const {
    std::vector<double> pts;
    switch (kind_) {
        case PsfKind::Gaussian:
            break;
        case PsfKind::Sinc: {
            const auto first = static_cast<long>(std::ceil((lo - shift) / width_));
            const auto last = static_cast<long>(std::floor((hi - shift) / width_));
            for (long n = first; n <= last; ++n) {
                if (n != 0) pts.push_back(shift + static_cast<double>(n) * width_);
            }
            break;
        }
        case PsfKind::Tabulated:
            for (double t : table_->x) {
                if (t + shift >= lo && t + shift <= hi) pts.push_back(t + shift);
            }
            break;
    }
    return pts;
}

}  // namespace superres
