#include "superres/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace superres {

namespace detail {

const KronrodRule15& kronrod15() {
    static const KronrodRule15 rule = [] {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& x = gauss_kronrod<double, 15>::abscissa();
        const auto& wk = gauss_kronrod<double, 15>::weights();
        const auto& wg = gauss<double, 7>::weights();
        // Boost stores the non-negative half, center first; the Gauss nodes are
        // the even-indexed Kronrod nodes.
        KronrodRule15 r{};
        for (std::size_t i = 0; i < 8; ++i) {
            r.nodes[i] = x[i];
            r.kronrod_w[i] = wk[i];
            r.gauss_w[i] = (i % 2 == 0) ? wg[i / 2] : 0.0;
        }
        return r;
    }();
    return rule;
}

}  // namespace detail

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    return integrate_n<1>([&](double x) { return std::array<double, 1>{f(x)}; }, a, b, opts);
}

double quadrature(const std::function<double(double)>& f, double a, double b, double tol) {
    QuadratureOptions opts;
    opts.abs_tol = tol;
    return integrate(f, a, b, opts).value[0];
}

}  // namespace superres
