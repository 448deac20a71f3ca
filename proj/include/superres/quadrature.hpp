#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "superres/errors.hpp"

namespace superres {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_panels = 1'000'000;
    /// Interior points where the integrand is known to be non-smooth or to
    /// vanish (e.g. sinc zeros). Points outside (a, b) are ignored.
    std::vector<double> breakpoints;
};

template <std::size_t N>
struct QuadratureResultN {
    std::array<double, N> value{};
    std::array<double, N> abs_error{};
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

using QuadratureResult = QuadratureResultN<1>;

namespace detail {

/// 15-point Kronrod / 7-point Gauss rule on [-1, 1], positive half.
struct KronrodRule15 {
    std::array<double, 8> nodes;      // nodes[0] == 0
    std::array<double, 8> kronrod_w;
    std::array<double, 8> gauss_w;    // nonzero on even indices only
};

const KronrodRule15& kronrod15();

template <std::size_t N>
struct Panel {
    double a = 0.0;
    double b = 0.0;
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> magnitude{};  // integral of |f|
    double worst = 0.0;
};

template <std::size_t N, class F>
Panel<N> apply_rule(const F& f, double a, double b) {
    const auto& rule = kronrod15();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, N> k{}, g{}, k_abs{}, asc{};

    std::array<double, N> fc = f(center);
    for (std::size_t c = 0; c < N; ++c) {
        k[c] = rule.kronrod_w[0] * fc[c];
        g[c] = rule.gauss_w[0] * fc[c];
        k_abs[c] = rule.kronrod_w[0] * std::abs(fc[c]);
    }
    std::array<std::array<double, N>, 8> lo{}, hi{};
    lo[0] = fc;
    hi[0] = fc;
    for (std::size_t i = 1; i < 8; ++i) {
        const double dx = half * rule.nodes[i];
        lo[i] = f(center - dx);
        hi[i] = f(center + dx);
        for (std::size_t c = 0; c < N; ++c) {
            const double s = lo[i][c] + hi[i][c];
            k[c] += rule.kronrod_w[i] * s;
            g[c] += rule.gauss_w[i] * s;
            k_abs[c] += rule.kronrod_w[i] * (std::abs(lo[i][c]) + std::abs(hi[i][c]));
        }
    }

    Panel<N> p;
    p.a = a;
    p.b = b;
    for (std::size_t c = 0; c < N; ++c) {
        const double mean = 0.5 * k[c];
        asc[c] = rule.kronrod_w[0] * std::abs(fc[c] - mean);
        for (std::size_t i = 1; i < 8; ++i) {
            asc[c] += rule.kronrod_w[i] * (std::abs(lo[i][c] - mean) + std::abs(hi[i][c] - mean));
        }
        const double result = k[c] * half;
        const double resasc = asc[c] * std::abs(half);
        const double resabs = k_abs[c] * std::abs(half);
        double err = std::abs((k[c] - g[c]) * half);
        // QUADPACK error scaling plus a roundoff floor.
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        constexpr double eps = 2.220446049250313e-16;
        if (resabs > 1e-290) {
            err = std::max(50.0 * eps * resabs, err);
        }
        p.value[c] = result;
        p.error[c] = err;
        p.magnitude[c] = resabs;
    }
    return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand.
///
/// Panels are refined largest-error-first until every component satisfies
/// err <= max(abs_tol, rel_tol * |I|, 100 eps int|f|); the last term is the
/// accuracy floor set by rounding in the integrand sums. Initial panels are seeded at
/// `opts.breakpoints`. Throws NonConvergence once `max_panels` is reached.
template <std::size_t N, class F>
QuadratureResultN<N> integrate_n(const F& f, double a, double b, const QuadratureOptions& opts) {
    if (!(a < b)) {
        throw InvalidArgument("quadrature: requires a < b");
    }
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double x : opts.breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<detail::Panel<N>> heap;
    heap.reserve(cuts.size() * 4);
    auto by_error = [](const detail::Panel<N>& l, const detail::Panel<N>& r) { return l.worst < r.worst; };

    QuadratureResultN<N> out;
    std::array<double, N> total{}, total_err{}, total_mag{};
    constexpr double kRoundoff = 100.0 * 2.220446049250313e-16;

    auto push = [&](detail::Panel<N> p) {
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += p.value[c];
            total_err[c] += p.error[c];
            total_mag[c] += p.magnitude[c];
        }
        heap.push_back(std::move(p));
        std::push_heap(heap.begin(), heap.end(), by_error);
        out.evaluations += 15;
    };

    // `worst` ranks panels by their error relative to each component's target.
    auto converged = [&](std::array<double, N>& target) {
        bool ok = true;
        for (std::size_t c = 0; c < N; ++c) {
            target[c] = std::max({opts.abs_tol, opts.rel_tol * std::abs(total[c]), kRoundoff * total_mag[c]});
            if (total_err[c] > target[c]) ok = false;
        }
        return ok;
    };
    auto score = [](detail::Panel<N>& p, const std::array<double, N>& target) {
        p.worst = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            p.worst = std::max(p.worst, p.error[c] / std::max(target[c], 1e-300));
        }
    };

    std::array<double, N> target{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::apply_rule<N>(f, cuts[i], cuts[i + 1]);
        for (std::size_t c = 0; c < N; ++c) target[c] = std::max(opts.abs_tol, 1e-300);
        score(p, target);
        push(std::move(p));
    }

    std::size_t rescore_at = heap.size() * 2;
    while (!converged(target)) {
        if (heap.size() >= opts.max_panels) {
            throw NonConvergence("quadrature: panel budget exhausted before tolerance was met");
        }
        if (heap.size() >= rescore_at) {
            for (auto& p : heap) score(p, target);
            std::make_heap(heap.begin(), heap.end(), by_error);
            rescore_at = heap.size() * 2;
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        detail::Panel<N> worst = std::move(heap.back());
        heap.pop_back();
        for (std::size_t c = 0; c < N; ++c) {
            total[c] -= worst.value[c];
            total_err[c] -= worst.error[c];
            total_mag[c] -= worst.magnitude[c];
        }
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NonConvergence("quadrature: panel width reached machine resolution");
        }
        auto left = detail::apply_rule<N>(f, worst.a, mid);
        auto right = detail::apply_rule<N>(f, mid, worst.b);
        score(left, target);
        score(right, target);
        push(std::move(left));
        push(std::move(right));
    }

    // Re-sum from scratch so running-sum drift does not leak into the result.
    std::array<double, N> sum{}, err{};
    std::sort(heap.begin(), heap.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    for (const auto& p : heap) {
        for (std::size_t c = 0; c < N; ++c) {
            sum[c] += p.value[c];
            err[c] += p.error[c];
        }
    }
    out.value = sum;
    out.abs_error = err;
    out.panels = heap.size();
    return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts);

/// Absolute-tolerance convenience wrapper; returns the integral only.
double quadrature(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace superres
