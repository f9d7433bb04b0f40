#include "relbgk/specfun.hpp"

#include "relbgk/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace relbgk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

void require_positive(double beta, const char *what)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError(std::string(what) + ": beta must be positive and finite, got " + std::to_string(beta));
    }
}

// digamma at a positive integer m.
double digamma_int(int m)
{
    double h = -kEulerGamma;
    for (int j = 1; j < m; ++j) {
        h += 1.0 / j;
    }
    return h;
}

// Ascending series for K1, K2 (unscaled). Accurate to a few ulp for x < 2.
struct SeriesPair {
    double k1;
    double k2;
};

SeriesPair bessel_series(double x)
{
    const double y = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    double i1 = 0.0, i2 = 0.0, s1 = 0.0, s2 = 0.0;
    double t1 = 1.0; // y^k / (k! (k+1)!)
    double t2 = 0.5; // y^k / (k! (k+2)!)
    for (int k = 0; k < 60; ++k) {
        i1 += t1;
        i2 += t2;
        s1 += (digamma_int(k + 1) + digamma_int(k + 2)) * t1;
        s2 += (digamma_int(k + 1) + digamma_int(k + 3)) * t2;
        if (t1 < 1e-18 * i1 && k > 2) {
            break;
        }
        t1 *= y / ((k + 1.0) * (k + 2.0));
        t2 *= y / ((k + 1.0) * (k + 3.0));
    }
    i1 *= 0.5 * x;
    i2 *= y;
    const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    const double k2 = 2.0 / (x * x) - 0.5 - log_half * i2 + 0.125 * x * x * s2;
    return {k1, k2};
}

// Exponentially scaled large-argument expansion e^x K_nu(x).
double bessel_asymptotic_scaled(int order, double x)
{
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        const double mag = std::fabs(term);
        if (mag > last) {
            break; // series started to diverge
        }
        sum += term;
        last = mag;
        if (mag < 1e-17 * std::fabs(sum)) {
            break;
        }
    }
    return std::sqrt(kPi / (2.0 * x)) * sum;
}

// s-form of the cosh integral with r = asinh(s):
//   e^b K1(b) = int_0^inf exp(-b (sqrt(1+s^2) - 1)) ds
//   e^b K2(b) = int_0^inf (1 + 2 s^2) / sqrt(1+s^2) exp(-b (sqrt(1+s^2) - 1)) ds
double bessel_quadrature_scaled(int order, double beta)
{
    using boost::math::quadrature::gauss_kronrod;
    const double span = 60.0 / beta;
    const double s_max = std::sqrt((1.0 + span) * (1.0 + span) - 1.0);
    auto integrand = [beta, order](double s) {
        const double q0 = std::sqrt(1.0 + s * s);
        const double excess = s * s / (q0 + 1.0);
        const double w = std::exp(-beta * excess);
        return order == 1 ? w : (1.0 + 2.0 * s * s) / q0 * w;
    };
    return gauss_kronrod<double, 15>::integrate(integrand, 0.0, s_max, 10, 1e-14);
}

double bessel_scaled_unchecked(int order, double beta)
{
    if (beta < kSeriesSeam) {
        const SeriesPair s = bessel_series(beta);
        return std::exp(beta) * (order == 1 ? s.k1 : s.k2);
    }
    if (beta > kAsymptoticSeam) {
        return bessel_asymptotic_scaled(order, beta);
    }
    return bessel_quadrature_scaled(order, beta);
}

void require_order(int order)
{
    if (order != 1 && order != 2) {
        throw DomainError("bessel_k: order must be 1 or 2, got " + std::to_string(order));
    }
}

// log Lambda(R; b) without overflow/underflow.
double log_residual_lambda(double radius, double b)
{
    const double br = b * radius;
    return std::log(4.0 * kPi) - 3.0 * std::log(b) - br + std::log(br * br + 2.0 * br + 2.0);
}

} // namespace

double bessel_k_scaled(int order, double beta)
{
    require_order(order);
    require_positive(beta, "bessel_k_scaled");
    return bessel_scaled_unchecked(order, beta);
}

double bessel_k(int order, double beta)
{
    require_order(order);
    if (!(beta >= kBesselBetaMin && beta <= kBesselBetaMax)) {
        throw DomainError("bessel_k: beta outside [1e-3, 700]: " + std::to_string(beta));
    }
    if (beta < kSeriesSeam) {
        const SeriesPair s = bessel_series(beta);
        return order == 1 ? s.k1 : s.k2;
    }
    return std::exp(-beta) * bessel_scaled_unchecked(order, beta);
}

double ratio_k1k2(double beta)
{
    require_positive(beta, "ratio_k1k2");
    if (beta < 1e-100) {
        return 0.5 * beta;
    }
    if (beta < kSeriesSeam) {
        const SeriesPair s = bessel_series(beta);
        return s.k1 / s.k2;
    }
    return bessel_scaled_unchecked(1, beta) / bessel_scaled_unchecked(2, beta);
}

double ratio_k1k2_derivative(double beta)
{
    const double r = ratio_k1k2(beta);
    // K1' = -K0 - K1/b, K2' = -K1 - 2 K2/b and K0 = K2 - 2 K1/b.
    return r * r + 3.0 * r / beta - 1.0;
}

double invert_ratio(double r)
{
    if (!(r >= 0.0 && r < 1.0)) {
        throw DomainError("invert_ratio: argument must lie in [0, 1), got " + std::to_string(r));
    }
    if (r == 0.0) {
        return 0.0;
    }

    double hi = 1.0;
    while (ratio_k1k2(hi) < r) {
        hi *= 2.0;
        if (hi > 1e300) {
            throw DomainError("invert_ratio: argument too close to 1");
        }
    }
    double lo = hi == 1.0 ? 0.0 : 0.5 * hi;

    double x = r < 0.3 ? 2.0 * r : (r > 0.9 ? 1.5 / (1.0 - r) : 0.5 * (lo + hi));
    if (!(x > lo && x < hi)) {
        x = 0.5 * (lo + hi);
    }
    for (int it = 0; it < 300; ++it) {
        const double value = ratio_k1k2(x);
        const double residual = value - r;
        if (residual == 0.0) {
            return x;
        }
        (residual < 0.0 ? lo : hi) = x;
        const double slope = value * value + 3.0 * value / x - 1.0;
        double next = x - residual / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::fabs(next - x) <= 1e-15 * next || hi - lo <= 1e-15 * hi) {
            return next;
        }
        x = next;
    }
    return x;
}

double log_partition_m(double beta)
{
    require_positive(beta, "log_partition_m");
    return std::log(4.0 * kPi) + std::log(bessel_scaled_unchecked(2, beta)) - beta - std::log(beta);
}

double partition_m(double beta)
{
    require_positive(beta, "partition_m");
    if (beta < kSeriesSeam) {
        return 4.0 * kPi * bessel_series(beta).k2 / beta;
    }
    return std::exp(log_partition_m(beta));
}

double cutoff_profile(double s) noexcept
{
    s = std::fabs(s);
    if (s <= 1.0) {
        return 1.0;
    }
    if (s >= 2.0) {
        return 0.0;
    }
    const double t = s - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double truncated_partition_m(double beta, double cutoff_radius)
{
    require_positive(beta, "truncated_partition_m");
    if (!(cutoff_radius > 0.0)) {
        throw DomainError("truncated_partition_m: cutoff radius must be positive");
    }
    using boost::math::quadrature::gauss_kronrod;

    const double span = 60.0 / beta;
    const double s_max = std::sqrt((1.0 + span) * (1.0 + span) - 1.0);
    auto shell = [beta](double s) {
        const double q0 = std::sqrt(1.0 + s * s);
        return s * s * std::exp(-beta * (s * s / (q0 + 1.0)));
    };
    double scaled = 0.0;
    const double inner_end = std::min(cutoff_radius, s_max);
    scaled += gauss_kronrod<double, 15>::integrate(shell, 0.0, inner_end, 20, 1e-14);
    if (cutoff_radius < s_max) {
        const double outer_end = std::min(2.0 * cutoff_radius, s_max);
        auto ramp = [&](double s) { return cutoff_profile(s / cutoff_radius) * shell(s); };
        scaled += gauss_kronrod<double, 15>::integrate(ramp, cutoff_radius, outer_end, 20, 1e-14);
    }
    return 4.0 * kPi * std::exp(-beta) * scaled;
}

double psi(double beta)
{
    require_positive(beta, "psi");
    return 3.0 / beta + ratio_k1k2(beta);
}

double residual_lambda(double radius, double beta)
{
    require_positive(beta, "residual_lambda");
    if (!(radius >= 0.0)) {
        throw DomainError("residual_lambda: radius must be nonnegative");
    }
    const double br = beta * radius;
    return 4.0 * kPi / (beta * beta * beta) * std::exp(-br) * (br * br + 2.0 * br + 2.0);
}

double residual_phi(double radius, double velocity_cap, double beta)
{
    if (!(velocity_cap > 0.0)) {
        throw DomainError("residual_phi: velocity cap must be positive");
    }
    return residual_lambda(radius, beta / (3.0 * velocity_cap));
}

double inverse_ratio_lipschitz(double beta_lo, double beta_hi)
{
    require_positive(beta_lo, "inverse_ratio_lipschitz");
    if (!(beta_hi >= beta_lo)) {
        throw DomainError("inverse_ratio_lipschitz: empty interval");
    }
    constexpr int kSamples = 4000;
    const double log_lo = std::log(beta_lo);
    const double log_hi = std::log(beta_hi);
    double worst = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double b = i == kSamples ? beta_hi : std::exp(log_lo + (log_hi - log_lo) * i / kSamples);
        worst = std::max(worst, 1.0 / ratio_k1k2_derivative(b));
    }
    return worst;
}

EntropyBoundTerms entropy_bound_cb_terms(double beta_sup)
{
    if (!(beta_sup > 1.0) || !std::isfinite(beta_sup)) {
        throw DomainError("entropy_bound_cb: beta_sup must exceed 1, got " + std::to_string(beta_sup));
    }
    const double radius = beta_sup * beta_sup;
    const double cap = beta_sup;
    const double beta_inf = 1.0 / beta_sup;
    const double log_m = log_partition_m(beta_sup);

    EntropyBoundTerms terms;
    terms.temperature_term = 4.0 / beta_sup;
    terms.lambda_term = 2.0 * std::exp(log_residual_lambda(2.0 * radius, beta_sup) - log_m);
    terms.phi_term = 2.0 * std::exp(log_residual_lambda(radius, beta_inf / (3.0 * cap)) - log_m);
    return terms;
}

double entropy_bound_cb(double beta_sup)
{
    return entropy_bound_cb_terms(beta_sup).total();
}

BesselEval evaluate_bessel(double beta)
{
    require_positive(beta, "evaluate_bessel");
    BesselEval out;
    out.beta = beta;
    out.scaled = beta > kBesselBetaMax;
    if (out.scaled) {
        out.k1 = bessel_scaled_unchecked(1, beta);
        out.k2 = bessel_scaled_unchecked(2, beta);
    } else if (beta < kSeriesSeam) {
        const SeriesPair s = bessel_series(beta);
        out.k1 = s.k1;
        out.k2 = s.k2;
    } else {
        const double damp = std::exp(-beta);
        out.k1 = damp * bessel_scaled_unchecked(1, beta);
        out.k2 = damp * bessel_scaled_unchecked(2, beta);
    }
    out.ratio = out.k1 / out.k2;
    return out;
}

PartitionEval evaluate_partition(double beta, double cutoff_radius)
{
    return {beta, partition_m(beta), truncated_partition_m(beta, cutoff_radius)};
}

} // namespace relbgk
