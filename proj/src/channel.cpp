#include "errorfloor/channel.hpp"

#include <cmath>

namespace efloor {

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on explicit uniforms; platform-stable.
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

SnrPoint SnrPoint::from_s(double s) {
    if (!(s > 0.0)) throw NonPositiveSNR("SNR amplitude must be positive");
    return {s, s * s, 20.0 * std::log10(s)};
}

SnrPoint SnrPoint::from_s_squared(double s2) {
    if (!(s2 > 0.0)) throw NonPositiveSNR("SNR^2 must be positive");
    return from_s(std::sqrt(s2));
}

SnrPoint SnrPoint::from_db(double db) { return from_s(std::pow(10.0, db / 20.0)); }

std::vector<double> sample_output(int n, const SnrPoint& snr, Rng& rng) {
    if (n < 1) throw NonPositiveSNR("sample_output: n must be >= 1");
    if (!(snr.s > 0.0)) throw NonPositiveSNR("sample_output: SNR must be positive");
    std::vector<double> x(n);
    const double sigma = 1.0 / snr.s;
    for (int i = 0; i < n; ++i) x[i] = 1.0 + sigma * rng.next_gaussian();
    return x;
}

double instanton_length_sq(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        const double d = 1.0 - v;
        acc += d * d;
    }
    return acc;
}

double fer_asymptote(double l_sq, const SnrPoint& snr) {
    return std::exp(-l_sq * snr.s_squared / 2.0);
}

}  // namespace efloor
