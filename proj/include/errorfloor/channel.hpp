#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "errorfloor/rng.hpp"

namespace efloor {

struct NonPositiveSNR : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Amplitude SNR s with its derived views. Noise std deviation is 1/s with
// unit signal; the dB axis is 20*log10(s) (no Eb/N0 normalization anywhere).
struct SnrPoint {
    double s;
    double s_squared;
    double snr_db;

    static SnrPoint from_s(double s);
    static SnrPoint from_s_squared(double s2);
    static SnrPoint from_db(double db);
};

// Received vector for the transmitted all-(+1) codeword: x_i = 1 + g_i / s.
std::vector<double> sample_output(int n, const SnrPoint& snr, Rng& rng);

// Min-sum log-likelihoods measured in units of s^2: h = x exactly.
inline std::vector<double> llr(std::span<const double> x) {
    return {x.begin(), x.end()};
}

// Squared channel-metric length of the noise, l^2 = sum (1 - x_i)^2.
double instanton_length_sq(std::span<const double> x);

// Large-SNR FER estimate exp(-l^2 s^2 / 2); overlay curves only, no
// phase-volume prefactor.
double fer_asymptote(double l_sq, const SnrPoint& snr);

}  // namespace efloor
