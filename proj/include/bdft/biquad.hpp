// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace bdft {

struct BiquadCoeffs {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;  // feedforward
    double a1 = 0.0, a2 = 0.0;            // feedback (a0 normalized to 1)
};

/// Second-order IIR section, transposed direct form II. Two state variables,
/// constant cost per sample.
class Biquad {
public:
    Biquad() = default;
    explicit Biquad(const BiquadCoeffs& c) : c_(c) {}

    double step(double x) {
        const double y = c_.b0 * x + s1_;
        s1_ = c_.b1 * x - c_.a1 * y + s2_;
        s2_ = c_.b2 * x - c_.a2 * y;
        return y;
    }

    void reset() { s1_ = s2_ = 0.0; }

    /// Swaps coefficients while keeping the internal state, so a retune does
    /// not inject a step into the output.
    void set_coeffs(const BiquadCoeffs& c) { c_ = c; }

    const BiquadCoeffs& coeffs() const { return c_; }

private:
    BiquadCoeffs c_;
    double s1_ = 0.0;
    double s2_ = 0.0;
};

/// First-order low-pass w / (s + w), discretized with the bilinear transform.
class FirstOrderLag {
public:
    FirstOrderLag() = default;

    FirstOrderLag(double cutoff_rad_s, double sample_rate) {
        const double k = 2.0 * sample_rate;
        b0_ = cutoff_rad_s / (k + cutoff_rad_s);
        a1_ = (cutoff_rad_s - k) / (k + cutoff_rad_s);
    }

    double step(double x) {
        const double y = b0_ * x + s_;
        s_ = b0_ * x - a1_ * y;
        return y;
    }

    /// Sets the state to the steady-state response for constant input x0
    /// (the bilinear transform preserves unit DC gain, so output == x0).
    void prime(double x0) { s_ = x0 * (1.0 - b0_); }

    void reset() { s_ = 0.0; }

private:
    double b0_ = 1.0;
    double a1_ = 0.0;
    double s_ = 0.0;
};

}  // namespace bdft
