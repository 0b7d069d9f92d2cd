// SPDX-License-Identifier: Apache-2.0
#include "bdft/identification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include "dft_util.hpp"

namespace bdft {

FrequencyResponse estimate_frf(const TimeSeries& perturbation, const TimeSeries& response,
                               const MultisineSpec& spec) {
    validate(perturbation);
    validate(response);
    require_same_grid(perturbation, response);

    const std::size_t n = perturbation.samples.size();
    const double fs = perturbation.sample_rate;
    const auto bins = excitation_bins(spec, fs, n);

    // Parseval: sum over all DFT bins of |F|^2 equals n * sum f^2.
    double total_power = 0.0;
    for (double v : perturbation.samples) total_power += v * v;
    total_power *= static_cast<double>(n);

    // Whole periods of the signal fundamental contained in the record; the
    // gcd with n keeps the per-period segment an integer sample count.
    std::size_t periods = n;
    for (std::size_t bin : bins) periods = std::gcd(periods, bin);

    FrequencyResponse out;
    out.points.reserve(bins.size());
    for (std::size_t bin : bins) {
        const std::complex<double> f_full = detail::dft_bin(perturbation.samples, bin);
        if (std::norm(f_full) <= 1e-12 * total_power)
            throw ZeroExcitation("no excitation power at bin " + std::to_string(bin));

        const double omega = kTwoPi * static_cast<double>(bin) * fs / static_cast<double>(n);
        FrfPoint point;
        point.omega = omega;
        if (periods >= 2) {
            const std::size_t seg = n / periods;
            const std::size_t seg_bin = bin / periods;
            std::vector<std::complex<double>> per_period(periods);
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t p = 0; p < periods; ++p) {
                const auto f_p =
                    detail::dft_bin(perturbation.samples, p * seg, seg, seg_bin);
                const auto u_p = detail::dft_bin(response.samples, p * seg, seg, seg_bin);
                if (std::norm(f_p) <= 1e-12 * total_power / static_cast<double>(periods))
                    throw ZeroExcitation("no excitation power at bin " + std::to_string(bin) +
                                         " in period " + std::to_string(p));
                per_period[p] = u_p / f_p;
                acc += per_period[p];
            }
            const std::complex<double> mean = acc / static_cast<double>(periods);
            double var = 0.0;
            for (const auto& h : per_period) var += std::norm(h - mean);
            var /= static_cast<double>(periods - 1);
            const double denom = std::norm(mean);
            point.value = mean;
            point.weight =
                denom > 0.0 ? std::clamp(1.0 - var / denom, 0.0, 1.0) : 0.0;
        } else {
            const std::complex<double> u_full = detail::dft_bin(response.samples, bin);
            point.value = u_full / f_full;  // S_fu / S_ff reduces to U/F per record
            point.weight = 1.0;
        }
        out.points.push_back(point);
    }
    validate(out);
    return out;
}

namespace {

struct ModelGradient {
    std::complex<double> h;
    std::complex<double> dh_dgain;
    std::complex<double> dh_dlog_wn;
    std::complex<double> dh_dlog_zeta;
};

ModelGradient model_gradient(const BdftParams& p, double omega) {
    const std::complex<double> jw(0.0, omega);
    const double wn = p.natural_frequency;
    const double wn2 = wn * wn;
    const std::complex<double> den = jw * jw + 2.0 * p.damping_ratio * wn * jw + wn2;
    const std::complex<double> base = wn2 / den;

    ModelGradient g;
    g.h = p.gain * base;
    g.dh_dgain = base;
    // d(den)/d(wn) = 2 zeta jw + 2 wn ; chain rule for log parameters
    const std::complex<double> dden_dwn = 2.0 * p.damping_ratio * jw + 2.0 * wn;
    const std::complex<double> dh_dwn =
        p.gain * (2.0 * wn / den - wn2 * dden_dwn / (den * den));
    const std::complex<double> dh_dzeta = -p.gain * wn2 * (2.0 * wn * jw) / (den * den);
    g.dh_dlog_wn = wn * dh_dwn;
    g.dh_dlog_zeta = p.damping_ratio * dh_dzeta;
    return g;
}

double fit_cost(const FrequencyResponse& frf, const BdftParams& p) {
    double cost = 0.0;
    for (const auto& pt : frf.points) cost += pt.weight * std::norm(pt.value - frf_value(p, pt.omega));
    return cost;
}

// 3x3 solve with partial pivoting; returns false on a (near-)singular system.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3>& b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int col = 2; col >= 0; --col) {
        for (int r = col + 1; r < 3; ++r) b[col] -= a[col][r] * b[r];
        b[col] /= a[col][col];
    }
    return std::isfinite(b[0]) && std::isfinite(b[1]) && std::isfinite(b[2]);
}

FitResult fit_from_start(const FrequencyResponse& frf, const BdftParams& start,
                         int max_iterations, double tolerance) {
    // theta = (G, log wn, log zeta); the log keeps wn and zeta positive.
    std::array<double, 3> theta = {start.gain, std::log(start.natural_frequency),
                                   std::log(start.damping_ratio)};
    auto to_params = [](const std::array<double, 3>& t) {
        return BdftParams{t[0], std::exp(t[1]), std::exp(t[2])};
    };

    FitResult result;
    result.params = to_params(theta);
    double cost = fit_cost(frf, result.params);
    if (!std::isfinite(cost)) cost = std::numeric_limits<double>::max();
    result.cost_history.push_back(cost);

    double lambda = 1e-3;
    for (int iter = 0; iter < max_iterations; ++iter) {
        result.iterations = iter + 1;
        const BdftParams p = to_params(theta);

        // normal equations of the weighted complex residual
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (const auto& pt : frf.points) {
            const ModelGradient g = model_gradient(p, pt.omega);
            const std::complex<double> r = pt.value - g.h;
            const std::array<std::complex<double>, 3> grad = {g.dh_dgain, g.dh_dlog_wn,
                                                              g.dh_dlog_zeta};
            for (int i = 0; i < 3; ++i) {
                jtr[i] += pt.weight * (grad[i].real() * r.real() + grad[i].imag() * r.imag());
                for (int j = i; j < 3; ++j)
                    jtj[i][j] += pt.weight * (grad[i].real() * grad[j].real() +
                                              grad[i].imag() * grad[j].imag());
            }
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) jtj[i][j] = jtj[j][i];

        // Levenberg damping, retried until a step improves the cost
        bool accepted = false;
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            std::array<std::array<double, 3>, 3> a = jtj;
            for (int i = 0; i < 3; ++i) a[i][i] += lambda * std::max(jtj[i][i], 1e-12);
            std::array<double, 3> delta = jtr;
            if (!solve3(a, delta)) {
                lambda *= 10.0;
                continue;
            }
            std::array<double, 3> cand = {theta[0] + delta[0],
                                          std::clamp(theta[1] + delta[1], -30.0, 30.0),
                                          std::clamp(theta[2] + delta[2], -30.0, 30.0)};
            const double cand_cost = fit_cost(frf, to_params(cand));
            if (std::isfinite(cand_cost) && cand_cost <= cost) {
                const double prev = cost;
                theta = cand;
                cost = cand_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                result.cost_history.push_back(cost);
                if (prev - cost <= tolerance * std::max(prev, 1e-300)) {
                    result.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // no descent direction left; call it converged at this minimum
            result.converged = true;
        }
        if (result.converged) break;
    }

    result.params = to_params(theta);
    result.residual = cost;
    return result;
}

}  // namespace

FitResult fit_bdft_model(const FrequencyResponse& frf, std::optional<BdftParams> init) {
    validate(frf);
    if (frf.points.size() < 3)
        throw TooFewPoints("model fit needs at least 3 frequency points, got " +
                           std::to_string(frf.points.size()));
    double weight_sum = 0.0;
    for (const auto& pt : frf.points) weight_sum += pt.weight;
    if (weight_sum <= 0.0) throw ValidationError("all coherence weights are zero");

    constexpr int kMaxIterations = 500;
    constexpr double kTolerance = 1e-10;

    std::vector<BdftParams> starts;
    if (init.has_value()) {
        validate(*init);
        starts.push_back(*init);
    } else {
        // multi-start over the excitation band; wn is the multimodal axis
        double w_lo = frf.points.front().omega;
        const double w_hi = frf.points.back().omega;
        if (w_lo <= 0.0) w_lo = frf.points[1].omega;
        const std::complex<double> h0 = frf.points.front().value;
        double g0 = std::abs(h0);
        if (g0 == 0.0) g0 = 1.0;
        if (h0.real() < 0.0) g0 = -g0;
        for (int i = 0; i < 5; ++i) {
            const double wn = w_lo * std::pow(w_hi / w_lo, static_cast<double>(i) / 4.0);
            starts.push_back({g0, wn, (i % 2 == 0) ? 0.2 : 0.7});
        }
    }

    FitResult best;
    bool have_best = false;
    for (const auto& start : starts) {
        FitResult r = fit_from_start(frf, start, kMaxIterations, kTolerance);
        if (!have_best || r.residual < best.residual) {
            best = std::move(r);
            have_best = true;
        }
    }
    return best;
}

double vaf(const TimeSeries& measured, const TimeSeries& predicted) {
    validate(measured);
    validate(predicted);
    require_same_grid(measured, predicted);

    const double var_measured = variance(measured.samples);
    if (var_measured == 0.0)
        throw ZeroVariance("VAF undefined: measured series has zero variance");

    std::vector<double> error(measured.samples.size());
    for (std::size_t i = 0; i < error.size(); ++i)
        error[i] = measured.samples[i] - predicted.samples[i];
    return 100.0 * (1.0 - variance(error) / var_measured);
}

LpvSchedule fit_lpv_schedule(const std::vector<std::pair<double, BdftParams>>& per_condition_fits,
                             std::string variable_name) {
    if (per_condition_fits.size() < 2)
        throw ValidationError("schedule fit needs at least two conditions");
    for (const auto& [v, params] : per_condition_fits) {
        if (!std::isfinite(v)) throw ValidationError("scheduling variable is not finite");
        validate(params);
    }

    const auto n = static_cast<double>(per_condition_fits.size());
    double v_mean = 0.0;
    for (const auto& [v, params] : per_condition_fits) v_mean += v;
    v_mean /= n;

    double sxx = 0.0;
    for (const auto& [v, params] : per_condition_fits) sxx += (v - v_mean) * (v - v_mean);
    if (sxx == 0.0)
        throw DegenerateVariable("all conditions share the same scheduling-variable value");

    auto ols = [&](auto field) {
        double p_mean = 0.0;
        for (const auto& [v, params] : per_condition_fits) p_mean += field(params);
        p_mean /= n;
        double sxy = 0.0;
        for (const auto& [v, params] : per_condition_fits)
            sxy += (v - v_mean) * (field(params) - p_mean);
        return std::pair<double, double>{p_mean, sxy / sxx};  // value at v_mean, slope
    };

    const auto [g_base, g_slope] = ols([](const BdftParams& p) { return p.gain; });
    const auto [wn_base, wn_slope] =
        ols([](const BdftParams& p) { return p.natural_frequency; });
    const auto [zeta_base, zeta_slope] =
        ols([](const BdftParams& p) { return p.damping_ratio; });

    double v_min = per_condition_fits.front().first, v_max = v_min;
    for (const auto& [v, params] : per_condition_fits) {
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }
    return make_lpv_schedule({g_base, wn_base, zeta_base}, {g_slope, wn_slope, zeta_slope},
                             std::move(variable_name), v_mean, v_min, v_max);
}

}  // namespace bdft
