#include "roam/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace roam {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sq_dist(const Color& a, const Color& b)
{
    double d = 0.0;
    for (int c = 0; c < 3; ++c)
        d += (a[c] - b[c]) * (a[c] - b[c]);
    return d;
}

double component_log(const Color& x, double weight, const Color& mean, const Color& var)
{
    if (weight <= 0.0)
        return -std::numeric_limits<double>::infinity();
    double acc = std::log(weight);
    for (int c = 0; c < 3; ++c) {
        const double d = x[c] - mean[c];
        acc -= 0.5 * (kLog2Pi + std::log(var[c]) + d * d / var[c]);
    }
    return acc;
}

double log_sum_exp(const double* v, std::size_t n)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, v[i]);
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += std::exp(v[i] - m);
    return m + std::log(s);
}

std::vector<Color> kmeanspp(std::span<const Color> samples, std::size_t K, std::mt19937_64& rng)
{
    std::vector<Color> centers;
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    centers.push_back(samples[pick(rng)]);
    std::vector<double> d2(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        d2[i] = sq_dist(samples[i], centers[0]);
    while (centers.size() < K) {
        double total = 0.0;
        for (double v : d2)
            total += v;
        std::size_t chosen = 0;
        if (total <= 0.0) {
            chosen = pick(rng);
        } else {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (chosen = 0; chosen + 1 < samples.size(); ++chosen) {
                u -= d2[chosen];
                if (u < 0.0)
                    break;
            }
        }
        centers.push_back(samples[chosen]);
        for (std::size_t i = 0; i < samples.size(); ++i)
            d2[i] = std::min(d2[i], sq_dist(samples[i], centers.back()));
    }
    return centers;
}

}  // namespace

GmmEvaluator::GmmEvaluator(const Gmm& model)
{
    for (std::size_t k = 0; k < model.components(); ++k) {
        if (model.weights[k] <= 0.0)
            continue;
        Comp c;
        c.log_norm = std::log(model.weights[k]);
        c.mean = model.means[k];
        for (int ch = 0; ch < 3; ++ch) {
            c.log_norm -= 0.5 * (kLog2Pi + std::log(model.variances[k][ch]));
            c.half_inv_var[ch] = 0.5 / model.variances[k][ch];
        }
        comps_.push_back(c);
    }
    if (comps_.size() > 16)
        throw InputError("GmmEvaluator: at most 16 components supported");
}

double GmmEvaluator::log_density(const Color& x) const
{
    double terms[16];
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t n = comps_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Comp& c = comps_[k];
        const double d0 = x[0] - c.mean[0], d1 = x[1] - c.mean[1], d2 = x[2] - c.mean[2];
        terms[k] = c.log_norm - d0 * d0 * c.half_inv_var[0] - d1 * d1 * c.half_inv_var[1] - d2 * d2 * c.half_inv_var[2];
        best = std::max(best, terms[k]);
    }
    if (!(best > kLnFloor - 50.0))
        return kLnFloor;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += std::exp(terms[k] - best);
    return std::max(best + std::log(s), kLnFloor);
}

double log_density(const Gmm& model, const Color& color)
{
    std::vector<double> terms(model.components());
    for (std::size_t k = 0; k < model.components(); ++k)
        terms[k] = component_log(color, model.weights[k], model.means[k], model.variances[k]);
    const double v = log_sum_exp(terms.data(), terms.size());
    return std::isfinite(v) ? std::max(v, kLnFloor) : kLnFloor;
}

bool is_valid(const Gmm& model, double variance_floor)
{
    if (model.components() == 0 || model.means.size() != model.components() ||
        model.variances.size() != model.components())
        return false;
    double sum = 0.0;
    for (std::size_t k = 0; k < model.components(); ++k) {
        if (!(model.weights[k] >= 0.0))
            return false;
        sum += model.weights[k];
        for (int c = 0; c < 3; ++c)
            if (!(model.variances[k][c] >= variance_floor) || !std::isfinite(model.means[k][c]))
                return false;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

void add_empty_component(Gmm& model)
{
    model.weights.push_back(0.0);
    model.means.push_back({0.5, 0.5, 0.5});
    model.variances.push_back({kReplacementVariance, kReplacementVariance, kReplacementVariance});
}

Gmm fit_gmm(std::span<const Color> samples, int K, std::uint64_t seed, const EmOptions& opts, EmTrace* trace)
{
    if (samples.empty())
        throw InputError("fit_gmm: empty sample set");
    if (K <= 0)
        throw InputError("fit_gmm: K must be positive");
    const std::size_t n = samples.size();
    const std::size_t k_count = std::min<std::size_t>(static_cast<std::size_t>(K), n);
    std::mt19937_64 rng(seed);

    Gmm g;
    g.means = kmeanspp(samples, k_count, rng);
    g.weights.assign(k_count, 0.0);
    g.variances.assign(k_count, Color{0.0, 0.0, 0.0});

    // One hard assignment pass gives the starting weights and variances.
    {
        std::vector<Color> sum(k_count, Color{0, 0, 0}), sum_sq(k_count, Color{0, 0, 0});
        std::vector<double> count(k_count, 0.0);
        for (const Color& x : samples) {
            std::size_t best = 0;
            double bd = sq_dist(x, g.means[0]);
            for (std::size_t k = 1; k < k_count; ++k) {
                const double d = sq_dist(x, g.means[k]);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            count[best] += 1.0;
            for (int c = 0; c < 3; ++c) {
                sum[best][c] += x[c];
                sum_sq[best][c] += x[c] * x[c];
            }
        }
        for (std::size_t k = 0; k < k_count; ++k) {
            g.weights[k] = count[k] / static_cast<double>(n);
            for (int c = 0; c < 3; ++c) {
                if (count[k] > 0.0) {
                    g.means[k][c] = sum[k][c] / count[k];
                    g.variances[k][c] = sum_sq[k][c] / count[k] - g.means[k][c] * g.means[k][c];
                }
                g.variances[k][c] = std::max(g.variances[k][c], opts.variance_floor);
            }
        }
    }

    std::vector<double> resp(n * k_count);
    auto e_step = [&]() {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double* r = &resp[i * k_count];
            for (std::size_t k = 0; k < k_count; ++k)
                r[k] = component_log(samples[i], g.weights[k], g.means[k], g.variances[k]);
            const double lse = log_sum_exp(r, k_count);
            ll += lse;
            for (std::size_t k = 0; k < k_count; ++k)
                r[k] = std::exp(r[k] - lse);
        }
        return ll / static_cast<double>(n);
    };

    double ll = e_step();
    if (trace)
        trace->push_back(ll);
    for (int it = 0; it < opts.max_iterations; ++it) {
        for (std::size_t k = 0; k < k_count; ++k) {
            double nk = 0.0;
            Color mean{0, 0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k_count + k];
                nk += r;
                for (int c = 0; c < 3; ++c)
                    mean[c] += r * samples[i][c];
            }
            g.weights[k] = nk / static_cast<double>(n);
            if (nk < 1e-10)
                continue;  // empty component keeps its parameters
            for (int c = 0; c < 3; ++c)
                mean[c] /= nk;
            Color var{0, 0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k_count + k];
                for (int c = 0; c < 3; ++c) {
                    const double d = samples[i][c] - mean[c];
                    var[c] += r * d * d;
                }
            }
            g.means[k] = mean;
            for (int c = 0; c < 3; ++c)
                g.variances[k][c] = std::max(var[c] / nk, opts.variance_floor);
        }
        double wsum = 0.0;
        for (double w : g.weights)
            wsum += w;
        for (double& w : g.weights)
            w /= wsum;

        const double next = e_step();
        if (trace)
            trace->push_back(next);
        const double gain = next - ll;
        ll = next;
        if (gain < opts.tol_per_sample)
            break;
    }
    return g;
}

double per_sample_rate(double alpha_frame, std::size_t n)
{
    if (n == 0)
        return alpha_frame;
    return 1.0 - std::pow(1.0 - alpha_frame, 1.0 / static_cast<double>(n));
}

Gmm adapt_gmm(const Gmm& model, std::span<const Color> samples, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("adapt_gmm: alpha must lie in (0, 1)");
    constexpr double kMatchSigmas = 2.5;
    Gmm g = model;
    const std::size_t K = g.components();
    for (const Color& x : samples) {
        // Among components within the match radius, the one with the highest weighted density.
        std::size_t best = K;
        double best_d2 = 0.0, best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            double d2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double d = x[c] - g.means[k][c];
                d2 += d * d / g.variances[k][c];
            }
            if (!(d2 < kMatchSigmas * kMatchSigmas))
                continue;
            const double score = component_log(x, g.weights[k], g.means[k], g.variances[k]);
            if (score > best_score) {
                best_score = score;
                best_d2 = d2;
                best = k;
            }
        }
        for (double& w : g.weights)
            w *= (1.0 - alpha);
        if (best < K) {
            g.weights[best] += alpha;
            const double rho = alpha * std::exp(-0.5 * best_d2);
            for (int c = 0; c < 3; ++c) {
                const double m = (1.0 - rho) * g.means[best][c] + rho * x[c];
                const double d = x[c] - m;
                g.means[best][c] = m;
                g.variances[best][c] =
                    std::max((1.0 - rho) * g.variances[best][c] + rho * d * d, kVarianceFloor);
            }
        } else {
            const auto weakest = static_cast<std::size_t>(
                std::min_element(g.weights.begin(), g.weights.end()) - g.weights.begin());
            g.weights[weakest] = alpha;
            g.means[weakest] = x;
            g.variances[weakest] = {kReplacementVariance, kReplacementVariance, kReplacementVariance};
        }
        double sum = 0.0;
        for (double w : g.weights)
            sum += w;
        for (double& w : g.weights)
            w /= sum;
    }
    return g;
}

}  // namespace roam
