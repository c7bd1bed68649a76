#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "roam/types.hpp"

namespace roam {

inline constexpr double kVarianceFloor = 1e-4;
inline constexpr double kLnFloor = -20.0;
/// Per-channel variance given to a component created from an unmatched sample.
inline constexpr double kReplacementVariance = 1e-3;

/// Diagonal-covariance Gaussian mixture over RGB.
struct Gmm {
    std::vector<double> weights;
    std::vector<Color> means;
    std::vector<Color> variances;

    std::size_t components() const { return weights.size(); }
    friend bool operator==(const Gmm&, const Gmm&) = default;
};

struct FgBgModel {
    Gmm fg;
    Gmm bg;
    friend bool operator==(const FgBgModel&, const FgBgModel&) = default;
};

struct EmOptions {
    int max_iterations = 100;
    double tol_per_sample = 1e-6;
    double variance_floor = kVarianceFloor;
};

/// Mean log-likelihood per sample after initialization and after every EM iteration.
using EmTrace = std::vector<double>;

/// EM from a seeded k-means++ start. With fewer than K samples the model has one component
/// per sample. Throws InputError on an empty sample set.
Gmm fit_gmm(std::span<const Color> samples, int K, std::uint64_t seed, const EmOptions& opts = {},
            EmTrace* trace = nullptr);

/// ln sum_k w_k N(c; m_k, diag v_k), clamped below at kLnFloor.
double log_density(const Gmm& model, const Color& color);

/// Stauffer-Grimson style online update, one sample at a time. Throws InputError if alpha is
/// outside (0, 1).
Gmm adapt_gmm(const Gmm& model, std::span<const Color> samples, double alpha);

/// Per-sample rate that decays old weights by (1 - alpha_frame) over n samples.
double per_sample_rate(double alpha_frame, std::size_t n);

bool is_valid(const Gmm& model, double variance_floor = kVarianceFloor);

/// Appends a zero-weight component; the model still evaluates identically.
void add_empty_component(Gmm& model);

/// Precomputed constants for fast repeated evaluation of one mixture.
class GmmEvaluator {
public:
    GmmEvaluator() = default;
    explicit GmmEvaluator(const Gmm& model);
    double log_density(const Color& c) const;

private:
    struct Comp {
        double log_norm;  // ln w - 0.5 sum ln(2 pi v)
        Color mean;
        Color half_inv_var;
    };
    std::vector<Comp> comps_;
};

}  // namespace roam
