#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rmslab/rng.hpp"

namespace rmslab {

/// A stochastic gradient draw together with the true gradient at the same
/// point (available because every problem here is synthetic).
struct GradSample {
    std::vector<double> g;
    std::vector<double> exact;
};

namespace detail {
class ProblemImpl;
}

/// Synthetic smooth stochastic objective with analytically known gradient,
/// infimum, a valid (or estimated) Lipschitz constant of the gradient, and
/// per-coordinate noise levels. Immutable and cheap to copy.
class Problem {
public:
    enum class Kind { quadratic, smoothed_nonconvex, toy_mlp };

    Kind kind() const;
    std::string kind_name() const;
    std::size_t dim() const;

    /// Lipschitz constant of the gradient. For quadratic and
    /// smoothed-nonconvex this is a certified global bound; for toy_mlp it is
    /// a sampled estimate (see smoothness_certified).
    double smoothness() const;
    bool smoothness_certified() const;
    double f_star() const;

    const std::vector<double>& sigma() const;
    /// Stored aggregate sqrt(sum_i sigma_i^2), frozen at construction.
    double sigma_s() const;
    double min_sigma_sq() const;

    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;

    /// Draws g with E[g] = gradient(x). Gaussian coordinate noise of std
    /// sigma_i for quadratic/smoothed kinds; a minibatch gradient for toy_mlp.
    /// Deterministic in (problem, x, rng state).
    GradSample sample_gradient(std::span<const double> x, SplitMix64& rng) const;

    /// Canonical deterministic starting point for this problem.
    std::vector<double> initial_point() const;

    explicit Problem(std::shared_ptr<const detail::ProblemImpl> impl);

private:
    std::shared_ptr<const detail::ProblemImpl> impl_;
};

/// f(x) = 1/2 sum_i eig_i x_i^2 with L = max eig, f* = 0. sigma may be empty
/// (noiseless) or give the per-coordinate noise std.
Problem make_quadratic(std::size_t dim, std::vector<double> eigenvalues,
                       std::vector<double> sigma = {});

/// f(x) = scale * sum_i x_i^2/(1+x_i^2): nonconvex, globally L-smooth with
/// L = 2*scale, f* = 0.
Problem make_smoothed_nonconvex(std::size_t dim, double scale, std::vector<double> sigma = {});

/// One-hidden-layer tanh regression net on seeded synthetic data, trained by
/// mean squared loss. Parameter count d = hidden*(in_dim+2) + 1. Gradients
/// are analytic backprop; the stochastic oracle subsamples minibatches of
/// `batch` distinct points (0 means n_data/8, at least 1). f* is recorded as
/// 0 (the loss lower bound); sigma is estimated at the initial point and L by
/// sampled gradient differences, so smoothness_certified() is false.
Problem make_toy_mlp(std::size_t in_dim, std::size_t hidden, std::size_t n_data,
                     std::uint64_t seed, std::size_t batch = 0, double target_scale = 1.0);

/// ||x||_1 / (sqrt(d) ||x||_2), always in [1/sqrt(d), 1]. Rejects x = 0.
double norm_ratio(std::span<const double> x);

}  // namespace rmslab
