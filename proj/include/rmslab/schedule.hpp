#pragma once

#include <cstdint>
#include <vector>

namespace rmslab {

/// Full hyper-parameter set of one run: the tunable knobs (gamma, lambda,
/// theta, T, d, per-coordinate noise levels) together with the derived
/// step size eta = gamma/sqrt(d*T), averaging factor beta = 1 - 1/T, and
/// accumulator floor v0_i = lambda * max(sigma_i^2, 1/(d*T)).
///
/// Plain aggregate: derive_schedule() is the validated constructor; tests may
/// brace-initialize arbitrary (eta, beta, theta) combinations directly.
struct Schedule {
    double gamma = 1.0;
    double lambda = 1.0;
    double theta = 0.0;
    std::int64_t T = 0;
    std::size_t dim = 0;
    std::vector<double> sigma;

    double eta = 0.0;
    double beta = 0.0;
    std::vector<double> v0;

    /// Aggregate noise level sqrt(sum_i sigma_i^2), summed in coordinate order.
    double sigma_s() const;
    double min_sigma_sq() const;
};

/// Builds the schedule, enforcing the admissibility window: gamma > 0,
/// lambda in (0,1], theta in [0,1), all sigma_i >= 0 finite, and
/// T >= e^2/lambda. Throws std::invalid_argument outside it.
Schedule derive_schedule(double gamma, double lambda, double theta, std::int64_t T,
                         std::size_t dim, std::vector<double> sigma);

/// Mapping to the torch.optim.RMSprop convention: momentum = theta,
/// lr = (1 - theta) * eta.
struct TorchParams {
    double momentum = 0.0;
    double lr = 0.0;
};

TorchParams pytorch_param_map(double theta, double eta);

}  // namespace rmslab
