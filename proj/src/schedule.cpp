#include "rmslab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rmslab {

double Schedule::sigma_s() const {
    double s = 0.0;
    for (double si : sigma) s += si * si;
    return std::sqrt(s);
}

double Schedule::min_sigma_sq() const {
    double m = std::numeric_limits<double>::infinity();
    for (double si : sigma) m = std::min(m, si * si);
    return sigma.empty() ? 0.0 : m;
}

Schedule derive_schedule(double gamma, double lambda, double theta, std::int64_t T,
                         std::size_t dim, std::vector<double> sigma) {
    if (!std::isfinite(gamma) || gamma <= 0.0)
        throw std::invalid_argument("derive_schedule: gamma must be finite and > 0");
    if (!std::isfinite(lambda) || lambda <= 0.0 || lambda > 1.0)
        throw std::invalid_argument("derive_schedule: lambda must lie in (0, 1]");
    if (!std::isfinite(theta) || theta < 0.0 || theta >= 1.0)
        throw std::invalid_argument("derive_schedule: theta must lie in [0, 1)");
    if (dim == 0) throw std::invalid_argument("derive_schedule: dim must be positive");
    if (T <= 0) throw std::invalid_argument("derive_schedule: T must be positive");
    if (sigma.size() != dim)
        throw std::invalid_argument("derive_schedule: sigma must have length d");
    for (double si : sigma) {
        if (!std::isfinite(si) || si < 0.0)
            throw std::invalid_argument("derive_schedule: sigma_i must be finite and >= 0");
    }

    const double e2 = std::numbers::e * std::numbers::e;
    if (static_cast<double>(T) < e2 / lambda) {
        throw std::invalid_argument(
            "derive_schedule: schedule requires T >= e^2/lambda = " +
            std::to_string(e2 / lambda) + ", got T = " + std::to_string(T));
    }

    Schedule s;
    s.gamma = gamma;
    s.lambda = lambda;
    s.theta = theta;
    s.T = T;
    s.dim = dim;
    s.sigma = std::move(sigma);

    const double dT = static_cast<double>(dim) * static_cast<double>(T);
    s.eta = gamma / std::sqrt(dT);
    s.beta = 1.0 - 1.0 / static_cast<double>(T);
    s.v0.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        s.v0[i] = lambda * std::max(s.sigma[i] * s.sigma[i], 1.0 / dT);
    }
    return s;
}

TorchParams pytorch_param_map(double theta, double eta) {
    if (!std::isfinite(theta) || theta < 0.0 || theta >= 1.0)
        throw std::invalid_argument("pytorch_param_map: theta must lie in [0, 1)");
    if (!std::isfinite(eta) || eta <= 0.0)
        throw std::invalid_argument("pytorch_param_map: eta must be finite and > 0");
    return TorchParams{theta, (1.0 - theta) * eta};
}

}  // namespace rmslab
