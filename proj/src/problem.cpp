#include "rmslab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rmslab {

namespace detail {

class ProblemImpl {
public:
    virtual ~ProblemImpl() = default;
    virtual Problem::Kind kind() const = 0;
    virtual std::size_t dim() const = 0;
    virtual double smoothness() const = 0;
    virtual bool smoothness_certified() const = 0;
    virtual double f_star() const = 0;
    virtual const std::vector<double>& sigma() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    virtual std::vector<double> gradient(std::span<const double> x) const = 0;
    virtual GradSample sample(std::span<const double> x, SplitMix64& rng) const = 0;
    virtual std::vector<double> initial_point() const = 0;

    double sigma_s = 0.0;
    double min_sigma_sq = 0.0;

protected:
    void freeze_sigma_aggregates(const std::vector<double>& s) {
        double acc = 0.0;
        double mn = std::numeric_limits<double>::infinity();
        for (double si : s) {
            acc += si * si;
            mn = std::min(mn, si * si);
        }
        sigma_s = std::sqrt(acc);
        min_sigma_sq = s.empty() ? 0.0 : mn;
    }
};

namespace {

void check_point(std::span<const double> x, std::size_t d, const char* who) {
    if (x.size() != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    for (double xi : x) {
        if (!std::isfinite(xi))
            throw std::invalid_argument(std::string(who) + ": non-finite point");
    }
}

std::vector<double> resolve_sigma(std::vector<double> sigma, std::size_t d, const char* who) {
    if (sigma.empty()) sigma.assign(d, 0.0);
    if (sigma.size() != d)
        throw std::invalid_argument(std::string(who) + ": sigma must have length d");
    for (double si : sigma) {
        if (!std::isfinite(si) || si < 0.0)
            throw std::invalid_argument(std::string(who) + ": sigma_i must be finite and >= 0");
    }
    return sigma;
}

// Gaussian additive-noise oracle shared by the closed-form objectives.
class AnalyticImpl : public ProblemImpl {
public:
    GradSample sample(std::span<const double> x, SplitMix64& rng) const override {
        GradSample s;
        s.exact = gradient(x);
        s.g.resize(s.exact.size());
        fill_gaussian(rng, s.g);
        const auto& sig = sigma();
        for (std::size_t i = 0; i < s.g.size(); ++i) s.g[i] = s.exact[i] + sig[i] * s.g[i];
        return s;
    }

    std::vector<double> initial_point() const override {
        return std::vector<double>(dim(), 1.0);
    }
};

class QuadraticImpl final : public AnalyticImpl {
public:
    QuadraticImpl(std::vector<double> eig, std::vector<double> sigma)
        : eig_(std::move(eig)), sigma_(std::move(sigma)) {
        smoothness_ = *std::max_element(eig_.begin(), eig_.end());
        freeze_sigma_aggregates(sigma_);
    }

    Problem::Kind kind() const override { return Problem::Kind::quadratic; }
    std::size_t dim() const override { return eig_.size(); }
    double smoothness() const override { return smoothness_; }
    bool smoothness_certified() const override { return true; }
    double f_star() const override { return 0.0; }
    const std::vector<double>& sigma() const override { return sigma_; }

    double value(std::span<const double> x) const override {
        check_point(x, eig_.size(), "quadratic::value");
        double f = 0.0;
        for (std::size_t i = 0; i < eig_.size(); ++i) f += eig_[i] * x[i] * x[i];
        return 0.5 * f;
    }

    std::vector<double> gradient(std::span<const double> x) const override {
        check_point(x, eig_.size(), "quadratic::gradient");
        std::vector<double> g(eig_.size());
        for (std::size_t i = 0; i < eig_.size(); ++i) g[i] = eig_[i] * x[i];
        return g;
    }

private:
    std::vector<double> eig_;
    std::vector<double> sigma_;
    double smoothness_;
};

class SmoothedNonconvexImpl final : public AnalyticImpl {
public:
    SmoothedNonconvexImpl(std::size_t d, double scale, std::vector<double> sigma)
        : d_(d), scale_(scale), sigma_(std::move(sigma)) {
        freeze_sigma_aggregates(sigma_);
    }

    Problem::Kind kind() const override { return Problem::Kind::smoothed_nonconvex; }
    std::size_t dim() const override { return d_; }
    // |d^2/dx^2 [x^2/(1+x^2)]| <= 2, so 2*scale is a global bound.
    double smoothness() const override { return 2.0 * scale_; }
    bool smoothness_certified() const override { return true; }
    double f_star() const override { return 0.0; }
    const std::vector<double>& sigma() const override { return sigma_; }

    double value(std::span<const double> x) const override {
        check_point(x, d_, "smoothed_nonconvex::value");
        double f = 0.0;
        for (double xi : x) f += xi * xi / (1.0 + xi * xi);
        return scale_ * f;
    }

    std::vector<double> gradient(std::span<const double> x) const override {
        check_point(x, d_, "smoothed_nonconvex::gradient");
        std::vector<double> g(d_);
        for (std::size_t i = 0; i < d_; ++i) {
            const double q = 1.0 + x[i] * x[i];
            g[i] = scale_ * 2.0 * x[i] / (q * q);
        }
        return g;
    }

private:
    std::size_t d_;
    double scale_;
    std::vector<double> sigma_;
};

// One-hidden-layer tanh regression net. Parameters are packed as
// [W1 row-major (hidden x in), b1, w2, b2].
class ToyMlpImpl final : public ProblemImpl {
public:
    ToyMlpImpl(std::size_t in_dim, std::size_t hidden, std::size_t n_data, std::uint64_t seed,
               std::size_t batch, double target_scale)
        : in_(in_dim), hidden_(hidden), n_(n_data), seed_(seed),
          batch_(batch == 0 ? std::max<std::size_t>(1, n_data / 8) : batch) {
        if (batch_ > n_) batch_ = n_;
        dim_ = hidden_ * (in_ + 2) + 1;
        if (dim_ > 10000)
            throw std::invalid_argument("make_toy_mlp: parameter count exceeds 10^4");

        auto data_rng = make_stream(seed_, Stream::problem_data);
        X_.resize(n_ * in_);
        fill_gaussian(data_rng, X_);
        y_.resize(n_);
        fill_gaussian(data_rng, y_);
        for (double& yi : y_) yi *= target_scale;

        estimate_sigma();
        estimate_smoothness();
    }

    Problem::Kind kind() const override { return Problem::Kind::toy_mlp; }
    std::size_t dim() const override { return dim_; }
    double smoothness() const override { return smoothness_; }
    bool smoothness_certified() const override { return false; }
    double f_star() const override { return 0.0; }  // loss lower bound, not the infimum
    const std::vector<double>& sigma() const override { return sigma_; }

    double value(std::span<const double> x) const override {
        check_point(x, dim_, "toy_mlp::value");
        double loss = 0.0;
        std::vector<double> h(hidden_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double err = predict(x, j, h) - y_[j];
            loss += err * err;
        }
        return 0.5 * loss / static_cast<double>(n_);
    }

    std::vector<double> gradient(std::span<const double> x) const override {
        check_point(x, dim_, "toy_mlp::gradient");
        return batch_gradient(x, all_indices());
    }

    GradSample sample(std::span<const double> x, SplitMix64& rng) const override {
        GradSample s;
        s.exact = gradient(x);
        if (batch_ == n_) {
            s.g = s.exact;
            return s;
        }
        s.g = batch_gradient(x, draw_indices(rng));
        return s;
    }

    std::vector<double> initial_point() const override {
        // W1 ~ N(0,1)/sqrt(in), w2 ~ N(0,1)/sqrt(hidden), biases 0.
        auto rng = make_stream(seed_, Stream::init_point);
        std::vector<double> x(dim_, 0.0);
        std::span<double> w1(x.data(), hidden_ * in_);
        fill_gaussian(rng, w1);
        const double s1 = 1.0 / std::sqrt(static_cast<double>(in_));
        for (double& w : w1) w *= s1;
        std::span<double> w2(x.data() + hidden_ * (in_ + 1), hidden_);
        fill_gaussian(rng, w2);
        const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
        for (double& w : w2) w *= s2;
        return x;
    }

private:
    // Packing offsets.
    std::size_t off_b1() const { return hidden_ * in_; }
    std::size_t off_w2() const { return hidden_ * (in_ + 1); }
    std::size_t off_b2() const { return hidden_ * (in_ + 2); }

    double predict(std::span<const double> p, std::size_t j, std::vector<double>& h) const {
        const double* xj = X_.data() + j * in_;
        double out = p[off_b2()];
        for (std::size_t u = 0; u < hidden_; ++u) {
            double a = p[off_b1() + u];
            const double* w1u = p.data() + u * in_;
            for (std::size_t i = 0; i < in_; ++i) a += w1u[i] * xj[i];
            h[u] = std::tanh(a);
            out += p[off_w2() + u] * h[u];
        }
        return out;
    }

    std::vector<std::size_t> all_indices() const {
        std::vector<std::size_t> idx(n_);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return idx;
    }

    // `batch_` distinct indices via partial Fisher-Yates, then sorted so the
    // accumulation order (and thus the full-batch case) is canonical.
    std::vector<std::size_t> draw_indices(SplitMix64& rng) const {
        std::vector<std::size_t> pool(n_);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < batch_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next() % (n_ - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(batch_);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    std::vector<double> batch_gradient(std::span<const double> p,
                                       const std::vector<std::size_t>& idx) const {
        std::vector<double> g(dim_, 0.0);
        std::vector<double> h(hidden_);
        for (std::size_t j : idx) {
            const double err = predict(p, j, h) - y_[j];
            const double* xj = X_.data() + j * in_;
            g[off_b2()] += err;
            for (std::size_t u = 0; u < hidden_; ++u) {
                g[off_w2() + u] += err * h[u];
                const double back = err * p[off_w2() + u] * (1.0 - h[u] * h[u]);
                g[off_b1() + u] += back;
                double* gw1u = g.data() + u * in_;
                for (std::size_t i = 0; i < in_; ++i) gw1u[i] += back * xj[i];
            }
        }
        const double inv = 1.0 / static_cast<double>(idx.size());
        for (double& gi : g) gi *= inv;
        return g;
    }

    void estimate_sigma() {
        sigma_.assign(dim_, 0.0);
        if (batch_ == n_) {
            freeze_sigma_aggregates(sigma_);
            return;
        }
        constexpr std::size_t kDraws = 256;
        auto rng = make_stream(seed_, Stream::sigma_estimate);
        const std::vector<double> x0 = initial_point();
        std::vector<double> mean(dim_, 0.0);
        std::vector<double> m2(dim_, 0.0);
        for (std::size_t t = 0; t < kDraws; ++t) {
            const std::vector<double> g = batch_gradient(x0, draw_indices(rng));
            // Welford update.
            for (std::size_t i = 0; i < dim_; ++i) {
                const double delta = g[i] - mean[i];
                mean[i] += delta / static_cast<double>(t + 1);
                m2[i] += delta * (g[i] - mean[i]);
            }
        }
        for (std::size_t i = 0; i < dim_; ++i) {
            sigma_[i] = std::sqrt(m2[i] / static_cast<double>(kDraws - 1));
        }
        freeze_sigma_aggregates(sigma_);
    }

    void estimate_smoothness() {
        constexpr std::size_t kPairs = 64;
        auto rng = make_stream(seed_, Stream::smoothness_estimate);
        const std::vector<double> x0 = initial_point();
        std::vector<double> xa(dim_), xb(dim_);
        double worst = 0.0;
        for (std::size_t t = 0; t < kPairs; ++t) {
            fill_gaussian(rng, xa);
            fill_gaussian(rng, xb);
            double dist2 = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                xa[i] = x0[i] + 0.5 * xa[i];
                xb[i] = x0[i] + 0.5 * xb[i];
                const double diff = xa[i] - xb[i];
                dist2 += diff * diff;
            }
            const std::vector<double> ga = gradient(xa);
            const std::vector<double> gb = gradient(xb);
            double gd2 = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double diff = ga[i] - gb[i];
                gd2 += diff * diff;
            }
            worst = std::max(worst, std::sqrt(gd2 / dist2));
        }
        smoothness_ = 2.0 * worst;  // sampled estimate with a 2x cushion, not certified
    }

    std::size_t in_, hidden_, n_;
    std::uint64_t seed_;
    std::size_t batch_;
    std::size_t dim_ = 0;
    std::vector<double> X_;
    std::vector<double> y_;
    std::vector<double> sigma_;
    double smoothness_ = 0.0;
};

}  // namespace

}  // namespace detail

Problem::Problem(std::shared_ptr<const detail::ProblemImpl> impl) : impl_(std::move(impl)) {}

Problem::Kind Problem::kind() const { return impl_->kind(); }

std::string Problem::kind_name() const {
    switch (impl_->kind()) {
        case Kind::quadratic: return "quadratic";
        case Kind::smoothed_nonconvex: return "smoothed-nonconvex";
        case Kind::toy_mlp: return "toy-mlp";
    }
    return "?";
}

std::size_t Problem::dim() const { return impl_->dim(); }
double Problem::smoothness() const { return impl_->smoothness(); }
bool Problem::smoothness_certified() const { return impl_->smoothness_certified(); }
double Problem::f_star() const { return impl_->f_star(); }
const std::vector<double>& Problem::sigma() const { return impl_->sigma(); }
double Problem::sigma_s() const { return impl_->sigma_s; }
double Problem::min_sigma_sq() const { return impl_->min_sigma_sq; }
double Problem::value(std::span<const double> x) const { return impl_->value(x); }

std::vector<double> Problem::gradient(std::span<const double> x) const {
    return impl_->gradient(x);
}

GradSample Problem::sample_gradient(std::span<const double> x, SplitMix64& rng) const {
    return impl_->sample(x, rng);
}

std::vector<double> Problem::initial_point() const { return impl_->initial_point(); }

Problem make_quadratic(std::size_t dim, std::vector<double> eigenvalues,
                       std::vector<double> sigma) {
    if (dim == 0) throw std::invalid_argument("make_quadratic: dim must be positive");
    if (eigenvalues.size() != dim)
        throw std::invalid_argument("make_quadratic: eigenvalues must have length d");
    bool any_positive = false;
    for (double e : eigenvalues) {
        if (!std::isfinite(e) || e < 0.0)
            throw std::invalid_argument("make_quadratic: eigenvalues must be finite and >= 0");
        any_positive = any_positive || e > 0.0;
    }
    if (!any_positive)
        throw std::invalid_argument("make_quadratic: all-zero eigenvalues make f constant");
    return Problem(std::make_shared<detail::QuadraticImpl>(
        std::move(eigenvalues), detail::resolve_sigma(std::move(sigma), dim, "make_quadratic")));
}

Problem make_smoothed_nonconvex(std::size_t dim, double scale, std::vector<double> sigma) {
    if (dim == 0) throw std::invalid_argument("make_smoothed_nonconvex: dim must be positive");
    if (!std::isfinite(scale) || scale <= 0.0)
        throw std::invalid_argument("make_smoothed_nonconvex: scale must be finite and > 0");
    return Problem(std::make_shared<detail::SmoothedNonconvexImpl>(
        dim, scale, detail::resolve_sigma(std::move(sigma), dim, "make_smoothed_nonconvex")));
}

Problem make_toy_mlp(std::size_t in_dim, std::size_t hidden, std::size_t n_data,
                     std::uint64_t seed, std::size_t batch, double target_scale) {
    if (in_dim == 0 || hidden == 0 || n_data == 0)
        throw std::invalid_argument("make_toy_mlp: dimensions must be positive");
    if (!std::isfinite(target_scale) || target_scale < 0.0)
        throw std::invalid_argument("make_toy_mlp: target_scale must be finite and >= 0");
    return Problem(std::make_shared<detail::ToyMlpImpl>(in_dim, hidden, n_data, seed, batch,
                                                        target_scale));
}

double norm_ratio(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("norm_ratio: empty vector");
    double l1 = 0.0;
    double l2 = 0.0;
    for (double xi : x) {
        l1 += std::abs(xi);
        l2 += xi * xi;
    }
    if (l2 == 0.0) throw std::invalid_argument("norm_ratio: zero vector");
    return l1 / (std::sqrt(static_cast<double>(x.size())) * std::sqrt(l2));
}

}  // namespace rmslab
