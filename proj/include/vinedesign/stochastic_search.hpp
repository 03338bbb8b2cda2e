#pragma once

// Adaptive stochastic search: a Gaussian proposal whose mean and spread are
// moved toward perturbations weighted by an exponential shape function of
// their min-max normalized (negated) cost.

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vinedesign/errors.hpp"

namespace vine {

struct SearchParams {
    int samples = 200;            // K
    int iterations = 1000;        // N
    double learning_rate = 0.8;   // alpha
    double shape_exponent = 10.0; // S(L) = exp(shape_exponent * L)
    double epsilon = 1e-3;        // variance floor
    std::uint64_t seed = 1;
    int convergence_window = 50;
    double convergence_tol = 1e-4;
    // Divide the variance update by the weight sum, like the mean update.
    // Without it the spread scales with the raw weight mass (up to K * e^10)
    // and the proposal diverges to the box corners within a few iterations.
    bool normalize_variance = true;
    // Worker threads for objective evaluation; results do not depend on it.
    int threads = 1;

    void validate() const {
        if (samples < 2) throw ValidationError("must be >= 2", "search.samples");
        if (iterations < 1) throw ValidationError("must be >= 1", "search.iterations");
        if (!(learning_rate > 0.0 && learning_rate <= 1.0))
            throw ValidationError("must be in (0, 1]", "search.alpha");
        if (!std::isfinite(shape_exponent) || shape_exponent < 0.0)
            throw ValidationError("must be finite and >= 0", "search.shapeExponent");
        if (!(epsilon > 0.0)) throw ValidationError("must be > 0", "search.epsilon");
        if (convergence_window < 1)
            throw ValidationError("must be >= 1", "search.convergenceWindow");
        if (!(convergence_tol >= 0.0))
            throw ValidationError("must be >= 0", "search.convergenceTol");
        if (threads < 1) throw ValidationError("must be >= 1", "search.threads");
    }
};

struct BoxBounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::Index dimension() const noexcept { return lower.size(); }

    void validate() const {
        if (lower.size() != upper.size())
            throw DimensionError("BoxBounds: lower and upper differ in size");
        if ((lower.array() > upper.array()).any())
            throw ValidationError("lower must not exceed upper", "bounds");
    }

    Eigen::VectorXd clip(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lower).cwiseMin(upper);
    }

    bool contains(const Eigen::VectorXd& x) const {
        return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    }
};

struct SearchTrace {
    Eigen::VectorXd best_x;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> cost_history;  // best cost so far, one entry per iteration
    int iterations = 0;
    Eigen::VectorXd final_mu;
    Eigen::VectorXd final_sigma;
    std::size_t discarded_samples = 0;  // non-finite objective values
};

using Objective = std::function<double(std::span<const double>)>;

/// Per-iteration hook for tests and diagnostics; receives the iteration index,
/// the clipped samples (one per column), the updated mean and spread.
using SearchObserver = std::function<void(int, const Eigen::MatrixXd&, const Eigen::VectorXd&,
                                          const Eigen::VectorXd&)>;

namespace detail {

// Evaluates every column of `xs`. Threads take contiguous index stripes, so
// the output is identical for any thread count.
inline void evaluate_columns(const Objective& f, const Eigen::MatrixXd& xs,
                             std::vector<double>& out, int threads) {
    const auto count = static_cast<std::size_t>(xs.cols());
    const auto dim = static_cast<std::size_t>(xs.rows());
    out.assign(count, 0.0);
    auto eval = [&](std::size_t k) {
        out[k] = f(std::span<const double>(xs.col(static_cast<Eigen::Index>(k)).data(), dim));
    };
    if (threads <= 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) eval(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) eval(k);
        });
}

}  // namespace detail

struct ProposalUpdate {
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;
    std::vector<double> weights;  // shape-function weight per sample, 0 if discarded
    std::size_t discarded = 0;
};

/// One mean/spread update from perturbations `delta` (one per column) and the
/// objective values of the corresponding clipped samples. Non-finite costs are
/// dropped. When every finite cost is equal the normalized values are all 0,
/// which gives uniform weights.
inline ProposalUpdate update_proposal(const Eigen::VectorXd& mu, const Eigen::MatrixXd& delta,
                                      std::span<const double> costs, const BoxBounds& bounds,
                                      const SearchParams& params) {
    const auto K = static_cast<std::size_t>(delta.cols());
    if (costs.size() != K || delta.rows() != mu.size())
        throw DimensionError("update_proposal: perturbations, costs and mean disagree in size");

    // Negate (maximization form), then min-max normalize over finite samples.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    ProposalUpdate out;
    for (double c : costs) {
        if (!std::isfinite(c)) {
            ++out.discarded;
            continue;
        }
        lo = std::min(lo, -c);
        hi = std::max(hi, -c);
    }
    if (out.discarded == K) throw OptimizerError("update_proposal: no finite sample");

    const double range = hi - lo;
    out.weights.assign(K, 0.0);
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (!std::isfinite(costs[k])) continue;
        const double normalized = range > 0.0 ? (-costs[k] - lo) / range : 0.0;
        out.weights[k] = std::exp(params.shape_exponent * normalized);
        weight_sum += out.weights[k];
    }

    Eigen::VectorXd step = Eigen::VectorXd::Zero(mu.size());
    Eigen::VectorXd spread = Eigen::VectorXd::Zero(mu.size());
    for (std::size_t k = 0; k < K; ++k) {
        const double w = out.weights[k];
        if (w == 0.0) continue;
        const auto col = delta.col(static_cast<Eigen::Index>(k));
        step += w * col;
        spread += w * col.cwiseAbs2();
    }
    if (params.normalize_variance) spread /= weight_sum;
    out.mu = bounds.clip(mu + params.learning_rate * step / weight_sum);
    out.sigma = (spread.array() + params.epsilon).sqrt().matrix();
    return out;
}

/// Minimizes `objective` inside `bounds`, starting from N(mu0, sigma0^2).
/// Returns the best clipped sample evaluated across all iterations.
inline SearchTrace ass_minimize(const Objective& objective, const Eigen::VectorXd& mu0,
                                const Eigen::VectorXd& sigma0, const BoxBounds& bounds,
                                const SearchParams& params, const SearchObserver& observer = {}) {
    params.validate();
    bounds.validate();
    const Eigen::Index dim = mu0.size();
    if (sigma0.size() != dim || bounds.dimension() != dim)
        throw DimensionError("ass_minimize: mu0, sigma0 and bounds must share one dimension");
    if (dim == 0) throw DimensionError("ass_minimize: empty search vector");
    if ((sigma0.array() <= 0.0).any()) throw ValidationError("must be > 0", "sigma0");
    if (!bounds.contains(mu0)) throw ValidationError("must lie within bounds", "mu0");

    const int K = params.samples;
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::VectorXd mu = mu0;
    Eigen::VectorXd sigma = sigma0;
    Eigen::MatrixXd delta(dim, K);
    Eigen::MatrixXd xs(dim, K);
    std::vector<double> costs;

    SearchTrace trace;
    trace.best_x = mu0;

    for (int it = 0; it < params.iterations; ++it) {
        for (int k = 0; k < K; ++k)
            for (Eigen::Index d = 0; d < dim; ++d) delta(d, k) = sigma(d) * normal(rng);
        for (int k = 0; k < K; ++k) xs.col(k) = bounds.clip(mu + delta.col(k));

        detail::evaluate_columns(objective, xs, costs, params.threads);

        for (int k = 0; k < K; ++k) {
            const double c = costs[static_cast<std::size_t>(k)];
            if (std::isfinite(c) && c < trace.best_cost) {
                trace.best_cost = c;
                trace.best_x = xs.col(k);
            }
        }
        try {
            ProposalUpdate next = update_proposal(mu, delta, costs, bounds, params);
            trace.discarded_samples += next.discarded;
            mu = std::move(next.mu);
            sigma = std::move(next.sigma);
        } catch (const OptimizerError&) {
            throw OptimizerError("ass_minimize: every sample in iteration " + std::to_string(it) +
                                 " was non-finite");
        }

        trace.cost_history.push_back(trace.best_cost);
        trace.iterations = it + 1;
        if (observer) observer(it, xs, mu, sigma);

        if (trace.best_cost == 0.0) break;
        const auto w = static_cast<std::size_t>(params.convergence_window);
        if (trace.cost_history.size() > w) {
            const double before = trace.cost_history[trace.cost_history.size() - 1 - w];
            const double now = trace.best_cost;
            if (before - now <= params.convergence_tol * std::abs(before)) break;
        }
    }
    trace.final_mu = mu;
    trace.final_sigma = sigma;
    return trace;
}

}  // namespace vine
