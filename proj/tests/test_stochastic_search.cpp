#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vinedesign/stochastic_search.hpp"

using namespace vine;

namespace {

BoxBounds box(Eigen::Index dim, double half) {
    return BoxBounds{Eigen::VectorXd::Constant(dim, -half), Eigen::VectorXd::Constant(dim, half)};
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// Multimodal enough to exercise the weighting, cheap enough for many runs.
double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

}  // namespace

TEST(UpdateProposal, FrozenPerturbationStep) {
    SearchParams p;
    p.shape_exponent = 10.0;
    p.learning_rate = 0.8;
    Eigen::MatrixXd delta(1, 2);
    delta << 1.0, -1.0;
    const std::vector<double> costs{1.0, -1.0};  // objective(x) = x
    const ProposalUpdate u =
        update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 10.0), p);
    const double e10 = std::exp(10.0);
    EXPECT_NEAR(u.weights[0], 1.0, 1e-12);
    EXPECT_NEAR(u.weights[1], e10, 1e-6);
    const double expected = 0.8 * (e10 * (-1.0) + 1.0 * 1.0) / (e10 + 1.0);
    EXPECT_NEAR(u.mu[0], expected, 1e-12);
    EXPECT_NEAR(u.mu[0], -0.8 * 0.99991, 1e-5);
}

TEST(UpdateProposal, ConstantObjectiveGivesUniformWeights) {
    SearchParams p;
    Eigen::MatrixXd delta(2, 4);
    delta << 1.0, -3.0, 2.0, 4.0,  //
        0.5, 0.5, -1.5, 2.5;
    const std::vector<double> costs(4, 7.0);
    const ProposalUpdate u =
        update_proposal(Eigen::VectorXd::Zero(2), delta, costs, box(2, 100.0), p);
    for (double w : u.weights) EXPECT_DOUBLE_EQ(w, 1.0);
    EXPECT_NEAR(u.mu[0], p.learning_rate * 1.0, 1e-12);
    EXPECT_NEAR(u.mu[1], p.learning_rate * 0.5, 1e-12);
}

TEST(UpdateProposal, ZeroShapeExponentGivesPlainMean) {
    SearchParams p;
    p.shape_exponent = 0.0;
    Eigen::MatrixXd delta(1, 3);
    delta << 1.0, 2.0, 6.0;
    const std::vector<double> costs{3.0, 1.0, 2.0};
    const ProposalUpdate u =
        update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 100.0), p);
    EXPECT_NEAR(u.mu[0], p.learning_rate * 3.0, 1e-12);
}

TEST(UpdateProposal, SmallShapeExponentApproachesPlainMean) {
    Eigen::MatrixXd delta(1, 3);
    delta << 1.0, 2.0, 6.0;
    const std::vector<double> costs{3.0, 1.0, 2.0};
    double previous_gap = std::numeric_limits<double>::infinity();
    for (double s : {1.0, 0.1, 0.01, 0.001}) {
        SearchParams p;
        p.learning_rate = 1.0;
        p.shape_exponent = s;
        const double mu =
            update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 100.0), p).mu[0];
        const double gap = std::abs(mu - 3.0);
        EXPECT_LT(gap, previous_gap);
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 1e-3);
}

TEST(UpdateProposal, NonFiniteCostsAreDiscarded) {
    SearchParams p;
    Eigen::MatrixXd delta(1, 3);
    delta << 1.0, 2.0, 3.0;
    const std::vector<double> costs{1.0, std::numeric_limits<double>::quiet_NaN(), 1.0};
    const ProposalUpdate u =
        update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 100.0), p);
    EXPECT_EQ(u.discarded, 1u);
    EXPECT_EQ(u.weights[1], 0.0);
    EXPECT_NEAR(u.mu[0], p.learning_rate * 2.0, 1e-12);

    const std::vector<double> bad(3, std::numeric_limits<double>::infinity());
    EXPECT_THROW(update_proposal(Eigen::VectorXd::Zero(1), delta, bad, box(1, 100.0), p),
                 OptimizerError);
}

TEST(UpdateProposal, MeanIsClippedIntoBounds) {
    SearchParams p;
    p.learning_rate = 1.0;
    Eigen::MatrixXd delta(1, 2);
    delta << 5.0, 4.0;
    const std::vector<double> costs{0.0, 1.0};
    const ProposalUpdate u =
        update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 1.0), p);
    EXPECT_DOUBLE_EQ(u.mu[0], 1.0);
}

TEST(UpdateProposal, VerbatimSpreadGrowsWithWeightMass) {
    SearchParams verbatim;
    verbatim.normalize_variance = false;
    SearchParams normalized;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Constant(1, 50, 1.0);
    const std::vector<double> costs(50, 0.0);
    const auto v = update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 10.0), verbatim);
    const auto n =
        update_proposal(Eigen::VectorXd::Zero(1), delta, costs, box(1, 10.0), normalized);
    EXPECT_NEAR(v.sigma[0], std::sqrt(50.0 + verbatim.epsilon), 1e-12);
    EXPECT_NEAR(n.sigma[0], std::sqrt(1.0 + normalized.epsilon), 1e-12);
}

TEST(AssMinimize, ConvexQuadraticConverges) {
    SearchParams p;
    p.samples = 64;
    p.iterations = 300;
    Eigen::VectorXd mu0(2), sigma0(2);
    mu0 << 5.0, 5.0;
    sigma0 << 5.0, 5.0;
    const SearchTrace t = ass_minimize(sphere, mu0, sigma0, box(2, 10.0), p);
    EXPECT_LT(t.best_cost, 1e-2);
    EXPECT_NEAR(t.best_cost, sphere(std::span<const double>(t.best_x.data(), 2)), 0.0);
}

TEST(AssMinimize, VerbatimSpreadRunsAwayOnTheQuadratic) {
    SearchParams p;
    p.samples = 64;
    p.iterations = 20;
    p.normalize_variance = false;
    p.convergence_window = 1000;
    Eigen::VectorXd mu0(2), sigma0(2);
    mu0 << 5.0, 5.0;
    sigma0 << 5.0, 5.0;
    const SearchTrace t = ass_minimize(sphere, mu0, sigma0, box(2, 10.0), p);
    EXPECT_GT(t.final_sigma.minCoeff(), 100.0);
}

TEST(AssMinimize, InvariantsHoldEveryIteration) {
    SearchParams p;
    p.samples = 40;
    p.iterations = 150;
    p.seed = 3;
    const BoxBounds b = box(4, 5.12);
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Constant(4, 2.0);
    const Eigen::VectorXd sigma0 = Eigen::VectorXd::Constant(4, 2.5);
    int calls = 0;
    auto observer = [&](int, const Eigen::MatrixXd& xs, const Eigen::VectorXd& mu,
                        const Eigen::VectorXd& sigma) {
        ++calls;
        for (Eigen::Index k = 0; k < xs.cols(); ++k) EXPECT_TRUE(b.contains(xs.col(k)));
        EXPECT_TRUE(b.contains(mu));
        EXPECT_GE(sigma.minCoeff(), std::sqrt(p.epsilon));
    };
    const SearchTrace t = ass_minimize(rastrigin, mu0, sigma0, b, p, observer);
    EXPECT_EQ(calls, t.iterations);
    ASSERT_EQ(t.cost_history.size(), static_cast<std::size_t>(t.iterations));
    for (std::size_t i = 1; i < t.cost_history.size(); ++i)
        EXPECT_LE(t.cost_history[i], t.cost_history[i - 1]);
    EXPECT_EQ(t.cost_history.back(), t.best_cost);
    EXPECT_TRUE(b.contains(t.best_x));
    EXPECT_DOUBLE_EQ(t.best_cost, rastrigin(std::span<const double>(t.best_x.data(), 4)));
}

TEST(AssMinimize, DeterministicForSeedAndThreadCount) {
    SearchParams p;
    p.samples = 50;
    p.iterations = 80;
    p.seed = 42;
    const BoxBounds b = box(3, 5.12);
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Constant(3, 1.0);
    const Eigen::VectorXd sigma0 = Eigen::VectorXd::Constant(3, 2.0);
    const SearchTrace ref = ass_minimize(rastrigin, mu0, sigma0, b, p);
    for (int threads : {1, 2, 3, 8}) {
        SearchParams q = p;
        q.threads = threads;
        const SearchTrace t = ass_minimize(rastrigin, mu0, sigma0, b, q);
        EXPECT_EQ(t.iterations, ref.iterations) << threads;
        EXPECT_EQ(t.best_cost, ref.best_cost) << threads;
        EXPECT_EQ(t.best_x, ref.best_x) << threads;
        EXPECT_EQ(t.cost_history, ref.cost_history) << threads;
        EXPECT_EQ(t.final_mu, ref.final_mu) << threads;
        EXPECT_EQ(t.final_sigma, ref.final_sigma) << threads;
    }
    SearchParams other = p;
    other.seed = 43;
    EXPECT_NE(ass_minimize(rastrigin, mu0, sigma0, b, other).cost_history, ref.cost_history);
}

TEST(AssMinimize, StopsEarlyWhenImprovementStalls) {
    SearchParams p;
    p.samples = 20;
    p.iterations = 1000;
    p.convergence_window = 10;
    p.convergence_tol = 1e-4;
    auto flat = [](std::span<const double>) { return 1.0; };
    const SearchTrace t = ass_minimize(flat, Eigen::VectorXd::Zero(2),
                                       Eigen::VectorXd::Ones(2), box(2, 3.0), p);
    EXPECT_EQ(t.iterations, 11);
}

TEST(AssMinimize, BestSampleBeatsFinalMeanOnARuggedLandscape) {
    SearchParams p;
    p.samples = 30;
    p.iterations = 60;
    p.seed = 9;
    const BoxBounds b = box(2, 5.12);
    const SearchTrace t = ass_minimize(rastrigin, Eigen::VectorXd::Constant(2, 3.0),
                                       Eigen::VectorXd::Constant(2, 2.0), b, p);
    const double at_mu = rastrigin(std::span<const double>(t.final_mu.data(), 2));
    EXPECT_LE(t.best_cost, at_mu);
}

TEST(AssMinimize, ToleratesSomeNonFiniteValues) {
    SearchParams p;
    p.samples = 32;
    p.iterations = 100;
    auto f = [](std::span<const double> x) {
        return x[0] > 2.0 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
    };
    const SearchTrace t = ass_minimize(f, Eigen::VectorXd::Constant(2, 1.0),
                                       Eigen::VectorXd::Constant(2, 2.0), box(2, 5.0), p);
    EXPECT_GT(t.discarded_samples, 0u);
    EXPECT_LT(t.best_cost, 1e-2);
}

TEST(AssMinimize, AllNonFiniteIsAnOptimizerError) {
    SearchParams p;
    p.samples = 4;
    auto f = [](std::span<const double>) { return std::numeric_limits<double>::infinity(); };
    EXPECT_THROW(ass_minimize(f, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), box(1, 1.0), p),
                 OptimizerError);
}

TEST(AssMinimize, RejectsBadInputs) {
    SearchParams p;
    const BoxBounds b = box(2, 1.0);
    EXPECT_THROW(ass_minimize(sphere, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(2), b, p),
                 DimensionError);
    EXPECT_THROW(ass_minimize(sphere, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), b, p),
                 ValidationError);
    EXPECT_THROW(
        ass_minimize(sphere, Eigen::VectorXd::Constant(2, 3.0), Eigen::VectorXd::Ones(2), b, p),
        ValidationError);
    SearchParams one = p;
    one.samples = 1;
    EXPECT_THROW(ass_minimize(sphere, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2), b, one),
                 ValidationError);
    SearchParams alpha = p;
    alpha.learning_rate = 1.5;
    EXPECT_THROW(alpha.validate(), ValidationError);
    SearchParams eps = p;
    eps.epsilon = 0.0;
    EXPECT_THROW(eps.validate(), ValidationError);
}
