#include "drsr/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace drsr {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Eigen::Map<Mat> as_matrix(std::vector<double>& flat, int n) {
    return Eigen::Map<Mat>(flat.data(), n, n);
}

} // namespace

CmaEs::CmaEs(std::vector<double> mean, double sigma, int lambda)
    : n_(static_cast<int>(mean.size())), lambda_(lambda), mean_(std::move(mean)), sigma_(sigma) {
    if (n_ < 1) throw std::invalid_argument("CMA-ES requires dimension >= 1");
    if (lambda_ < 2) throw std::invalid_argument("CMA-ES requires lambda >= 2");
    if (!(sigma_ > 0.0)) throw std::invalid_argument("CMA-ES requires sigma > 0");

    mu_ = lambda_ / 2;
    rec_weights_.resize(static_cast<std::size_t>(mu_));
    double sum = 0.0;
    for (int i = 0; i < mu_; ++i) {
        rec_weights_[static_cast<std::size_t>(i)] =
            std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
        sum += rec_weights_[static_cast<std::size_t>(i)];
    }
    double sum_sq = 0.0;
    for (auto& w : rec_weights_) {
        w /= sum;
        sum_sq += w * w;
    }
    mu_eff_ = 1.0 / sum_sq;

    const double n = n_;
    c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
    d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
    c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
    c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
    c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                     ((n + 2.0) * (n + 2.0) + mu_eff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    cov_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
    auto C = as_matrix(cov_, n_);
    C.setIdentity();
    path_sigma_.assign(static_cast<std::size_t>(n_), 0.0);
    path_c_.assign(static_cast<std::size_t>(n_), 0.0);
    eig_vecs_.assign(cov_.size(), 0.0);
    eig_sqrt_.assign(static_cast<std::size_t>(n_), 0.0);
    update_eigen();
}

void CmaEs::update_eigen() {
    auto C = as_matrix(cov_, n_);
    Mat sym = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
    Vec vals = solver.eigenvalues();
    const double max_val = std::max(vals.maxCoeff(), 1e-300);
    // repair: keep C positive definite and reasonably conditioned
    const double floor = max_val * 1e-14;
    for (int i = 0; i < n_; ++i) vals(i) = std::max(vals(i), floor);
    Mat B = solver.eigenvectors();
    C = B * vals.asDiagonal() * B.transpose();
    Eigen::Map<Mat>(eig_vecs_.data(), n_, n_) = B;
    for (int i = 0; i < n_; ++i) eig_sqrt_[static_cast<std::size_t>(i)] = std::sqrt(vals(i));
}

std::vector<std::vector<double>> CmaEs::ask(Rng& rng) const {
    const Eigen::Map<const Mat> B(eig_vecs_.data(), n_, n_);
    const Eigen::Map<const Vec> m(mean_.data(), n_);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(lambda_));
    Vec z(n_);
    for (auto& cand : out) {
        for (int i = 0; i < n_; ++i) z(i) = rng.normal() * eig_sqrt_[static_cast<std::size_t>(i)];
        Vec x = m + sigma_ * (B * z);
        cand.assign(x.data(), x.data() + n_);
    }
    return out;
}

void CmaEs::tell(const std::vector<std::vector<double>>& candidates,
                 const std::vector<double>& losses) {
    if (candidates.size() != static_cast<std::size_t>(lambda_) || losses.size() != candidates.size())
        throw std::invalid_argument("tell: expected lambda candidates with losses");
    for (const auto& c : candidates)
        if (c.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("tell: candidate dimension mismatch");

    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return losses[static_cast<std::size_t>(a)] <
                                                losses[static_cast<std::size_t>(b)]; });

    const Eigen::Map<const Vec> m_old(mean_.data(), n_);
    Vec m_new = Vec::Zero(n_);
    for (int i = 0; i < mu_; ++i) {
        const Eigen::Map<const Vec> x(candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].data(), n_);
        m_new += rec_weights_[static_cast<std::size_t>(i)] * x;
    }
    const Vec y_w = (m_new - m_old) / sigma_;

    const Eigen::Map<const Mat> B(eig_vecs_.data(), n_, n_);
    Vec inv_d(n_);
    for (int i = 0; i < n_; ++i) inv_d(i) = 1.0 / eig_sqrt_[static_cast<std::size_t>(i)];
    const Vec c_inv_sqrt_y = B * (inv_d.asDiagonal() * (B.transpose() * y_w));

    Eigen::Map<Vec> p_sigma(path_sigma_.data(), n_);
    p_sigma = (1.0 - c_sigma_) * p_sigma +
              std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * c_inv_sqrt_y;

    ++generation_;
    const double ps_norm = p_sigma.norm();
    const double expected = std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * generation_));
    const bool h_sigma = ps_norm / expected < (1.4 + 2.0 / (n_ + 1.0)) * chi_n_;

    Eigen::Map<Vec> p_c(path_c_.data(), n_);
    p_c = (1.0 - c_c_) * p_c +
          (h_sigma ? std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) : 0.0) * y_w;

    auto C = as_matrix(cov_, n_);
    Mat rank_mu = Mat::Zero(n_, n_);
    for (int i = 0; i < mu_; ++i) {
        const Eigen::Map<const Vec> x(candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].data(), n_);
        const Vec y = (x - m_old) / sigma_;
        rank_mu += rec_weights_[static_cast<std::size_t>(i)] * (y * y.transpose());
    }
    const double delta_h = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
    C = (1.0 - c_1_ - c_mu_) * C + c_1_ * (p_c * p_c.transpose() + delta_h * C) + c_mu_ * rank_mu;

    Eigen::Map<Vec>(mean_.data(), n_) = m_new;
    const double exponent = std::clamp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0), -1.0, 1.0);
    sigma_ = std::clamp(sigma_ * std::exp(exponent), 1e-32, 1e32);
    update_eigen();
}

ExpressionTree optimize_coefficients(const ExpressionTree& tree, const ScoredEvaluation& input_eval,
                                     const Dataset& ds, LossKind kind, const EsConfig& config,
                                     Archive* archive, const ClusterAssignment& assignment,
                                     EvalBudget* budget, Rng& rng, ScoredEvaluation* best_eval_out) {
    ExpressionTree best = tree;
    ScoredEvaluation best_eval = input_eval;

    CmaEs es(tree.weights_vector(), config.sigma0, config.lambda);
    const auto batch = static_cast<std::uint64_t>(config.lambda);
    const int trans_cap = archive ? archive->trans_cap() : 4;

    for (int gen = 0; gen < config.generations; ++gen) {
        if (budget && !budget->can(batch)) break;
        const auto candidates = es.ask(rng);
        std::vector<double> losses(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const ExpressionTree cand = tree.with_weights(candidates[i]);
            const auto ev = evaluate_and_describe(cand, ds, kind, assignment, trans_cap);
            if (archive) archive->update(cand, ev.fitness, ev.loss, ev.desc);
            if (budget) budget->consume();
            losses[i] = ev.loss;
            if (ev.loss < best_eval.loss) {
                best_eval = ev;
                best = cand;
            }
        }
        es.tell(candidates, losses);
    }
    if (best_eval_out) *best_eval_out = best_eval;
    return best;
}

} // namespace drsr
