#pragma once

#include <cstdint>
#include <vector>

#include "drsr/archive.hpp"
#include "drsr/budget.hpp"
#include "drsr/expression.hpp"
#include "drsr/objectives.hpp"
#include "drsr/rng.hpp"

namespace drsr {

struct EsConfig {
    int lambda = 10;
    int generations = 20;
    double sigma0 = 1.0;
};

// Covariance matrix adaptation evolution strategy, rank-based update with
// weighted recombination of the top floor(lambda/2) samples, cumulative
// step-size adaptation, and rank-one plus rank-mu covariance updates with
// the standard dimension-dependent strategy parameters.
class CmaEs {
public:
    CmaEs(std::vector<double> mean, double sigma, int lambda);

    // lambda samples m + sigma * N(0, C)
    std::vector<std::vector<double>> ask(Rng& rng) const;

    // losses are minimized; candidates must come from the matching ask call
    void tell(const std::vector<std::vector<double>>& candidates,
              const std::vector<double>& losses);

    int dimension() const { return n_; }
    int lambda() const { return lambda_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& mean() const { return mean_; }

private:
    void update_eigen();

    int n_;
    int lambda_;
    int mu_;
    double mu_eff_;
    double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;
    std::vector<double> rec_weights_;

    std::vector<double> mean_;
    double sigma_;
    std::vector<double> cov_;        // n x n, row-major
    std::vector<double> eig_vecs_;   // B, column k = eigenvector k
    std::vector<double> eig_sqrt_;   // sqrt of eigenvalues
    std::vector<double> path_sigma_;
    std::vector<double> path_c_;
    int generation_ = 0;
};

// Runs the configured ask/tell loop on the tree's weight vector against the
// chosen loss, offering every sampled candidate to the archive (when given),
// and returns the lowest-loss tree seen including the unmodified input.
// `input_eval` is the already-computed evaluation of `tree` (it is not
// re-evaluated here). Each candidate evaluation consumes one budget unit; an
// ES generation is only started when the whole sample batch still fits.
ExpressionTree optimize_coefficients(const ExpressionTree& tree, const ScoredEvaluation& input_eval,
                                     const Dataset& ds, LossKind kind, const EsConfig& config,
                                     Archive* archive, const ClusterAssignment& assignment,
                                     EvalBudget* budget, Rng& rng,
                                     ScoredEvaluation* best_eval_out = nullptr);

} // namespace drsr
