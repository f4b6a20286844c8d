#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "psychoak/dataset.hpp"

namespace psychoak {

// Portable deterministic RNG: the engine sequence is pinned by the standard,
// the uniform mapping avoids distribution-implementation differences.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    double gaussian(double mean = 0.0, double stddev = 1.0);
    std::uint64_t next() { return engine_(); }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[engine_() % i]);
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------- linear ---

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool rank_deficient = false;
};

// Least squares via one-sided Jacobi SVD; rank-deficient systems get the
// minimum-norm solution and set the flag.
LinearModel fit_linear(const std::vector<std::vector<double>>& x,
                       std::span<const double> y);
double predict(const LinearModel& m, std::span<const double> x);

// ------------------------------------------------------------------- svr ---

enum class SvrKernel { Linear, Rbf };

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    SvrKernel kernel = SvrKernel::Linear;
    double gamma = 1.0;
    double tol = 1e-3;
    long max_iter = 2000000;
};

struct SvrModel {
    SvrParams params;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coef;  // beta_i = alpha_i - alpha*_i, |beta| <= C
    double bias = 0.0;
    long iterations = 0;
    double kkt_violation = 0.0;
};

// Epsilon-insensitive SVR solved by sequential minimal optimization on the
// maximal violating pair.
SvrModel fit_svr(const std::vector<std::vector<double>>& x, std::span<const double> y,
                 const SvrParams& params);
double predict(const SvrModel& m, std::span<const double> x);

// ------------------------------------------------------------------- mlp ---

struct MlpModel {
    std::vector<int> sizes;       // e.g. {5, 256, 16, 1}
    std::vector<double> params;   // per layer: weights (out*in) then biases (out)

    std::size_t param_count() const;
    std::size_t layer_offset(std::size_t layer) const;
};

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    int epochs = 500;
    int batch_size = 16;
    std::uint64_t seed = 0;
    double val_fraction = 0.2;     // 0 disables early stopping
    int early_stop_patience = 50;  // epochs without val improvement
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;  // empty when val_fraction == 0
};

// Fan-in scaled uniform initialization, seeded.
MlpModel make_mlp(std::vector<int> sizes, std::uint64_t seed);

double mlp_forward(const MlpModel& m, std::span<const double> x);

// Gradient of 0.5*(f(x) - y)^2 with respect to every parameter.
std::vector<double> mlp_backward(const MlpModel& m, std::span<const double> x, double y);

class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n_params, double lr, double beta1, double beta2, double eps);
    void step(std::span<double> params, std::span<const double> grads);

private:
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

MlpModel train_mlp(const std::vector<std::vector<double>>& x, std::span<const double> y,
                   const TrainConfig& cfg, TrainHistory* history = nullptr);

// ------------------------------------------------------ model families -----

using HyperParams = std::map<std::string, double>;

// A fitted pipeline: min-max scaler (fit on the training rows only) plus one
// of the three regressors.
class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict_row(const FeatureRow& row) const = 0;
    virtual std::string family() const = 0;
    virtual void save_json(const std::filesystem::path& path, std::uint64_t seed,
                           const std::string& provenance) const = 0;
};

std::unique_ptr<Regressor> fit_pipeline(const std::string& family, const HyperParams& hp,
                                        std::span<const FeatureRow> rows,
                                        std::uint64_t seed,
                                        TrainHistory* history = nullptr);

std::unique_ptr<Regressor> load_pipeline(const std::filesystem::path& path);

std::vector<HyperParams> default_grid(const std::string& family);

// ---------------------------------------------------------- evaluation -----

struct NcvReport {
    HyperParams best;
    double outer_rmse_mean = 0.0;
    double outer_rmse_std = 0.0;
    std::vector<double> outer_rmse;  // one per outer fold
};

// Outer k-fold generalization estimate with an inner k-fold grid search per
// outer fold; `best` is the configuration winning the final grid search on
// all rows.
NcvReport nested_cv(std::span<const FeatureRow> rows, const std::string& family,
                    const std::vector<HyperParams>& grid, int outer_folds = 5,
                    int inner_folds = 3, std::uint64_t seed = 0);

struct DroneEval {
    std::string drone;
    double predicted_pa = 0.0;
    double actual_pa = 0.0;
    std::size_t n_rows = 0;
    std::vector<std::size_t> training_rows;  // indices used to train the sub-model
};

struct EvalReport {
    double rmse = 0.0;
    std::vector<DroneEval> per_drone;
};

// Seeded 80/20 split; RMSE of drone-aggregated PA on the held-out rows.
EvalReport rmse_full(const Dataset& ds, const std::string& family, const HyperParams& hp,
                     std::uint64_t seed = 0);

// Leave-one-drone-out: one fresh sub-model per drone, trained without that
// drone's rows; RMSE over per-drone aggregated (predicted, actual) pairs.
EvalReport rmse_validation(const Dataset& ds, const std::string& family,
                           const HyperParams& hp, std::uint64_t seed = 0);

}  // namespace psychoak
