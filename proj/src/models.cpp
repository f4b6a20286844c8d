#include "psychoak/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "psychoak/errors.hpp"

namespace psychoak {

using nlohmann::json;

double Rng::gaussian(double mean, double stddev) {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double rmse_of(std::span<const double> pred, std::span<const double> actual) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - actual[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

}  // namespace

// ---------------------------------------------------------------- linear ---

LinearModel fit_linear(const std::vector<std::vector<double>>& x,
                       std::span<const double> y) {
    const std::size_t n = x.size();
    if (n == 0 || n != y.size()) throw ShapeError("fit_linear: empty or mismatched data");
    const std::size_t d = x[0].size();
    for (const auto& row : x)
        if (row.size() != d) throw ShapeError("fit_linear: ragged rows");
    for (double v : y)
        if (!std::isfinite(v)) throw DomainError("fit_linear: non-finite target");

    const std::size_t m = d + 1;  // bias column
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) a[j][i] = x[i][j];
        a[d][i] = 1.0;
    }
    // V accumulates the right singular vectors
    std::vector<std::vector<double>> v(m, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) v[j][j] = 1.0;

    // one-sided Jacobi sweeps
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double app = dot(a[p], a[p]);
                const double aqq = dot(a[q], a[q]);
                const double apq = dot(a[p], a[q]);
                if (std::abs(apq) < 1e-15 * std::sqrt(app * aqq) + 1e-300) continue;
                off = std::max(off, std::abs(apq) / (std::sqrt(app * aqq) + 1e-300));
                const double theta = 0.5 * std::atan2(2.0 * apq, app - aqq);
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t i = 0; i < n; ++i) {
                    const double t0 = a[p][i], t1 = a[q][i];
                    a[p][i] = c * t0 + s * t1;
                    a[q][i] = -s * t0 + c * t1;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double t0 = v[p][i], t1 = v[q][i];
                    v[p][i] = c * t0 + s * t1;
                    v[q][i] = -s * t0 + c * t1;
                }
            }
        }
        if (off < 1e-14) break;
    }

    std::vector<double> sigma(m);
    double sigma_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        sigma[j] = std::sqrt(std::max(dot(a[j], a[j]), 0.0));
        sigma_max = std::max(sigma_max, sigma[j]);
    }
    const double tol = sigma_max * 1e-10;

    // w = V diag(1/sigma) U^T y, skipping null directions (minimum norm)
    LinearModel model;
    model.weights.assign(d, 0.0);
    std::vector<double> coef(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (sigma[j] <= tol) {
            model.rank_deficient = true;
            continue;
        }
        const double uty = dot(a[j], y) / sigma[j];
        const double scale = uty / sigma[j];
        for (std::size_t i = 0; i < m; ++i) coef[i] += v[j][i] * scale;
    }
    for (std::size_t j = 0; j < d; ++j) model.weights[j] = coef[j];
    model.bias = coef[d];
    return model;
}

double predict(const LinearModel& m, std::span<const double> x) {
    return dot(m.weights, x) + m.bias;
}

// ------------------------------------------------------------------- svr ---

namespace {

double kernel_eval(const SvrParams& p, std::span<const double> a,
                   std::span<const double> b) {
    if (p.kernel == SvrKernel::Linear) return dot(a, b);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-p.gamma * d2);
}

}  // namespace

SvrModel fit_svr(const std::vector<std::vector<double>>& x, std::span<const double> y,
                 const SvrParams& params) {
    const std::size_t n = x.size();
    if (n < 2 || n != y.size()) throw ShapeError("fit_svr: need at least 2 rows");
    if (!(params.c > 0.0) || params.epsilon < 0.0)
        throw ConfigError("fit_svr: need C > 0 and epsilon >= 0");

    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            k[i][j] = k[j][i] = kernel_eval(params, x[i], x[j]);

    std::vector<double> beta(n, 0.0), u(n, 0.0);  // u = K beta
    const double c = params.c, eps = params.epsilon;

    // At the optimum there is a bias b compatible with every point's
    // subgradient interval; SMO on the pair violating that interval the most.
    auto bounds = [&](std::size_t i) -> std::pair<double, double> {
        const double e = u[i] - y[i];
        const double lo = beta[i] < c ? (beta[i] >= 0.0 ? -e - eps : -e + eps)
                                      : -std::numeric_limits<double>::infinity();
        const double hi = beta[i] > -c ? (beta[i] <= 0.0 ? -e + eps : -e - eps)
                                       : std::numeric_limits<double>::infinity();
        return {lo, hi};
    };

    long iter = 0;
    double violation = 0.0;
    double b_low, b_up;
    for (;; ++iter) {
        b_low = -std::numeric_limits<double>::infinity();
        b_up = std::numeric_limits<double>::infinity();
        std::size_t i_lo = 0, i_hi = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [lo, hi] = bounds(i);
            if (lo > b_low) {
                b_low = lo;
                i_lo = i;
            }
            if (hi < b_up) {
                b_up = hi;
                i_hi = i;
            }
        }
        violation = b_low - b_up;
        if (violation < params.tol) break;
        if (iter >= params.max_iter)
            throw ConvergenceError("fit_svr: no convergence after " +
                                   std::to_string(iter) + " iterations (KKT violation " +
                                   std::to_string(violation) + ")");

        const std::size_t i = i_lo, j = i_hi;
        const double eta = std::max(k[i][i] + k[j][j] - 2.0 * k[i][j], 1e-12);
        double delta = violation / eta;
        delta = std::min(delta, c - beta[i]);
        delta = std::min(delta, beta[j] + c);
        if (beta[i] < 0.0) delta = std::min(delta, -beta[i]);  // stop at the |.| kink
        if (beta[j] > 0.0) delta = std::min(delta, beta[j]);
        if (!(delta > 0.0)) break;  // numerically stuck

        beta[i] += delta;
        beta[j] -= delta;
        for (std::size_t t = 0; t < n; ++t) u[t] += delta * (k[t][i] - k[t][j]);
    }

    SvrModel model;
    model.params = params;
    model.iterations = iter;
    model.kkt_violation = std::max(violation, 0.0);
    if (std::isinf(b_low) && std::isinf(b_up))
        model.bias = 0.0;
    else if (std::isinf(b_low))
        model.bias = b_up;
    else if (std::isinf(b_up))
        model.bias = b_low;
    else
        model.bias = 0.5 * (b_low + b_up);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(beta[i]) > 1e-12) {
            model.support_vectors.push_back(x[i]);
            model.dual_coef.push_back(beta[i]);
        }
    }
    return model;
}

double predict(const SvrModel& m, std::span<const double> x) {
    double acc = m.bias;
    for (std::size_t s = 0; s < m.support_vectors.size(); ++s)
        acc += m.dual_coef[s] * kernel_eval(m.params, m.support_vectors[s], x);
    return acc;
}

// ------------------------------------------------------------------- mlp ---

std::size_t MlpModel::param_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        total += static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]) +
                 static_cast<std::size_t>(sizes[l + 1]);
    return total;
}

std::size_t MlpModel::layer_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l)
        off += static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]) +
               static_cast<std::size_t>(sizes[l + 1]);
    return off;
}

MlpModel make_mlp(std::vector<int> sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw ShapeError("make_mlp: need at least input and output layer");
    MlpModel m;
    m.sizes = std::move(sizes);
    m.params.assign(m.param_count(), 0.0);
    Rng rng(mix_seed(seed, 0x6d6c70));
    for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
        const auto fan_in = static_cast<double>(m.sizes[l]);
        const double bound = 1.0 / std::sqrt(fan_in);
        const std::size_t off = m.layer_offset(l);
        const std::size_t n_w =
            static_cast<std::size_t>(m.sizes[l]) * static_cast<std::size_t>(m.sizes[l + 1]);
        for (std::size_t i = 0; i < n_w; ++i)
            m.params[off + i] = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return m;
}

namespace {

// Forward pass storing every layer's activations; returns the scalar output.
double mlp_eval(const MlpModel& m, std::span<const double> x,
                std::vector<std::vector<double>>* acts) {
    const std::size_t n_layers = m.sizes.size();
    if (x.size() != static_cast<std::size_t>(m.sizes[0]))
        throw ShapeError("mlp: input has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(m.sizes[0]));
    std::vector<double> cur(x.begin(), x.end());
    if (acts) {
        acts->clear();
        acts->push_back(cur);
    }
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        const auto n_in = static_cast<std::size_t>(m.sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.sizes[l + 1]);
        const std::size_t off = m.layer_offset(l);
        const double* w = m.params.data() + off;
        const double* b = w + n_in * n_out;
        std::vector<double> next(n_out);
        for (std::size_t o = 0; o < n_out; ++o) {
            double acc = b[o];
            const double* wrow = w + o * n_in;
            for (std::size_t i = 0; i < n_in; ++i) acc += wrow[i] * cur[i];
            const bool hidden = l + 2 < n_layers;
            next[o] = hidden ? std::max(acc, 0.0) : acc;
        }
        cur = std::move(next);
        if (acts) acts->push_back(cur);
    }
    return cur[0];
}

}  // namespace

double mlp_forward(const MlpModel& m, std::span<const double> x) {
    return mlp_eval(m, x, nullptr);
}

std::vector<double> mlp_backward(const MlpModel& m, std::span<const double> x, double y) {
    std::vector<std::vector<double>> acts;
    const double out = mlp_eval(m, x, &acts);

    std::vector<double> grads(m.params.size(), 0.0);
    std::vector<double> delta = {out - y};  // d(0.5 (f-y)^2)/df

    for (std::size_t l = m.sizes.size() - 1; l-- > 0;) {
        const auto n_in = static_cast<std::size_t>(m.sizes[l]);
        const auto n_out = static_cast<std::size_t>(m.sizes[l + 1]);
        const std::size_t off = m.layer_offset(l);
        const double* w = m.params.data() + off;
        double* gw = grads.data() + off;
        double* gb = gw + n_in * n_out;
        const auto& input = acts[l];

        std::vector<double> prev_delta(n_in, 0.0);
        for (std::size_t o = 0; o < n_out; ++o) {
            const double d = delta[o];
            gb[o] += d;
            double* gwrow = gw + o * n_in;
            const double* wrow = w + o * n_in;
            for (std::size_t i = 0; i < n_in; ++i) {
                gwrow[i] += d * input[i];
                prev_delta[i] += d * wrow[i];
            }
        }
        if (l > 0) {
            // ReLU derivative of the hidden activation now in acts[l]
            for (std::size_t i = 0; i < n_in; ++i)
                if (acts[l][i] <= 0.0) prev_delta[i] = 0.0;
        }
        delta = std::move(prev_delta);
    }
    return grads;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, double lr, double beta1, double beta2,
                             double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, t_);
    const double bc2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1_ * m_[i] + (1.0 - b1_) * grads[i];
        v_[i] = b2_ * v_[i] + (1.0 - b2_) * grads[i] * grads[i];
        params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
    }
}

MlpModel train_mlp(const std::vector<std::vector<double>>& x, std::span<const double> y,
                   const TrainConfig& cfg, TrainHistory* history) {
    const std::size_t n = x.size();
    if (n == 0 || n != y.size()) throw ShapeError("train_mlp: empty or mismatched data");
    const int n_features = static_cast<int>(x[0].size());

    MlpModel model = make_mlp({n_features, 256, 16, 1}, cfg.seed);
    if (history) *history = {};
    if (cfg.epochs <= 0) return model;

    Rng rng(mix_seed(cfg.seed, 0x747261696eULL));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::size_t n_val = 0;
    if (cfg.val_fraction > 0.0 && n >= 5)
        n_val = std::max<std::size_t>(1, static_cast<std::size_t>(
                                             std::floor(cfg.val_fraction *
                                                        static_cast<double>(n))));
    std::vector<std::size_t> val_idx(order.begin(),
                                     order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                                       order.end());

    auto mse_over = [&](const std::vector<std::size_t>& idx) {
        if (idx.empty()) return 0.0;
        double acc = 0.0;
        for (std::size_t i : idx) {
            const double d = mlp_forward(model, x[i]) - y[i];
            acc += d * d;
        }
        return acc / static_cast<double>(idx.size());
    };

    AdamOptimizer adam(model.param_count(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps_adam);
    const auto batch =
        static_cast<std::size_t>(std::max(1, cfg.batch_size));

    std::vector<double> best_params = model.params;
    double best_val = std::numeric_limits<double>::infinity();
    int stale = 0;

    std::vector<double> grad_acc(model.param_count());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(train_idx);
        for (std::size_t start = 0; start < train_idx.size(); start += batch) {
            const std::size_t end = std::min(start + batch, train_idx.size());
            std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
            for (std::size_t b = start; b < end; ++b) {
                const auto g = mlp_backward(model, x[train_idx[b]], y[train_idx[b]]);
                for (std::size_t i = 0; i < g.size(); ++i) grad_acc[i] += g[i];
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto& g : grad_acc) g *= inv;
            adam.step(model.params, grad_acc);
        }

        const double train_loss = mse_over(train_idx);
        if (!std::isfinite(train_loss))
            throw TrainingDiverged("train_mlp: loss became non-finite at epoch " +
                                   std::to_string(epoch));
        if (history) history->train_loss.push_back(train_loss);

        if (n_val > 0) {
            const double val_loss = mse_over(val_idx);
            if (history) history->val_loss.push_back(val_loss);
            if (val_loss < best_val - 1e-12) {
                best_val = val_loss;
                best_params = model.params;
                stale = 0;
            } else if (++stale >= cfg.early_stop_patience && cfg.early_stop_patience > 0) {
                model.params = best_params;
                return model;
            }
        }
    }
    if (n_val > 0 && best_val < std::numeric_limits<double>::infinity())
        model.params = best_params;
    return model;
}

// ------------------------------------------------------ model families -----

namespace {

struct ScaledData {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
};

ScaledData scale_rows(std::span<const FeatureRow> rows, const ScalerParams& scaler) {
    ScaledData d;
    d.x.reserve(rows.size());
    d.y.reserve(rows.size());
    for (const auto& r : rows) {
        const auto f = apply_scaler(r, scaler);
        d.x.emplace_back(f.begin(), f.end());
        d.y.push_back(r.pa);
    }
    return d;
}

json scaler_to_json(const ScalerParams& s) {
    return {{"min", s.min}, {"max", s.max}};
}
ScalerParams scaler_from_json(const json& j) {
    ScalerParams s;
    s.min = j.at("min").get<std::array<double, kFeatureCount>>();
    s.max = j.at("max").get<std::array<double, kFeatureCount>>();
    return s;
}

class LinearPipeline : public Regressor {
public:
    ScalerParams scaler;
    LinearModel model;

    double predict_row(const FeatureRow& row) const override {
        const auto f = apply_scaler(row, scaler);
        return predict(model, f);
    }
    std::string family() const override { return "linear"; }
    void save_json(const std::filesystem::path& path, std::uint64_t seed,
                   const std::string& provenance) const override;
};

class SvrPipeline : public Regressor {
public:
    ScalerParams scaler;
    SvrModel model;

    double predict_row(const FeatureRow& row) const override {
        const auto f = apply_scaler(row, scaler);
        return predict(model, f);
    }
    std::string family() const override { return "svr"; }
    void save_json(const std::filesystem::path& path, std::uint64_t seed,
                   const std::string& provenance) const override;
};

class MlpPipeline : public Regressor {
public:
    ScalerParams scaler;
    MlpModel model;

    double predict_row(const FeatureRow& row) const override {
        const auto f = apply_scaler(row, scaler);
        return mlp_forward(model, f);
    }
    std::string family() const override { return "mlp"; }
    void save_json(const std::filesystem::path& path, std::uint64_t seed,
                   const std::string& provenance) const override;
};

json base_checkpoint(const std::string& family, std::uint64_t seed,
                     const std::string& provenance) {
    json j;
    j["format"] = "psychoak-checkpoint-v1";
    j["family"] = family;
    j["seed"] = seed;
    if (!provenance.empty()) j["provenance"] = provenance;
    return j;
}

void dump_json(const json& j, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write checkpoint: " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace

void LinearPipeline::save_json(const std::filesystem::path& path, std::uint64_t seed,
                               const std::string& provenance) const {
    json j = base_checkpoint("linear", seed, provenance);
    j["scaler"] = scaler_to_json(scaler);
    j["model"] = {{"weights", model.weights},
                  {"bias", model.bias},
                  {"rank_deficient", model.rank_deficient}};
    dump_json(j, path);
}

void SvrPipeline::save_json(const std::filesystem::path& path, std::uint64_t seed,
                            const std::string& provenance) const {
    json j = base_checkpoint("svr", seed, provenance);
    j["scaler"] = scaler_to_json(scaler);
    j["model"] = {{"support_vectors", model.support_vectors},
                  {"dual_coef", model.dual_coef},
                  {"bias", model.bias},
                  {"kernel", model.params.kernel == SvrKernel::Rbf ? "rbf" : "linear"},
                  {"gamma", model.params.gamma},
                  {"C", model.params.c},
                  {"epsilon", model.params.epsilon}};
    dump_json(j, path);
}

void MlpPipeline::save_json(const std::filesystem::path& path, std::uint64_t seed,
                            const std::string& provenance) const {
    json j = base_checkpoint("mlp", seed, provenance);
    j["scaler"] = scaler_to_json(scaler);
    j["model"] = {{"sizes", model.sizes}, {"params", model.params}};
    dump_json(j, path);
}

std::unique_ptr<Regressor> fit_pipeline(const std::string& family, const HyperParams& hp,
                                        std::span<const FeatureRow> rows,
                                        std::uint64_t seed, TrainHistory* history) {
    if (rows.empty()) throw EmptyDataset("fit_pipeline: no rows");
    const ScalerParams scaler = fit_scaler(rows);
    const ScaledData data = scale_rows(rows, scaler);

    auto get = [&](const char* key, double fallback) {
        const auto it = hp.find(key);
        return it == hp.end() ? fallback : it->second;
    };

    if (family == "linear") {
        auto p = std::make_unique<LinearPipeline>();
        p->scaler = scaler;
        p->model = fit_linear(data.x, data.y);
        return p;
    }
    if (family == "svr") {
        SvrParams params;
        params.c = get("C", 10.0);
        params.epsilon = get("epsilon", 0.1);
        params.kernel = get("rbf", 0.0) > 0.5 ? SvrKernel::Rbf : SvrKernel::Linear;
        params.gamma = get("gamma", 1.0);
        auto p = std::make_unique<SvrPipeline>();
        p->scaler = scaler;
        p->model = fit_svr(data.x, data.y, params);
        return p;
    }
    if (family == "mlp") {
        TrainConfig cfg;
        cfg.lr = get("lr", cfg.lr);
        cfg.epochs = static_cast<int>(get("epochs", cfg.epochs));
        cfg.batch_size = static_cast<int>(get("batch_size", cfg.batch_size));
        cfg.val_fraction = get("val_fraction", cfg.val_fraction);
        cfg.early_stop_patience =
            static_cast<int>(get("early_stop_patience", cfg.early_stop_patience));
        cfg.seed = seed;
        auto p = std::make_unique<MlpPipeline>();
        p->scaler = scaler;
        p->model = train_mlp(data.x, data.y, cfg, history);
        return p;
    }
    throw ConfigError("unknown model family: '" + family + "'");
}

std::unique_ptr<Regressor> load_pipeline(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw MissingPrerequisite("checkpoint not found: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw DecodeError("checkpoint parse error: " + std::string(e.what()));
    }
    const std::string family = j.at("family").get<std::string>();
    if (family == "linear") {
        auto p = std::make_unique<LinearPipeline>();
        p->scaler = scaler_from_json(j.at("scaler"));
        p->model.weights = j.at("model").at("weights").get<std::vector<double>>();
        p->model.bias = j.at("model").at("bias").get<double>();
        return p;
    }
    if (family == "svr") {
        auto p = std::make_unique<SvrPipeline>();
        p->scaler = scaler_from_json(j.at("scaler"));
        const auto& m = j.at("model");
        p->model.support_vectors =
            m.at("support_vectors").get<std::vector<std::vector<double>>>();
        p->model.dual_coef = m.at("dual_coef").get<std::vector<double>>();
        p->model.bias = m.at("bias").get<double>();
        p->model.params.kernel =
            m.at("kernel").get<std::string>() == "rbf" ? SvrKernel::Rbf : SvrKernel::Linear;
        p->model.params.gamma = m.at("gamma").get<double>();
        return p;
    }
    if (family == "mlp") {
        auto p = std::make_unique<MlpPipeline>();
        p->scaler = scaler_from_json(j.at("scaler"));
        p->model.sizes = j.at("model").at("sizes").get<std::vector<int>>();
        p->model.params = j.at("model").at("params").get<std::vector<double>>();
        return p;
    }
    throw DecodeError("checkpoint has unknown family: " + family);
}

std::vector<HyperParams> default_grid(const std::string& family) {
    if (family == "linear") return {{}};
    if (family == "svr") {
        std::vector<HyperParams> grid;
        for (double c : {0.1, 1.0, 10.0, 100.0})
            for (double eps : {0.01, 0.1}) {
                grid.push_back({{"C", c}, {"epsilon", eps}, {"rbf", 0.0}});
                for (double gamma : {0.1, 1.0, 10.0})
                    grid.push_back({{"C", c}, {"epsilon", eps}, {"rbf", 1.0}, {"gamma", gamma}});
            }
        return grid;
    }
    if (family == "mlp") {
        std::vector<HyperParams> grid;
        for (double lr : {1e-3, 1e-2})
            grid.push_back({{"lr", lr}, {"epochs", 300.0}});
        return grid;
    }
    throw ConfigError("unknown model family: '" + family + "'");
}

// ---------------------------------------------------------- evaluation -----

namespace {

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
    return folds;
}

std::vector<FeatureRow> gather(std::span<const FeatureRow> rows,
                               const std::vector<std::size_t>& idx) {
    std::vector<FeatureRow> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(rows[i]);
    return out;
}

double fold_rmse(std::span<const FeatureRow> rows, const std::vector<std::size_t>& train,
                 const std::vector<std::size_t>& test, const std::string& family,
                 const HyperParams& hp, std::uint64_t seed) {
    const auto train_rows = gather(rows, train);
    const auto model = fit_pipeline(family, hp, train_rows, seed);
    std::vector<double> pred, actual;
    for (std::size_t i : test) {
        pred.push_back(model->predict_row(rows[i]));
        actual.push_back(rows[i].pa);
    }
    return rmse_of(pred, actual);
}

// Inner grid search: mean CV RMSE per candidate, first winner on ties.
HyperParams grid_search(std::span<const FeatureRow> rows,
                        const std::vector<std::size_t>& idx, const std::string& family,
                        const std::vector<HyperParams>& grid, int folds,
                        std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    if (grid.size() == 1) return grid[0];

    Rng rng(mix_seed(seed, 0x67726964));
    std::vector<std::size_t> shuffled = idx;
    rng.shuffle(shuffled);
    std::vector<std::vector<std::size_t>> fold_idx(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < shuffled.size(); ++i)
        fold_idx[i % static_cast<std::size_t>(folds)].push_back(shuffled[i]);

    double best_score = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        int used = 0;
        for (int f = 0; f < folds; ++f) {
            const auto& test = fold_idx[static_cast<std::size_t>(f)];
            if (test.empty()) continue;
            std::vector<std::size_t> train;
            for (int o = 0; o < folds; ++o)
                if (o != f)
                    train.insert(train.end(), fold_idx[static_cast<std::size_t>(o)].begin(),
                                 fold_idx[static_cast<std::size_t>(o)].end());
            if (train.empty()) continue;
            acc += fold_rmse(rows, train, test, family, grid[g],
                             mix_seed(seed, 1000 + static_cast<std::uint64_t>(f)));
            ++used;
        }
        const double score = used > 0 ? acc / used : std::numeric_limits<double>::infinity();
        if (score < best_score - 1e-15) {
            best_score = score;
            best = g;
        }
    }
    return grid[best];
}

}  // namespace

NcvReport nested_cv(std::span<const FeatureRow> rows, const std::string& family,
                    const std::vector<HyperParams>& grid, int outer_folds, int inner_folds,
                    std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("nested_cv: hyperparameter grid is empty");
    if (rows.size() < static_cast<std::size_t>(outer_folds) * 2)
        throw DatasetTooSmall("nested_cv: need at least " +
                              std::to_string(outer_folds * 2) + " rows");

    Rng rng(mix_seed(seed, 0x6e6376));
    const auto folds = make_folds(rows.size(), outer_folds, rng);

    NcvReport report;
    for (int f = 0; f < outer_folds; ++f) {
        const auto& test = folds[static_cast<std::size_t>(f)];
        std::vector<std::size_t> train;
        for (int o = 0; o < outer_folds; ++o)
            if (o != f)
                train.insert(train.end(), folds[static_cast<std::size_t>(o)].begin(),
                             folds[static_cast<std::size_t>(o)].end());
        const auto hp = grid_search(rows, train, family, grid, inner_folds,
                                    mix_seed(seed, 10 + static_cast<std::uint64_t>(f)));
        report.outer_rmse.push_back(fold_rmse(rows, train, test, family, hp,
                                              mix_seed(seed, 20 + static_cast<std::uint64_t>(f))));
    }
    double mean = 0.0;
    for (double v : report.outer_rmse) mean += v;
    mean /= static_cast<double>(report.outer_rmse.size());
    double var = 0.0;
    for (double v : report.outer_rmse) var += (v - mean) * (v - mean);
    report.outer_rmse_mean = mean;
    report.outer_rmse_std = std::sqrt(var / static_cast<double>(report.outer_rmse.size()));

    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), 0);
    report.best = grid_search(rows, all, family, grid, inner_folds, mix_seed(seed, 999));
    return report;
}

namespace {

// Group rows by drone label; deterministic order of first appearance.
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_drone(
    const Dataset& ds) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        const std::string& key =
            i < ds.drone.size() && !ds.drone[i].empty() ? ds.drone[i]
                                                        : drone_group_key(ds.rows[i]);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {i}});
        } else {
            it->second.push_back(i);
        }
    }
    return groups;
}

double aggregate_rows(const Dataset& ds, const std::vector<std::size_t>& idx,
                      const std::vector<double>* predictions) {
    std::vector<int> codes;
    std::vector<double> values;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::size_t i = idx[k];
        codes.push_back(static_cast<int>(std::lround(ds.rows[i].maneuver_code)));
        values.push_back(predictions ? (*predictions)[k] : ds.rows[i].pa);
    }
    return aggregate_pa(codes, values);
}

}  // namespace

EvalReport rmse_full(const Dataset& ds, const std::string& family, const HyperParams& hp,
                     std::uint64_t seed) {
    if (ds.rows.size() < 5)
        throw DatasetTooSmall("rmse_full: need at least 5 rows, got " +
                              std::to_string(ds.rows.size()));

    Rng rng(mix_seed(seed, 0x66756c6c));
    std::vector<std::size_t> order(ds.rows.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const auto n_test = std::max<std::size_t>(1, ds.rows.size() / 5);
    std::vector<std::size_t> test_idx(order.begin(),
                                      order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                                       order.end());

    const auto train_rows = gather(ds.rows, train_idx);
    const auto model = fit_pipeline(family, hp, train_rows, seed);

    // group the held-out rows by drone and compare aggregated PA
    Dataset held;
    std::vector<double> preds;
    for (std::size_t i : test_idx) {
        held.rows.push_back(ds.rows[i]);
        held.drone.push_back(i < ds.drone.size() ? ds.drone[i] : "");
        held.mic_id.push_back(i < ds.mic_id.size() ? ds.mic_id[i] : 0);
        held.maneuver.push_back(i < ds.maneuver.size() ? ds.maneuver[i] : "");
        preds.push_back(model->predict_row(ds.rows[i]));
    }
    const auto groups = group_by_drone(held);

    EvalReport report;
    std::vector<double> pred_agg, actual_agg;
    for (const auto& [key, idx] : groups) {
        std::vector<double> group_preds;
        for (std::size_t k : idx) group_preds.push_back(preds[k]);
        DroneEval e;
        e.drone = key;
        e.n_rows = idx.size();
        e.predicted_pa = aggregate_rows(held, idx, &group_preds);
        e.actual_pa = aggregate_rows(held, idx, nullptr);
        e.training_rows = train_idx;
        pred_agg.push_back(e.predicted_pa);
        actual_agg.push_back(e.actual_pa);
        report.per_drone.push_back(std::move(e));
    }
    report.rmse = rmse_of(pred_agg, actual_agg);
    return report;
}

EvalReport rmse_validation(const Dataset& ds, const std::string& family,
                           const HyperParams& hp, std::uint64_t seed) {
    const auto groups = group_by_drone(ds);
    if (groups.size() < 2)
        throw NeedsMultipleGroups("rmse_validation: need at least 2 distinct drones, got " +
                                  std::to_string(groups.size()));

    EvalReport report;
    std::vector<double> pred_agg, actual_agg;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& [key, held_idx] = groups[g];
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < ds.rows.size(); ++i)
            if (std::find(held_idx.begin(), held_idx.end(), i) == held_idx.end())
                train_idx.push_back(i);

        const auto train_rows = gather(ds.rows, train_idx);
        const auto model =
            fit_pipeline(family, hp, train_rows, mix_seed(seed, 500 + g));

        std::vector<double> group_preds;
        for (std::size_t i : held_idx) group_preds.push_back(model->predict_row(ds.rows[i]));

        Dataset held;
        for (std::size_t i : held_idx) {
            held.rows.push_back(ds.rows[i]);
            held.drone.push_back(key);
            held.mic_id.push_back(i < ds.mic_id.size() ? ds.mic_id[i] : 0);
            held.maneuver.push_back(i < ds.maneuver.size() ? ds.maneuver[i] : "");
        }
        std::vector<std::size_t> local(held_idx.size());
        std::iota(local.begin(), local.end(), 0);

        DroneEval e;
        e.drone = key;
        e.n_rows = held_idx.size();
        e.predicted_pa = aggregate_rows(held, local, &group_preds);
        e.actual_pa = aggregate_rows(held, local, nullptr);
        e.training_rows = train_idx;
        pred_agg.push_back(e.predicted_pa);
        actual_agg.push_back(e.actual_pa);
        report.per_drone.push_back(std::move(e));
    }
    report.rmse = rmse_of(pred_agg, actual_agg);
    return report;
}

}  // namespace psychoak
