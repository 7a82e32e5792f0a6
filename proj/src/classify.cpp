#include "emosig/classify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "emosig/rng.hpp"

namespace emosig {

std::string classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::NB: return "nb";
        case ClassifierKind::SVM: return "svm";
        case ClassifierKind::LR: return "lr";
    }
    return "?";
}

std::string baseline_name(BaselineStrategy s) {
    switch (s) {
        case BaselineStrategy::Random: return "random";
        case BaselineStrategy::Majority: return "majority";
        case BaselineStrategy::Ratio: return "ratio";
    }
    return "?";
}

Standardization standardize_fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error(ErrorCode::InsufficientData, "empty matrix");
    std::size_t d = rows.front().size();
    Standardization st;
    st.mean.assign(d, 0.0);
    st.std.assign(d, 0.0);
    double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += r[j];
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= n;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            double c = r[j] - st.mean[j];
            st.std[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) st.std[j] = std::sqrt(st.std[j] / n);
    return st;
}

std::vector<std::vector<double>> standardize_apply(const Standardization& stats,
                                                   const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out = rows;
    for (auto& r : out) {
        if (r.size() != stats.mean.size())
            throw Error(ErrorCode::ShapeMismatch, "standardization dimension mismatch");
        for (std::size_t j = 0; j < r.size(); ++j)
            r[j] = stats.std[j] > 0.0 ? (r[j] - stats.mean[j]) / stats.std[j] : 0.0;
    }
    return out;
}

namespace {

// Column subset + train-mean imputation of missing values.
std::vector<std::vector<double>> gather(const std::vector<std::vector<double>>& rows,
                                        const std::vector<std::size_t>& selected,
                                        const std::vector<double>& impute) {
    std::size_t need = 0;
    for (std::size_t s : selected) need = std::max(need, s + 1);
    std::vector<std::vector<double>> out(rows.size(), std::vector<double>(selected.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() < need)
            throw Error(ErrorCode::ShapeMismatch,
                        "row has fewer columns than the model's selected feature indices");
        for (std::size_t j = 0; j < selected.size(); ++j) {
            double v = rows[i][selected[j]];
            out[i][j] = std::isfinite(v) ? v : impute[j];
        }
    }
    return out;
}

std::vector<double> compute_impute_values(const std::vector<std::vector<double>>& rows,
                                          const std::vector<std::size_t>& selected) {
    std::vector<double> impute(selected.size(), 0.0);
    for (std::size_t j = 0; j < selected.size(); ++j) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows) {
            double v = r[selected[j]];
            if (std::isfinite(v)) {
                sum += v;
                ++n;
            }
        }
        impute[j] = n > 0 ? sum / static_cast<double>(n) : 0.0;
    }
    return impute;
}

std::vector<double> class_weights(const std::vector<BinaryLabel>& labels, bool balanced) {
    std::size_t n_high = 0;
    for (BinaryLabel l : labels)
        if (l == BinaryLabel::High) ++n_high;
    std::size_t n_low = labels.size() - n_high;
    std::vector<double> w(labels.size(), 1.0);
    if (!balanced) return w;
    double n = static_cast<double>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double n_class = static_cast<double>(labels[i] == BinaryLabel::High ? n_high : n_low);
        w[i] = n / (2.0 * n_class);
    }
    return w;
}

void fit_nb(FittedModel& m, const std::vector<std::vector<double>>& x,
            const std::vector<BinaryLabel>& y) {
    std::size_t d = x.front().size();
    std::size_t n_high = 0;
    for (BinaryLabel l : y)
        if (l == BinaryLabel::High) ++n_high;
    std::size_t n_low = y.size() - n_high;

    m.mean_high.assign(d, 0.0);
    m.mean_low.assign(d, 0.0);
    m.var_high.assign(d, 0.0);
    m.var_low.assign(d, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto& mu = y[i] == BinaryLabel::High ? m.mean_high : m.mean_low;
        for (std::size_t j = 0; j < d; ++j) mu[j] += x[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        m.mean_high[j] /= static_cast<double>(n_high);
        m.mean_low[j] /= static_cast<double>(n_low);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool high = y[i] == BinaryLabel::High;
        auto& mu = high ? m.mean_high : m.mean_low;
        auto& var = high ? m.var_high : m.var_low;
        for (std::size_t j = 0; j < d; ++j) {
            double c = x[i][j] - mu[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        m.var_high[j] /= static_cast<double>(n_high);
        m.var_low[j] /= static_cast<double>(n_low);
    }

    // Smoothing keeps zero-variance features from collapsing the likelihood.
    double max_var = 0.0;
    std::vector<double> pooled(d, 0.0);
    {
        std::vector<double> mu(d, 0.0);
        for (const auto& r : x)
            for (std::size_t j = 0; j < d; ++j) mu[j] += r[j];
        for (std::size_t j = 0; j < d; ++j) mu[j] /= static_cast<double>(x.size());
        for (const auto& r : x)
            for (std::size_t j = 0; j < d; ++j) {
                double c = r[j] - mu[j];
                pooled[j] += c * c;
            }
        for (std::size_t j = 0; j < d; ++j)
            max_var = std::max(max_var, pooled[j] / static_cast<double>(x.size()));
    }
    double eps = 1e-9 * max_var;
    if (eps <= 0.0) eps = 1e-12;
    for (std::size_t j = 0; j < d; ++j) {
        m.var_high[j] += eps;
        m.var_low[j] += eps;
    }

    m.log_prior_high = std::log(static_cast<double>(n_high) / static_cast<double>(y.size()));
    m.log_prior_low = std::log(static_cast<double>(n_low) / static_cast<double>(y.size()));
}

// Dual coordinate descent for the L1-hinge linear SVM, bias handled by
// feature augmentation (penalized bias, liblinear-style).
void fit_svm(FittedModel& m, const std::vector<std::vector<double>>& x,
             const std::vector<BinaryLabel>& labels, const ClassifierConfig& cfg) {
    std::size_t n = x.size();
    std::size_t d = x.front().size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == BinaryLabel::High ? 1.0 : -1.0;
    std::vector<double> sw = class_weights(labels, cfg.balanced_weights);

    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 1.0;  // augmented bias feature
        for (double v : x[i]) q += v * v;
        qii[i] = q;
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(d + 1, 0.0);  // w[d] is the bias
    m.objective_trace.clear();
    m.converged = false;

    for (int pass = 0; pass < cfg.max_iterations; ++pass) {
        double max_pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double f = w[d];
            for (std::size_t j = 0; j < d; ++j) f += w[j] * x[i][j];
            double g = y[i] * f - 1.0;
            double upper = cfg.c_param * sw[i];

            double pg = g;
            if (alpha[i] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] >= upper)
                pg = std::max(g, 0.0);
            max_pg = std::max(max_pg, std::fabs(pg));
            if (std::fabs(pg) < 1e-14) continue;

            double a_new = std::clamp(alpha[i] - g / qii[i], 0.0, upper);
            double delta = (a_new - alpha[i]) * y[i];
            if (delta != 0.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += delta * x[i][j];
                w[d] += delta;
                alpha[i] = a_new;
            }
        }

        double dual = 0.0;
        for (double v : w) dual += v * v;
        dual *= 0.5;
        for (double a : alpha) dual -= a;
        m.objective_trace.push_back(dual);
        m.iterations = pass + 1;

        if (max_pg < cfg.tolerance) {
            m.converged = true;
            break;
        }
    }

    m.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
    m.bias = w[d];
}

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

struct LrProblem {
    Eigen::MatrixXd X;   // n x (d+1), last column is the bias term
    Eigen::VectorXd y;   // +-1
    Eigen::VectorXd sw;  // per-sample weights
    double c = 1.0;
};

LrProblem lr_problem(const std::vector<std::vector<double>>& x,
                     const std::vector<BinaryLabel>& labels, const ClassifierConfig& cfg) {
    auto n = static_cast<Eigen::Index>(x.size());
    auto d = static_cast<Eigen::Index>(x.front().size());
    LrProblem p;
    p.X.resize(n, d + 1);
    p.y.resize(n);
    p.sw.resize(n);
    p.c = cfg.c_param;
    std::vector<double> sw = class_weights(labels, cfg.balanced_weights);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j)
            p.X(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        p.X(i, d) = 1.0;
        p.y(i) = labels[static_cast<std::size_t>(i)] == BinaryLabel::High ? 1.0 : -1.0;
        p.sw(i) = sw[static_cast<std::size_t>(i)];
    }
    return p;
}

double lr_obj(const LrProblem& p, const Eigen::VectorXd& w) {
    Eigen::Index d = p.X.cols() - 1;
    Eigen::VectorXd f = p.X * w;
    double obj = 0.5 * w.head(d).squaredNorm();
    for (Eigen::Index i = 0; i < p.X.rows(); ++i)
        obj += p.c * p.sw(i) * softplus(-p.y(i) * f(i));
    return obj;
}

Eigen::VectorXd lr_grad(const LrProblem& p, const Eigen::VectorXd& w) {
    Eigen::Index d = p.X.cols() - 1;
    Eigen::VectorXd f = p.X * w;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
    g.head(d) = w.head(d);
    for (Eigen::Index i = 0; i < p.X.rows(); ++i) {
        double sig = 1.0 / (1.0 + std::exp(p.y(i) * f(i)));  // sigma(-y*f)
        g -= p.c * p.sw(i) * p.y(i) * sig * p.X.row(i).transpose();
    }
    return g;
}

// Newton iterations on the L2-penalized weighted logistic loss; the bias is
// unpenalized.
void fit_lr(FittedModel& m, const std::vector<std::vector<double>>& x,
            const std::vector<BinaryLabel>& labels, const ClassifierConfig& cfg) {
    auto n = static_cast<Eigen::Index>(x.size());
    auto d = static_cast<Eigen::Index>(x.front().size());

    LrProblem prob = lr_problem(x, labels, cfg);
    const Eigen::MatrixXd& X = prob.X;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    auto objective = [&](const Eigen::VectorXd& wt) { return lr_obj(prob, wt); };

    m.objective_trace.clear();
    m.converged = false;
    double obj = objective(w);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        Eigen::VectorXd f = X * w;
        Eigen::VectorXd g = lr_grad(prob, w);
        Eigen::VectorXd dvec(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double p = 1.0 / (1.0 + std::exp(-f(i)));
            dvec(i) = cfg.c_param * prob.sw(i) * p * (1.0 - p);
        }

        m.objective_trace.push_back(obj);
        m.iterations = iter;
        if (g.norm() <= cfg.tolerance) {
            m.converged = true;
            break;
        }

        Eigen::MatrixXd H = X.transpose() * dvec.asDiagonal() * X;
        for (Eigen::Index j = 0; j < d; ++j) H(j, j) += 1.0;
        H(d, d) += 1e-10;  // keep the bias block nonsingular under separation

        Eigen::VectorXd step = H.ldlt().solve(-g);
        double t = 1.0;
        Eigen::VectorXd w_new = w + step;
        double obj_new = objective(w_new);
        int halvings = 0;
        while (obj_new > obj && halvings < 60) {
            t *= 0.5;
            w_new = w + t * step;
            obj_new = objective(w_new);
            ++halvings;
        }
        if (obj_new > obj) break;  // no descent possible: numerically done
        w = w_new;
        obj = obj_new;
    }

    m.weights.resize(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) m.weights[static_cast<std::size_t>(j)] = w(j);
    m.bias = w(d);
}

}  // namespace

FittedModel fit(const std::vector<std::vector<double>>& rows,
                const std::vector<BinaryLabel>& labels,
                const std::vector<std::size_t>& selected, const ClassifierConfig& config) {
    if (rows.empty() || rows.size() != labels.size())
        throw Error(ErrorCode::ShapeMismatch, "rows/labels mismatch");
    if (selected.empty())
        throw Error(ErrorCode::DegenerateFit, "empty feature selection");
    bool any_high = false, any_low = false;
    for (BinaryLabel l : labels) (l == BinaryLabel::High ? any_high : any_low) = true;
    if (!any_high || !any_low)
        throw Error(ErrorCode::DegenerateFit, "single-class training fold");

    FittedModel m;
    m.kind = config.kind;
    m.selected = selected;
    m.impute_values = compute_impute_values(rows, selected);
    std::vector<std::vector<double>> x = gather(rows, selected, m.impute_values);

    if (config.kind == ClassifierKind::NB) {
        fit_nb(m, x, labels);
        return m;
    }

    m.standardization = standardize_fit(x);
    std::vector<std::vector<double>> z = standardize_apply(m.standardization, x);
    if (config.kind == ClassifierKind::SVM)
        fit_svm(m, z, labels, config);
    else
        fit_lr(m, z, labels, config);
    return m;
}

std::vector<double> decision_values(const FittedModel& model,
                                    const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> x = gather(rows, model.selected, model.impute_values);
    std::vector<double> out;
    out.reserve(x.size());

    if (model.kind == ClassifierKind::NB) {
        for (const auto& r : x) {
            if (r.size() != model.mean_high.size())
                throw Error(ErrorCode::ShapeMismatch, "NB dimension mismatch");
            double lh = model.log_prior_high, ll = model.log_prior_low;
            for (std::size_t j = 0; j < r.size(); ++j) {
                double ch = r[j] - model.mean_high[j];
                lh += -0.5 * std::log(2.0 * M_PI * model.var_high[j]) -
                      ch * ch / (2.0 * model.var_high[j]);
                double cl = r[j] - model.mean_low[j];
                ll += -0.5 * std::log(2.0 * M_PI * model.var_low[j]) -
                      cl * cl / (2.0 * model.var_low[j]);
            }
            out.push_back(lh - ll);
        }
        return out;
    }

    std::vector<std::vector<double>> z = standardize_apply(model.standardization, x);
    for (const auto& r : z) {
        if (r.size() != model.weights.size())
            throw Error(ErrorCode::ShapeMismatch, "linear model dimension mismatch");
        double f = model.bias;
        for (std::size_t j = 0; j < r.size(); ++j) f += model.weights[j] * r[j];
        out.push_back(f);
    }
    return out;
}

std::vector<BinaryLabel> predict(const FittedModel& model,
                                 const std::vector<std::vector<double>>& rows) {
    std::vector<double> dec = decision_values(model, rows);
    std::vector<BinaryLabel> out(dec.size());
    for (std::size_t i = 0; i < dec.size(); ++i)
        out[i] = dec[i] > 0.0 ? BinaryLabel::High : BinaryLabel::Low;  // ties go Low
    return out;
}

std::uint64_t model_hash(const FittedModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix_u64 = [&](std::uint64_t v) { mix_bytes(&v, sizeof v); };
    auto mix_d = [&](double v) { mix_bytes(&v, sizeof v); };
    auto mix_vec = [&](const std::vector<double>& v) {
        mix_u64(v.size());
        for (double x : v) mix_d(x);
    };

    mix_u64(static_cast<std::uint64_t>(model.kind));
    mix_u64(model.selected.size());
    for (std::size_t s : model.selected) mix_u64(s);
    mix_vec(model.impute_values);
    mix_vec(model.mean_high);
    mix_vec(model.var_high);
    mix_vec(model.mean_low);
    mix_vec(model.var_low);
    mix_d(model.log_prior_high);
    mix_d(model.log_prior_low);
    mix_vec(model.weights);
    mix_d(model.bias);
    mix_vec(model.standardization.mean);
    mix_vec(model.standardization.std);
    return h;
}

std::vector<BinaryLabel> baseline_vote(BaselineStrategy strategy,
                                       const std::vector<BinaryLabel>& train_labels,
                                       std::size_t n_predictions, std::uint64_t rng_seed) {
    if (train_labels.empty())
        throw Error(ErrorCode::InsufficientData, "baseline needs training labels");
    if (n_predictions == 0)
        throw Error(ErrorCode::InsufficientData, "baseline needs n_predictions >= 1");

    std::size_t n_high = 0;
    for (BinaryLabel l : train_labels)
        if (l == BinaryLabel::High) ++n_high;
    double p_high = static_cast<double>(n_high) / static_cast<double>(train_labels.size());

    std::vector<BinaryLabel> out(n_predictions);
    Rng rng(rng_seed);
    switch (strategy) {
        case BaselineStrategy::Random:
            for (auto& l : out) l = rng.uniform() < 0.5 ? BinaryLabel::High : BinaryLabel::Low;
            break;
        case BaselineStrategy::Majority: {
            BinaryLabel maj = n_high * 2 >= train_labels.size() ? BinaryLabel::High
                                                                : BinaryLabel::Low;  // tie -> High
            std::fill(out.begin(), out.end(), maj);
            break;
        }
        case BaselineStrategy::Ratio:
            for (auto& l : out) l = rng.uniform() < p_high ? BinaryLabel::High : BinaryLabel::Low;
            break;
    }
    return out;
}

double lr_objective(const std::vector<std::vector<double>>& rows,
                    const std::vector<BinaryLabel>& labels, const ClassifierConfig& config,
                    const std::vector<double>& params) {
    if (rows.empty() || rows.size() != labels.size())
        throw Error(ErrorCode::ShapeMismatch, "rows/labels mismatch");
    if (params.size() != rows.front().size() + 1)
        throw Error(ErrorCode::ShapeMismatch, "params must be [weights..., bias]");
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
        params.data(), static_cast<Eigen::Index>(params.size()));
    return lr_obj(lr_problem(rows, labels, config), w);
}

std::vector<double> lr_gradient(const std::vector<std::vector<double>>& rows,
                                const std::vector<BinaryLabel>& labels,
                                const ClassifierConfig& config,
                                const std::vector<double>& params) {
    if (rows.empty() || rows.size() != labels.size())
        throw Error(ErrorCode::ShapeMismatch, "rows/labels mismatch");
    if (params.size() != rows.front().size() + 1)
        throw Error(ErrorCode::ShapeMismatch, "params must be [weights..., bias]");
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
        params.data(), static_cast<Eigen::Index>(params.size()));
    Eigen::VectorXd g = lr_grad(lr_problem(rows, labels, config), w);
    return std::vector<double>(g.data(), g.data() + g.size());
}

}  // namespace emosig
