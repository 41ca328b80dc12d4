#include "flowcast/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "flowcast/nn.hpp"
#include "flowcast/rng.hpp"
#include "model_json.hpp"

namespace flowcast {

using nn::Matrix;

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Linear: return "linear";
        case LearnerKind::FeedForward: return "feedforward";
        case LearnerKind::Recurrent: return "recurrent";
    }
    return "?";
}

LearnerKind learner_kind_from(const std::string& name) {
    if (name == "linear") return LearnerKind::Linear;
    if (name == "feedforward") return LearnerKind::FeedForward;
    if (name == "recurrent") return LearnerKind::Recurrent;
    throw Error("unknown learner kind: " + name);
}

void LearnerSpec::validate() const {
    if (max_epochs < 1) throw Error("LearnerSpec: max_epochs must be >= 1");
    if (patience >= max_epochs) throw Error("LearnerSpec: patience must be < max_epochs");
    if (batch_size == 0) throw Error("LearnerSpec: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error("LearnerSpec: learning_rate must be positive");
    if (kind == LearnerKind::FeedForward && widths.size() < 2) {
        throw Error("LearnerSpec: feedforward needs two hidden widths");
    }
    if (kind == LearnerKind::Recurrent && widths.size() < 3) {
        throw Error("LearnerSpec: recurrent needs lstm and two dense widths");
    }
    for (double d : dropouts) {
        if (d < 0.0 || d >= 1.0) throw Error("LearnerSpec: dropout rate outside [0, 1)");
    }
}

std::size_t ForecastModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& [name, m] : parameters) {
        count += static_cast<std::size_t>(m.rows() * m.cols());
    }
    return count;
}

double ForecastModel::best_val_loss() const {
    if (training_log.empty()) return std::numeric_limits<double>::infinity();
    if (best_epoch >= 1 && best_epoch <= static_cast<int>(training_log.size())) {
        return training_log[static_cast<std::size_t>(best_epoch - 1)].val_loss;
    }
    return training_log.back().val_loss;
}

namespace {

void check_pairs(const std::vector<WindowPair>& pairs, std::size_t in_len,
                 std::size_t out_len, const char* what) {
    for (const auto& pair : pairs) {
        if (pair.input.size() != in_len || pair.target.size() != out_len) {
            throw ShapeMismatch(std::string("fit: inconsistent ") + what + " pair shapes");
        }
    }
}

Matrix inputs_to_matrix(const std::vector<WindowPair>& pairs) {
    const auto rows = static_cast<Eigen::Index>(pairs.front().input.size());
    Matrix x(rows, static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            x(r, static_cast<Eigen::Index>(i)) = pairs[i].input[static_cast<std::size_t>(r)];
        }
    }
    return x;
}

Matrix targets_to_matrix(const std::vector<WindowPair>& pairs) {
    const auto rows = static_cast<Eigen::Index>(pairs.front().target.size());
    Matrix y(rows, static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            y(r, static_cast<Eigen::Index>(i)) = pairs[i].target[static_cast<std::size_t>(r)];
        }
    }
    return y;
}

Normalizer fit_normalizer(const Matrix& x, const Matrix& y) {
    Normalizer norm;
    norm.x_mean = x.mean();
    norm.y_mean = y.mean();
    const double x_var = (x.array() - norm.x_mean).square().mean();
    const double y_var = (y.array() - norm.y_mean).square().mean();
    norm.x_std = x_var > 1e-24 ? std::sqrt(x_var) : 1.0;
    norm.y_std = y_var > 1e-24 ? std::sqrt(y_var) : 1.0;
    return norm;
}

// Minimal polymorphism over the two net shapes.
struct NetRunner {
    std::unique_ptr<nn::FeedForwardNet> ff;
    std::unique_ptr<nn::RecurrentNet> rec;

    static NetRunner build(const LearnerSpec& spec, std::size_t input_len,
                           std::size_t output_len) {
        NetRunner runner;
        const double p1 = spec.dropouts.size() > 0 ? spec.dropouts[0] : 0.0;
        const double p2 = spec.dropouts.size() > 1 ? spec.dropouts[1] : 0.0;
        if (spec.kind == LearnerKind::FeedForward) {
            runner.ff = std::make_unique<nn::FeedForwardNet>(
                input_len, spec.widths[0], spec.widths[1], output_len, p1, p2,
                sub_seed(spec.seed, 0xAB1Cull));
        } else {
            runner.rec = std::make_unique<nn::RecurrentNet>(
                input_len, spec.widths[0], spec.widths[1], spec.widths[2], output_len, p1, p2,
                sub_seed(spec.seed, 0xAB1Cull));
        }
        return runner;
    }

    Matrix forward(const Matrix& x, bool train, std::mt19937_64* rng) {
        return ff ? ff->forward(x, train, rng) : rec->forward(x, train, rng);
    }
    void backward(const Matrix& d) { ff ? ff->backward(d) : rec->backward(d); }
    void zero_grads() { ff ? ff->zero_grads() : rec->zero_grads(); }
    std::vector<nn::ParamRef> params() { return ff ? ff->params() : rec->params(); }
};

double eval_loss(NetRunner& net, const Matrix& x, const Matrix& y) {
    // Chunked to bound the recurrent cache footprint.
    const Eigen::Index chunk = 512;
    double total = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); c += chunk) {
        const Eigen::Index width = std::min(chunk, x.cols() - c);
        const Matrix pred = net.forward(x.middleCols(c, width), false, nullptr);
        total += nn::mse_loss(pred, y.middleCols(c, width), nullptr) *
                 static_cast<double>(width);
    }
    return total / static_cast<double>(x.cols());
}

ForecastModel fit_linear(const LearnerSpec& spec, const std::vector<WindowPair>& train,
                         const std::vector<WindowPair>& val) {
    const std::size_t in_len = train.front().input.size();
    const std::size_t out_len = train.front().target.size();
    const auto n = static_cast<Eigen::Index>(train.size());
    const auto cols = static_cast<Eigen::Index>(in_len + 1);

    Matrix a(n, cols);
    Matrix y(n, static_cast<Eigen::Index>(out_len));
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (std::size_t j = 0; j < in_len; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = train[i].input[j];
        }
        a(static_cast<Eigen::Index>(i), cols - 1) = 1.0;
        for (std::size_t j = 0; j < out_len; ++j) {
            y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = train[i].target[j];
        }
    }

    const double ridge = 1e-8;
    Matrix gram = a.transpose() * a;
    gram.diagonal().array() += ridge;
    const Matrix solution = gram.ldlt().solve(a.transpose() * y);  // (in+1) x out

    ForecastModel model;
    model.spec = spec;
    model.input_length = in_len;
    model.output_length = out_len;
    model.parameters.emplace_back("weights", solution.topRows(cols - 1).transpose());
    model.parameters.emplace_back("bias", solution.bottomRows(1).transpose());

    EpochLog log;
    const Matrix residual = a * solution - y;
    log.train_loss = residual.array().square().mean();
    if (!val.empty()) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& pair : val) {
            Eigen::Map<const Eigen::VectorXd> x(pair.input.data(),
                                                static_cast<Eigen::Index>(in_len));
            const Eigen::VectorXd pred =
                model.parameters[0].second * x + model.parameters[1].second.col(0);
            for (std::size_t j = 0; j < out_len; ++j) {
                const double d = pred(static_cast<Eigen::Index>(j)) - pair.target[j];
                sum += d * d;
                ++count;
            }
        }
        log.val_loss = sum / static_cast<double>(count);
    } else {
        log.val_loss = log.train_loss;
    }
    model.training_log.push_back(log);
    model.best_epoch = 1;
    return model;
}

void dump_params(NetRunner& net, ForecastModel& model) {
    model.parameters.clear();
    for (const auto& p : net.params()) {
        model.parameters.emplace_back(p.name, *p.value);
    }
}

void load_params(NetRunner& net, const ForecastModel& model) {
    auto refs = net.params();
    if (refs.size() != model.parameters.size()) {
        throw ShapeMismatch("model parameters do not match the architecture");
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& [name, value] = model.parameters[i];
        if (name != refs[i].name || value.rows() != refs[i].value->rows() ||
            value.cols() != refs[i].value->cols()) {
            throw ShapeMismatch("model parameter " + name + " does not match the architecture");
        }
        *refs[i].value = value;
    }
}

}  // namespace

ForecastModel fit(const LearnerSpec& spec, const std::vector<WindowPair>& train,
                  const std::vector<WindowPair>& val) {
    spec.validate();
    if (train.empty()) throw EmptyInput("fit: empty training set");
    const std::size_t in_len = train.front().input.size();
    const std::size_t out_len = train.front().target.size();
    check_pairs(train, in_len, out_len, "train");
    check_pairs(val, in_len, out_len, "validation");

    if (spec.kind == LearnerKind::Linear) return fit_linear(spec, train, val);

    ForecastModel model;
    model.spec = spec;
    model.input_length = in_len;
    model.output_length = out_len;

    Matrix x_train = inputs_to_matrix(train);
    Matrix y_train = targets_to_matrix(train);
    model.norm = fit_normalizer(x_train, y_train);
    x_train = (x_train.array() - model.norm.x_mean) / model.norm.x_std;
    y_train = (y_train.array() - model.norm.y_mean) / model.norm.y_std;

    Matrix x_val, y_val;
    if (!val.empty()) {
        x_val = inputs_to_matrix(val);
        y_val = targets_to_matrix(val);
        x_val = (x_val.array() - model.norm.x_mean) / model.norm.x_std;
        y_val = (y_val.array() - model.norm.y_mean) / model.norm.y_std;
    }

    NetRunner net = NetRunner::build(spec, in_len, out_len);
    auto params = net.params();
    nn::Adam adam(spec.learning_rate);

    std::mt19937_64 shuffle_rng(sub_seed(spec.seed, 0x5AFFull));
    std::mt19937_64 dropout_rng(sub_seed(spec.seed, 0xD201ull));

    const std::size_t n = train.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_params;
    int wait = 0;

    for (int epoch = 1; epoch <= spec.max_epochs; ++epoch) {
        // Fisher-Yates with the portable index sampler.
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);
        }

        double train_loss = 0.0;
        for (std::size_t start = 0; start < n; start += spec.batch_size) {
            const std::size_t width = std::min(spec.batch_size, n - start);
            Matrix xb(x_train.rows(), static_cast<Eigen::Index>(width));
            Matrix yb(y_train.rows(), static_cast<Eigen::Index>(width));
            for (std::size_t i = 0; i < width; ++i) {
                xb.col(static_cast<Eigen::Index>(i)) =
                    x_train.col(static_cast<Eigen::Index>(order[start + i]));
                yb.col(static_cast<Eigen::Index>(i)) =
                    y_train.col(static_cast<Eigen::Index>(order[start + i]));
            }
            const Matrix pred = net.forward(xb, true, &dropout_rng);
            Matrix d_pred;
            const double loss = nn::mse_loss(pred, yb, &d_pred);
            train_loss += loss * static_cast<double>(width);
            net.zero_grads();
            net.backward(d_pred);
            adam.step(params);
        }
        train_loss /= static_cast<double>(n);

        const double val_loss = val.empty() ? train_loss : eval_loss(net, x_val, y_val);
        model.training_log.push_back({train_loss, val_loss});
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw DivergedTraining("fit: non-finite loss at epoch " + std::to_string(epoch),
                                   epoch);
        }

        if (val_loss < best_val) {
            best_val = val_loss;
            model.best_epoch = epoch;
            best_params.clear();
            for (const auto& p : params) best_params.push_back(*p.value);
            wait = 0;
        } else if (++wait >= spec.patience) {
            break;
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = best_params[i];
    dump_params(net, model);
    return model;
}

std::vector<std::vector<double>> predict_batch(const ForecastModel& model,
                                               const std::vector<std::vector<double>>& inputs) {
    if (inputs.empty()) return {};
    for (const auto& in : inputs) {
        if (in.size() != model.input_length) throw ShapeMismatch("predict: input length");
    }

    const auto n = static_cast<Eigen::Index>(inputs.size());
    const auto out_len = static_cast<Eigen::Index>(model.output_length);
    Matrix result(out_len, n);

    if (model.spec.kind == LearnerKind::Linear) {
        const Matrix& w = model.parameters[0].second;
        const Matrix& b = model.parameters[1].second;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Map<const Eigen::VectorXd> x(inputs[static_cast<std::size_t>(i)].data(),
                                                static_cast<Eigen::Index>(model.input_length));
            result.col(i) = w * x + b.col(0);
        }
    } else {
        NetRunner net = NetRunner::build(model.spec, model.input_length, model.output_length);
        load_params(net, model);
        Matrix x(static_cast<Eigen::Index>(model.input_length), n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < model.input_length; ++r) {
                x(static_cast<Eigen::Index>(r), i) =
                    (inputs[static_cast<std::size_t>(i)][r] - model.norm.x_mean) /
                    model.norm.x_std;
            }
        }
        const Eigen::Index chunk = 512;
        for (Eigen::Index c = 0; c < n; c += chunk) {
            const Eigen::Index width = std::min(chunk, n - c);
            result.middleCols(c, width) = net.forward(x.middleCols(c, width), false, nullptr);
        }
        result = (result.array() * model.norm.y_std + model.norm.y_mean).matrix();
    }

    std::vector<std::vector<double>> out(inputs.size(), std::vector<double>(model.output_length));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index r = 0; r < out_len; ++r) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = result(r, i);
        }
    }
    return out;
}

std::vector<double> predict(const ForecastModel& model, const std::vector<double>& input) {
    return predict_batch(model, {input}).front();
}

LearnerSpec sample_spec(const SearchSpace& space, const LearnerSpec& base,
                        std::mt19937_64& rng) {
    auto pick_width = [&](const std::vector<std::size_t>& options) {
        return options[uniform_index(rng, options.size())];
    };
    auto pick_rate = [&](const std::vector<double>& options) {
        return options[uniform_index(rng, options.size())];
    };

    LearnerSpec spec = base;
    spec.widths.clear();
    if (base.kind == LearnerKind::Recurrent) {
        spec.widths = {pick_width(space.recurrent_widths), pick_width(space.dense_widths),
                       pick_width(space.dense_widths)};
    } else if (base.kind == LearnerKind::FeedForward) {
        spec.widths = {pick_width(space.dense_widths), pick_width(space.dense_widths)};
    }
    spec.dropouts = {pick_rate(space.dropout_rates), pick_rate(space.dropout_rates)};
    return spec;
}

LearnerSpec tune(const SearchSpace& space, const LearnerSpec& base, std::size_t budget,
                 const std::vector<WindowPair>& train, const std::vector<WindowPair>& val,
                 std::uint64_t seed) {
    if (budget < 1) throw Error("tune: budget must be >= 1");
    std::mt19937_64 rng(sub_seed(seed, 0x70DEull));

    LearnerSpec best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t best_count = 0;
    for (std::size_t trial = 0; trial < budget; ++trial) {
        LearnerSpec candidate = sample_spec(space, base, rng);
        candidate.seed = sub_seed(seed, trial + 1);
        if (budget == 1) return candidate;  // nothing to compare against

        const auto model = fit(candidate, train, val);
        const double loss = model.best_val_loss();
        const std::size_t count = model.parameter_count();
        const bool better = loss < best_loss || (loss == best_loss && count < best_count);
        if (trial == 0 || better) {
            best = candidate;
            best_loss = loss;
            best_count = count;
        }
    }
    return best;
}

nlohmann::json model_to_json(const ForecastModel& model) {
    nlohmann::json j;
    j["format"] = "flowcast-model";
    j["version"] = 1;
    j["spec"] = {{"kind", to_string(model.spec.kind)},
                 {"widths", model.spec.widths},
                 {"dropouts", model.spec.dropouts},
                 {"learning_rate", model.spec.learning_rate},
                 {"batch_size", model.spec.batch_size},
                 {"max_epochs", model.spec.max_epochs},
                 {"patience", model.spec.patience},
                 {"seed", model.spec.seed}};
    j["input_length"] = model.input_length;
    j["output_length"] = model.output_length;
    j["normalizer"] = {{"x_mean", model.norm.x_mean},
                       {"x_std", model.norm.x_std},
                       {"y_mean", model.norm.y_mean},
                       {"y_std", model.norm.y_std}};
    j["best_epoch"] = model.best_epoch;
    auto& log = j["training_log"] = nlohmann::json::array();
    for (const auto& entry : model.training_log) {
        log.push_back({entry.train_loss, entry.val_loss});
    }
    auto& params = j["parameters"] = nlohmann::json::array();
    for (const auto& [name, m] : model.parameters) {
        std::vector<double> data(static_cast<std::size_t>(m.rows() * m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
            }
        }
        params.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", data}});
    }
    return j;
}

ForecastModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "flowcast-model" || j.value("version", 0) != 1) {
        throw Error("unrecognized model checkpoint");
    }

    ForecastModel model;
    const auto& spec = j.at("spec");
    model.spec.kind = learner_kind_from(spec.at("kind").get<std::string>());
    model.spec.widths = spec.at("widths").get<std::vector<std::size_t>>();
    model.spec.dropouts = spec.at("dropouts").get<std::vector<double>>();
    model.spec.learning_rate = spec.at("learning_rate").get<double>();
    model.spec.batch_size = spec.at("batch_size").get<std::size_t>();
    model.spec.max_epochs = spec.at("max_epochs").get<int>();
    model.spec.patience = spec.at("patience").get<int>();
    model.spec.seed = spec.at("seed").get<std::uint64_t>();
    model.input_length = j.at("input_length").get<std::size_t>();
    model.output_length = j.at("output_length").get<std::size_t>();
    const auto& norm = j.at("normalizer");
    model.norm = {norm.at("x_mean").get<double>(), norm.at("x_std").get<double>(),
                  norm.at("y_mean").get<double>(), norm.at("y_std").get<double>()};
    model.best_epoch = j.at("best_epoch").get<int>();
    for (const auto& entry : j.at("training_log")) {
        model.training_log.push_back({entry.at(0).get<double>(), entry.at(1).get<double>()});
    }
    for (const auto& p : j.at("parameters")) {
        Eigen::MatrixXd m(p.at("rows").get<Eigen::Index>(), p.at("cols").get<Eigen::Index>());
        const auto data = p.at("data").get<std::vector<double>>();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                m(r, c) = data[static_cast<std::size_t>(r * m.cols() + c)];
            }
        }
        model.parameters.emplace_back(p.at("name").get<std::string>(), std::move(m));
    }
    return model;
}

void save_model(const ForecastModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << model_to_json(model).dump();
    if (!out) throw IoFailure("write failed: " + path);
}

ForecastModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

}  // namespace flowcast
