#include "flowcast/nn.hpp"

#include <cmath>

#include "flowcast/rng.hpp"

namespace flowcast::nn {

void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            m(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
        }
    }
}

void DenseLayer::init(std::size_t in, std::size_t out, bool tanh_act, std::mt19937_64& rng) {
    tanh_activation = tanh_act;
    W.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    glorot_fill(W, in, out, rng);
    b = Matrix::Zero(static_cast<Eigen::Index>(out), 1);
    dW = Matrix::Zero(W.rows(), W.cols());
    db = Matrix::Zero(b.rows(), 1);
}

const Matrix& DenseLayer::forward(const Matrix& x) {
    input_cache = x;
    output_cache = (W * x).colwise() + b.col(0);
    if (tanh_activation) output_cache = output_cache.array().tanh();
    return output_cache;
}

Matrix DenseLayer::backward(const Matrix& d_out) {
    Matrix dz = d_out;
    if (tanh_activation) {
        dz.array() *= 1.0 - output_cache.array().square();
    }
    dW += dz * input_cache.transpose();
    db.col(0) += dz.rowwise().sum();
    return W.transpose() * dz;
}

void DenseLayer::zero_grads() {
    dW.setZero();
    db.setZero();
}

void DenseLayer::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + "_W", &W, &dW});
    out.push_back({prefix + "_b", &b, &db});
}

void LstmLayer::init(std::size_t in, std::size_t hidden_size, std::mt19937_64& rng) {
    input_size = in;
    hidden = hidden_size;
    const auto h4 = static_cast<Eigen::Index>(4 * hidden);
    Wx.resize(h4, static_cast<Eigen::Index>(in));
    glorot_fill(Wx, in, 4 * hidden, rng);
    Wh.resize(h4, static_cast<Eigen::Index>(hidden));
    glorot_fill(Wh, hidden, 4 * hidden, rng);
    b = Matrix::Zero(h4, 1);
    // Forget-gate bias starts at one so early training can carry state.
    b.block(static_cast<Eigen::Index>(hidden), 0, static_cast<Eigen::Index>(hidden), 1)
        .setOnes();
    dWx = Matrix::Zero(Wx.rows(), Wx.cols());
    dWh = Matrix::Zero(Wh.rows(), Wh.cols());
    db = Matrix::Zero(b.rows(), 1);
}

namespace {
inline Matrix sigmoid(const Matrix& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}
}  // namespace

const Matrix& LstmLayer::forward(const std::vector<Matrix>& inputs) {
    const std::size_t steps = inputs.size();
    const auto batch = inputs.front().cols();
    const auto h = static_cast<Eigen::Index>(hidden);

    xs = inputs;
    is.assign(steps, {});
    fs.assign(steps, {});
    gs.assign(steps, {});
    os.assign(steps, {});
    cs.assign(steps, {});
    tanh_cs.assign(steps, {});
    hs.assign(steps, {});

    Matrix h_prev = Matrix::Zero(h, batch);
    Matrix c_prev = Matrix::Zero(h, batch);
    for (std::size_t t = 0; t < steps; ++t) {
        Matrix z = ((Wx * xs[t] + Wh * h_prev).colwise() + b.col(0));
        is[t] = sigmoid(z.topRows(h));
        fs[t] = sigmoid(z.middleRows(h, h));
        gs[t] = z.middleRows(2 * h, h).array().tanh();
        os[t] = sigmoid(z.bottomRows(h));
        cs[t] = fs[t].cwiseProduct(c_prev) + is[t].cwiseProduct(gs[t]);
        tanh_cs[t] = cs[t].array().tanh();
        hs[t] = os[t].cwiseProduct(tanh_cs[t]);
        h_prev = hs[t];
        c_prev = cs[t];
    }
    return hs.back();
}

void LstmLayer::backward(const Matrix& d_last_hidden) {
    const std::size_t steps = xs.size();
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto batch = d_last_hidden.cols();

    Matrix dh = d_last_hidden;
    Matrix dc = Matrix::Zero(h, batch);
    const Matrix c_zero = Matrix::Zero(h, batch);
    for (std::size_t t = steps; t-- > 0;) {
        const Matrix& c_prev = t > 0 ? cs[t - 1] : c_zero;
        const Matrix d_o = dh.cwiseProduct(tanh_cs[t]);
        dc += dh.cwiseProduct(os[t]).cwiseProduct(
            (1.0 - tanh_cs[t].array().square()).matrix());
        const Matrix d_i = dc.cwiseProduct(gs[t]);
        const Matrix d_g = dc.cwiseProduct(is[t]);
        const Matrix d_f = dc.cwiseProduct(c_prev);

        Matrix dz(4 * h, batch);
        dz.topRows(h) = d_i.cwiseProduct(is[t]).cwiseProduct((1.0 - is[t].array()).matrix());
        dz.middleRows(h, h) =
            d_f.cwiseProduct(fs[t]).cwiseProduct((1.0 - fs[t].array()).matrix());
        dz.middleRows(2 * h, h) = d_g.cwiseProduct((1.0 - gs[t].array().square()).matrix());
        dz.bottomRows(h) = d_o.cwiseProduct(os[t]).cwiseProduct((1.0 - os[t].array()).matrix());

        dWx += dz * xs[t].transpose();
        if (t > 0) dWh += dz * hs[t - 1].transpose();
        db.col(0) += dz.rowwise().sum();

        dh = Wh.transpose() * dz;
        dc = dc.cwiseProduct(fs[t]);
    }
}

void LstmLayer::zero_grads() {
    dWx.setZero();
    dWh.setZero();
    db.setZero();
}

void LstmLayer::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + "_Wx", &Wx, &dWx});
    out.push_back({prefix + "_Wh", &Wh, &dWh});
    out.push_back({prefix + "_b", &b, &db});
}

Matrix Dropout::apply(const Matrix& x, bool train, std::mt19937_64& rng) {
    active = train && rate > 0.0;
    if (!active) return x;
    const double keep = 1.0 - rate;
    mask.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            mask(r, c) = uniform01(rng) < keep ? 1.0 / keep : 0.0;
        }
    }
    return x.cwiseProduct(mask);
}

FeedForwardNet::FeedForwardNet(std::size_t input, std::size_t h1, std::size_t h2,
                               std::size_t output, double drop1, double drop2,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    l0_.init(input, h1, true, rng);
    l1_.init(h1, h2, true, rng);
    l2_.init(h2, output, false, rng);
    drop1_.rate = drop1;
    drop2_.rate = drop2;
}

Matrix FeedForwardNet::forward(const Matrix& x, bool train, std::mt19937_64* dropout_rng) {
    static std::mt19937_64 unused(0);
    std::mt19937_64& rng = dropout_rng ? *dropout_rng : unused;
    Matrix a = l0_.forward(x);
    a = drop1_.apply(a, train, rng);
    a = l1_.forward(a);
    a = drop2_.apply(a, train, rng);
    return l2_.forward(a);
}

void FeedForwardNet::backward(const Matrix& d_out) {
    Matrix d = l2_.backward(d_out);
    d = drop2_.backward(d);
    d = l1_.backward(d);
    d = drop1_.backward(d);
    l0_.backward(d);
}

void FeedForwardNet::zero_grads() {
    l0_.zero_grads();
    l1_.zero_grads();
    l2_.zero_grads();
}

std::vector<ParamRef> FeedForwardNet::params() {
    std::vector<ParamRef> out;
    l0_.collect("l0", out);
    l1_.collect("l1", out);
    l2_.collect("l2", out);
    return out;
}

RecurrentNet::RecurrentNet(std::size_t steps, std::size_t lstm_hidden, std::size_t d1,
                           std::size_t d2, std::size_t output, double drop1, double drop2,
                           std::uint64_t seed)
    : steps_(steps) {
    std::mt19937_64 rng(seed);
    lstm_.init(1, lstm_hidden, rng);
    d0_.init(lstm_hidden, d1, true, rng);
    d1_.init(d1, d2, true, rng);
    d2_.init(d2, kFixedDense, true, rng);
    out_.init(kFixedDense, output, false, rng);
    drop1_.rate = drop1;
    drop2_.rate = drop2;
}

Matrix RecurrentNet::forward(const Matrix& x, bool train, std::mt19937_64* dropout_rng) {
    if (static_cast<std::size_t>(x.rows()) != steps_) {
        throw ShapeMismatch("RecurrentNet: sequence length mismatch");
    }
    static std::mt19937_64 unused(0);
    std::mt19937_64& rng = dropout_rng ? *dropout_rng : unused;

    std::vector<Matrix> inputs(steps_);
    for (std::size_t t = 0; t < steps_; ++t) inputs[t] = x.row(static_cast<Eigen::Index>(t));
    Matrix a = lstm_.forward(inputs);
    a = d0_.forward(a);
    a = drop1_.apply(a, train, rng);
    a = d1_.forward(a);
    a = drop2_.apply(a, train, rng);
    a = d2_.forward(a);
    return out_.forward(a);
}

void RecurrentNet::backward(const Matrix& d_out) {
    Matrix d = out_.backward(d_out);
    d = d2_.backward(d);
    d = drop2_.backward(d);
    d = d1_.backward(d);
    d = drop1_.backward(d);
    d = d0_.backward(d);
    lstm_.backward(d);
}

void RecurrentNet::zero_grads() {
    lstm_.zero_grads();
    d0_.zero_grads();
    d1_.zero_grads();
    d2_.zero_grads();
    out_.zero_grads();
}

std::vector<ParamRef> RecurrentNet::params() {
    std::vector<ParamRef> out;
    lstm_.collect("lstm", out);
    d0_.collect("d0", out);
    d1_.collect("d1", out);
    d2_.collect("d2", out);
    out_.collect("out", out);
    return out;
}

double mse_loss(const Matrix& pred, const Matrix& target, Matrix* d_pred) {
    const double count = static_cast<double>(pred.rows() * pred.cols());
    const Matrix diff = pred - target;
    if (d_pred) *d_pred = (2.0 / count) * diff;
    return diff.array().square().sum() / count;
}

void Adam::step(std::vector<ParamRef>& params) {
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
            v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Matrix& g = *params[i].grad;
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
        const auto m_hat = m_[i].array() / bc1;
        const auto v_hat = v_[i].array() / bc2;
        params[i].value->array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
    }
}

}  // namespace flowcast::nn
