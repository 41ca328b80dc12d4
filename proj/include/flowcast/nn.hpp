// Dense and LSTM building blocks with explicit forward/backward passes.
// Small nets on small batches; everything double precision so the analytic
// gradients can be checked against central differences.

#ifndef FLOWCAST_NN_HPP
#define FLOWCAST_NN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "flowcast/error.hpp"

namespace flowcast::nn {

using Matrix = Eigen::MatrixXd;

struct ParamRef {
    std::string name;
    Matrix* value;
    Matrix* grad;
};

// Glorot-uniform fill with a portable RNG stream.
void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

struct DenseLayer {
    Matrix W;  // out x in
    Matrix b;  // out x 1
    bool tanh_activation = true;

    Matrix dW, db;
    Matrix input_cache, output_cache;

    void init(std::size_t in, std::size_t out, bool tanh_act, std::mt19937_64& rng);
    const Matrix& forward(const Matrix& x);
    Matrix backward(const Matrix& d_out);
    void zero_grads();
    void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

struct LstmLayer {
    // Gate block order: input, forget, cell, output.
    Matrix Wx;  // 4H x in
    Matrix Wh;  // 4H x H
    Matrix b;   // 4H x 1

    Matrix dWx, dWh, db;

    std::size_t hidden = 0;
    std::size_t input_size = 0;

    // Per-step caches from the last forward pass.
    std::vector<Matrix> xs, is, fs, gs, os, cs, tanh_cs, hs;

    void init(std::size_t in, std::size_t hidden_size, std::mt19937_64& rng);
    // inputs: one (in x B) matrix per step; returns the final hidden state.
    const Matrix& forward(const std::vector<Matrix>& inputs);
    void backward(const Matrix& d_last_hidden);
    void zero_grads();
    void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// Inverted-dropout mask shared between forward and backward.
struct Dropout {
    double rate = 0.0;
    bool active = false;  // mask applied on the last forward pass
    Matrix mask;

    Matrix apply(const Matrix& x, bool train, std::mt19937_64& rng);
    Matrix backward(const Matrix& d) const { return active ? d.cwiseProduct(mask).eval() : d; }
};

// dense(h1, tanh) -> dropout -> dense(h2, tanh) -> dropout -> dense(out, id)
class FeedForwardNet {
public:
    FeedForwardNet(std::size_t input, std::size_t h1, std::size_t h2, std::size_t output,
                   double drop1, double drop2, std::uint64_t seed);

    Matrix forward(const Matrix& x, bool train, std::mt19937_64* dropout_rng);
    void backward(const Matrix& d_out);
    void zero_grads();
    std::vector<ParamRef> params();

private:
    DenseLayer l0_, l1_, l2_;
    Dropout drop1_, drop2_;
};

// lstm -> dense(d1, tanh) -> dropout -> dense(d2, tanh) -> dropout
//      -> dense(10, tanh) -> dense(out, id)
class RecurrentNet {
public:
    static constexpr std::size_t kFixedDense = 10;

    RecurrentNet(std::size_t steps, std::size_t lstm_hidden, std::size_t d1, std::size_t d2,
                 std::size_t output, double drop1, double drop2, std::uint64_t seed);

    // x: (steps x B), univariate sequence per column.
    Matrix forward(const Matrix& x, bool train, std::mt19937_64* dropout_rng);
    void backward(const Matrix& d_out);
    void zero_grads();
    std::vector<ParamRef> params();

private:
    std::size_t steps_;
    LstmLayer lstm_;
    DenseLayer d0_, d1_, d2_, out_;
    Dropout drop1_, drop2_;
};

// Mean-squared error over every output element; fills d_pred with the
// loss gradient.
double mse_loss(const Matrix& pred, const Matrix& target, Matrix* d_pred);

class Adam {
public:
    explicit Adam(double lr) : lr_(lr) {}

    void step(std::vector<ParamRef>& params);

private:
    double lr_;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
    std::vector<Matrix> m_, v_;
};

}  // namespace flowcast::nn

#endif  // FLOWCAST_NN_HPP
