#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "flowcast/learner.hpp"
#include "flowcast/nn.hpp"
#include "helpers.hpp"

using namespace flowcast;
using nn::Matrix;

namespace {

// Central-difference gradient of the MSE loss wrt every parameter.
template <typename Net>
double max_grad_rel_error(Net& net, const Matrix& x, const Matrix& y) {
    Matrix d_pred;
    const Matrix pred = net.forward(x, false, nullptr);
    nn::mse_loss(pred, y, &d_pred);
    net.zero_grads();
    net.backward(d_pred);

    auto params = net.params();
    double worst = 0.0;
    const double h = 1e-5;
    for (auto& p : params) {
        for (Eigen::Index r = 0; r < p.value->rows(); ++r) {
            for (Eigen::Index c = 0; c < p.value->cols(); ++c) {
                const double saved = (*p.value)(r, c);
                (*p.value)(r, c) = saved + h;
                const double up = nn::mse_loss(net.forward(x, false, nullptr), y, nullptr);
                (*p.value)(r, c) = saved - h;
                const double down = nn::mse_loss(net.forward(x, false, nullptr), y, nullptr);
                (*p.value)(r, c) = saved;

                const double numeric = (up - down) / (2.0 * h);
                const double analytic = (*p.grad)(r, c);
                const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
                worst = std::max(worst, std::abs(numeric - analytic) / scale);
            }
        }
    }
    return worst;
}

std::vector<WindowPair> linear_fixture(std::size_t n, std::uint64_t seed) {
    // y = 2*x1 - x2 + 3, no noise.
    std::vector<WindowPair> pairs(n);
    std::mt19937_64 rng(seed);
    for (auto& pair : pairs) {
        pair.input = {2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0};
        pair.target = {2.0 * pair.input[0] - pair.input[1] + 3.0};
    }
    return pairs;
}

}  // namespace

TEST_CASE("feedforward gradients match central differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        nn::FeedForwardNet net(3, 4, 5, 2, 0.0, 0.0, seed);
        std::mt19937_64 rng(seed + 50);
        Matrix x(3, 4), y(2, 4);
        for (Eigen::Index c = 0; c < 4; ++c) {
            for (Eigen::Index r = 0; r < 3; ++r) x(r, c) = 2.0 * uniform01(rng) - 1.0;
            for (Eigen::Index r = 0; r < 2; ++r) y(r, c) = 2.0 * uniform01(rng) - 1.0;
        }
        CHECK(max_grad_rel_error(net, x, y) < 1e-4);
    }
}

TEST_CASE("recurrent gradients match central differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        nn::RecurrentNet net(6, 4, 3, 3, 2, 0.0, 0.0, seed);
        std::mt19937_64 rng(seed + 99);
        Matrix x(6, 3), y(2, 3);
        for (Eigen::Index c = 0; c < 3; ++c) {
            for (Eigen::Index r = 0; r < 6; ++r) x(r, c) = 2.0 * uniform01(rng) - 1.0;
            for (Eigen::Index r = 0; r < 2; ++r) y(r, c) = 2.0 * uniform01(rng) - 1.0;
        }
        CHECK(max_grad_rel_error(net, x, y) < 1e-4);
    }
}

TEST_CASE("linear learner recovers planted coefficients") {
    LearnerSpec spec;
    spec.kind = LearnerKind::Linear;
    const auto train = linear_fixture(200, 1);
    const auto model = fit(spec, train, {});

    const auto& w = model.parameters[0].second;
    const auto& b = model.parameters[1].second;
    CHECK(w(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(w(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(b(0, 0) == doctest::Approx(3.0).epsilon(1e-6));

    const auto pred = predict(model, {0.5, 0.25});
    CHECK(pred[0] == doctest::Approx(2.0 * 0.5 - 0.25 + 3.0).epsilon(1e-9));
}

TEST_CASE("feedforward fits constant targets") {
    LearnerSpec spec;
    spec.kind = LearnerKind::FeedForward;
    spec.widths = {8, 8};
    spec.learning_rate = 3e-3;
    spec.batch_size = 8;
    spec.max_epochs = 2000;
    spec.patience = 1999;
    std::vector<WindowPair> train(32);
    std::mt19937_64 rng(4);
    for (auto& pair : train) {
        pair.input = {uniform01(rng), uniform01(rng), uniform01(rng)};
        pair.target = {7.5};
    }
    const auto model = fit(spec, train, {});
    for (const auto& pair : train) {
        CHECK(std::abs(predict(model, pair.input)[0] - 7.5) < 1e-3);
    }
}

TEST_CASE("recurrent training log tracks the best validation epoch") {
    LearnerSpec spec;
    spec.kind = LearnerKind::Recurrent;
    spec.widths = {32, 8, 8};
    spec.max_epochs = 12;
    spec.patience = 6;
    spec.batch_size = 16;

    std::vector<WindowPair> train(48), val(16);
    std::mt19937_64 rng(9);
    auto fill = [&](std::vector<WindowPair>& pairs) {
        for (auto& pair : pairs) {
            pair.input.resize(10);
            double sum = 0.0;
            for (auto& v : pair.input) {
                v = uniform01(rng);
                sum += v;
            }
            pair.target = {sum};
        }
    };
    fill(train);
    fill(val);

    const auto model = fit(spec, train, val);
    REQUIRE(!model.training_log.empty());
    REQUIRE(model.best_epoch >= 1);

    // Best epoch holds the minimum validation loss seen in the log.
    double min_val = model.training_log.front().val_loss;
    for (const auto& e : model.training_log) min_val = std::min(min_val, e.val_loss);
    CHECK(model.training_log[model.best_epoch - 1].val_loss == doctest::Approx(min_val));

    // Best-so-far validation loss is monotone non-increasing.
    double best = model.training_log.front().val_loss;
    for (const auto& e : model.training_log) {
        best = std::min(best, e.val_loss);
        CHECK(best <= e.val_loss + 1e-15);
    }
}

TEST_CASE("predict is deterministic and batch equals per-sample") {
    LearnerSpec spec;
    spec.kind = LearnerKind::FeedForward;
    spec.widths = {8, 8};
    spec.dropouts = {0.3, 0.3};  // dropout active in training only
    spec.max_epochs = 5;
    spec.patience = 2;
    std::vector<WindowPair> train(24);
    std::mt19937_64 rng(12);
    for (auto& pair : train) {
        pair.input = {uniform01(rng), uniform01(rng)};
        pair.target = {pair.input[0] + pair.input[1]};
    }
    const auto model = fit(spec, train, {});

    std::vector<std::vector<double>> inputs;
    for (int i = 0; i < 7; ++i) inputs.push_back({uniform01(rng), uniform01(rng)});
    const auto batch = predict_batch(model, inputs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto single = predict(model, inputs[i]);
        CHECK(single == batch[i]);
        CHECK(predict(model, inputs[i]) == single);  // inference determinism
    }
    CHECK_THROWS_AS(predict(model, {1.0, 2.0, 3.0}), ShapeMismatch);
}

TEST_CASE("same seed reproduces identical parameters") {
    LearnerSpec spec;
    spec.kind = LearnerKind::Recurrent;
    spec.widths = {8, 8, 8};
    spec.max_epochs = 4;
    spec.patience = 2;
    spec.seed = 77;
    std::vector<WindowPair> train(20), val(8);
    std::mt19937_64 rng(3);
    auto fill = [&](std::vector<WindowPair>& pairs) {
        for (auto& pair : pairs) {
            pair.input.resize(6);
            for (auto& v : pair.input) v = uniform01(rng);
            pair.target = {pair.input[0]};
        }
    };
    fill(train);
    fill(val);

    const auto a = fit(spec, train, val);
    const auto b = fit(spec, train, val);
    REQUIRE(a.parameters.size() == b.parameters.size());
    for (std::size_t i = 0; i < a.parameters.size(); ++i) {
        CHECK(a.parameters[i].second == b.parameters[i].second);
    }

    spec.seed = 78;
    const auto c = fit(spec, train, val);
    bool differs = false;
    for (std::size_t i = 0; i < a.parameters.size(); ++i) {
        if (a.parameters[i].second != c.parameters[i].second) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("tune") {
    SearchSpace space;

    SUBCASE("budget one returns the single sampled spec") {
        LearnerSpec base;
        base.kind = LearnerKind::FeedForward;
        const auto spec = tune(space, base, 1, linear_fixture(10, 0), {}, 5);
        CHECK(spec.kind == LearnerKind::FeedForward);
        REQUIRE(spec.widths.size() == 2);
    }

    SUBCASE("sampled values stay inside the declared sets") {
        LearnerSpec base;
        base.kind = LearnerKind::Recurrent;
        std::mt19937_64 rng(21);
        for (int i = 0; i < 100; ++i) {
            const auto spec = sample_spec(space, base, rng);
            for (double d : spec.dropouts) {
                CHECK(std::count(space.dropout_rates.begin(), space.dropout_rates.end(), d) == 1);
            }
            CHECK(std::count(space.recurrent_widths.begin(), space.recurrent_widths.end(),
                             spec.widths[0]) == 1);
            for (std::size_t j = 1; j < 3; ++j) {
                CHECK(std::count(space.dense_widths.begin(), space.dense_widths.end(),
                                 spec.widths[j]) == 1);
            }
        }
    }

    SUBCASE("separable fixture: the capable spec wins") {
        // Linear data; a linear learner fits exactly, while the alternative
        // candidates (severely undertrained nets) cannot.
        const auto train = linear_fixture(120, 2);
        const auto val = linear_fixture(40, 3);

        SearchSpace tiny;
        tiny.dense_widths = {4};
        tiny.dropout_rates = {0.0};

        LearnerSpec linear_base;
        linear_base.kind = LearnerKind::Linear;
        LearnerSpec net_base;
        net_base.kind = LearnerKind::FeedForward;
        net_base.max_epochs = 2;
        net_base.patience = 1;

        const auto linear_model = fit(tune(tiny, linear_base, 3, train, val, 0), train, val);
        const auto net_model = fit(tune(tiny, net_base, 3, train, val, 0), train, val);
        CHECK(linear_model.best_val_loss() < net_model.best_val_loss());
    }
}

TEST_CASE("checkpoint round-trip reproduces predictions bitwise") {
    LearnerSpec spec;
    spec.kind = LearnerKind::Recurrent;
    spec.widths = {8, 8, 8};
    spec.max_epochs = 3;
    spec.patience = 1;
    std::vector<WindowPair> train(16);
    std::mt19937_64 rng(8);
    for (auto& pair : train) {
        pair.input.resize(5);
        for (auto& v : pair.input) v = uniform01(rng);
        pair.target = {pair.input[2], pair.input[4]};
    }
    const auto model = fit(spec, train, {});

    const std::string path = "/tmp/flowcast_test_model.json";
    save_model(model, path);
    const auto loaded = load_model(path);
    std::remove(path.c_str());

    CHECK(loaded.spec.kind == model.spec.kind);
    CHECK(loaded.best_epoch == model.best_epoch);
    CHECK(loaded.training_log.size() == model.training_log.size());

    std::vector<double> probe = {0.1, 0.9, 0.4, 0.7, 0.2};
    const auto a = predict(model, probe);
    const auto b = predict(loaded, probe);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("diverged training reports the epoch") {
    LearnerSpec spec;
    spec.kind = LearnerKind::FeedForward;
    spec.widths = {8, 8};
    // A step this size overflows the squared loss to inf on the next pass.
    spec.learning_rate = 1e160;
    spec.max_epochs = 30;
    spec.patience = 29;
    std::vector<WindowPair> train(16);
    std::mt19937_64 rng(2);
    for (auto& pair : train) {
        pair.input = {uniform01(rng), uniform01(rng)};
        pair.target = {uniform01(rng)};
    }
    try {
        fit(spec, train, {});
        FAIL("expected DivergedTraining");
    } catch (const DivergedTraining& e) {
        CHECK(e.epoch() >= 1);
    }
}

TEST_CASE("spec validation") {
    LearnerSpec spec;
    spec.patience = spec.max_epochs;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.patience = 5;
    spec.max_epochs = 100;
    spec.validate();
    CHECK_THROWS_AS(fit(LearnerSpec{}, {}, {}), EmptyInput);
}
