#include <doctest.h>

#include <chrono>

#include "mulab/errors.hpp"
#include "mulab/losses.hpp"
#include "mulab/metrics.hpp"
#include "mulab/train.hpp"
#include "support.hpp"

using namespace mulab;
using testsupport::models_bitwise_equal;

TEST_SUITE("train") {

TEST_CASE("separable blobs reach high train accuracy within 50 epochs") {
    Dataset d = synth_blobs(2, 60, 2, 0.01, 0);
    TrainConfig cfg;
    cfg.architecture = {2, 8, 2};
    cfg.epochs = 50;
    cfg.learning_rate = 0.1;
    cfg.batch_size = 16;
    cfg.seed = 0;
    Model model = train(d, cfg);
    CHECK(accuracy(model, d) >= 99.0);
}

TEST_CASE("zero-spread blobs are fit perfectly") {
    Dataset d = synth_blobs(3, 30, 2, 0.0, 1);
    TrainConfig cfg;
    cfg.architecture = {2, 8, 3};
    cfg.epochs = 60;
    cfg.learning_rate = 0.1;
    cfg.batch_size = 16;
    Model model = train(d, cfg);
    CHECK(accuracy(model, d) == 100.0);
}

TEST_CASE("no hidden layers, lr 0: parameters equal the init") {
    Dataset d = synth_blobs(2, 10, 2, 0.2, 2);
    TrainConfig cfg;
    cfg.architecture = {2, 2};
    cfg.epochs = 1;
    cfg.learning_rate = 0.0;
    cfg.batch_size = 4;
    cfg.seed = 3;
    Model trained = train(d, cfg);
    Model init = make_mlp(cfg.architecture, cfg.seed);
    CHECK(models_bitwise_equal(trained, init));
}

TEST_CASE("same seed trains bitwise-identical models") {
    Dataset d = synth_blobs(3, 40, 2, 0.2, 4);
    TrainConfig cfg;
    cfg.architecture = {2, 16, 3};
    cfg.epochs = 10;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 8;
    cfg.seed = 5;
    CHECK(models_bitwise_equal(train(d, cfg), train(d, cfg)));
    cfg.seed = 6;
    CHECK(!models_bitwise_equal(train(d, cfg), train(d, {cfg.architecture, 10, 0.05, 8, 5})));
}

TEST_CASE("final epoch loss does not exceed the first") {
    Dataset d = synth_blobs(4, 50, 2, 0.2, 7);
    TrainConfig cfg;
    cfg.architecture = {2, 16, 4};
    cfg.epochs = 25;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 16;
    Model model = make_mlp(cfg.architecture, cfg.seed);
    OptimizerState opt(model, cfg.learning_rate);
    double first = 0.0, last = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double loss = run_ce_epoch(model, d, opt, cfg.seed, epoch, cfg.batch_size);
        if (epoch == 0) first = loss;
        last = loss;
    }
    CHECK(last <= first);
}

TEST_CASE("architecture/feature width mismatch is rejected") {
    Dataset d = synth_blobs(2, 10, 3, 0.2, 0);
    TrainConfig cfg;
    cfg.architecture = {2, 4, 2};
    CHECK_THROWS_AS(train(d, cfg), ShapeError);
}

TEST_CASE("retrain on the full dataset equals train under the same seed") {
    Dataset d = synth_blobs(3, 25, 2, 0.2, 8);
    TrainConfig cfg;
    cfg.architecture = {2, 8, 3};
    cfg.epochs = 8;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 8;
    cfg.seed = 1;
    CHECK(models_bitwise_equal(retrain(d, cfg), train(d, cfg)));
}

TEST_CASE("retrain wall time grows with data size and epochs") {
    TrainConfig cfg;
    cfg.architecture = {2, 32, 3};
    cfg.epochs = 10;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 16;

    auto time_run = [&](const Dataset& data, std::size_t epochs) {
        TrainConfig c = cfg;
        c.epochs = epochs;
        double best = 1e100;
        for (int rep = 0; rep < 3; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            retrain(data, c);
            best = std::min(best,
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        }
        return best;
    };

    Dataset small = synth_blobs(3, 40, 2, 0.2, 9);
    Dataset large = synth_blobs(3, 320, 2, 0.2, 9);
    CHECK(time_run(large, 10) > time_run(small, 10));
    CHECK(time_run(small, 40) > time_run(small, 5));
}

}
