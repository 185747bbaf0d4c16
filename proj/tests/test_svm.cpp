#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "stancetk/svm.hpp"

using namespace stancetk;

namespace {

FeatureMatrix matrix_from(const std::vector<std::pair<std::vector<double>, ClassLabel>>& rows) {
    FeatureMatrix m;
    m.dimension = rows.empty() ? 0 : static_cast<uint32_t>(rows[0].first.size());
    size_t next = 0;
    for (const auto& [values, label] : rows) {
        MatrixRow row;
        row.user_id = "r" + std::to_string(next++);
        row.label = label;
        row.vec.dimension = m.dimension;
        for (size_t i = 0; i < values.size(); ++i)
            row.vec.add(static_cast<uint32_t>(i), values[i]);
        m.rows.push_back(std::move(row));
    }
    return m;
}

FeatureVector vec(const std::vector<double>& values) {
    FeatureVector v;
    v.dimension = static_cast<uint32_t>(values.size());
    for (size_t i = 0; i < values.size(); ++i) v.add(static_cast<uint32_t>(i), values[i]);
    return v;
}

FeatureMatrix random_problem(Rng& rng, size_t n, size_t dim) {
    std::vector<std::pair<std::vector<double>, ClassLabel>> rows;
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> x(dim);
        for (auto& value : x) value = rng.next_double() * 4.0 - 2.0;
        rows.emplace_back(x, static_cast<ClassLabel>(rng.index(3)));
    }
    return matrix_from(rows);
}

// Independent slow solver: projected gradient ascent on the dual of the
// one-vs-rest subproblem for class c, dense Q, step 1/lambda_max.
double oracle_dual_objective(const FeatureMatrix& matrix, size_t c, double C) {
    const size_t n = matrix.rows.size();
    const size_t dim = matrix.dimension + 1;
    std::vector<std::vector<double>> x(n, std::vector<double>(dim, 0.0));
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        for (const auto& [index, w] : matrix.rows[i].vec.entries) x[i][index] = w;
        x[i][dim - 1] = 1.0;  // bias feature
        y[i] = label_index(matrix.rows[i].label) == c ? 1.0 : -1.0;
    }
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            double dot = 0;
            for (size_t d = 0; d < dim; ++d) dot += x[i][d] * x[j][d];
            q[i][j] = y[i] * y[j] * dot;
        }

    // power iteration for the largest eigenvalue
    std::vector<double> v(n, 1.0);
    double lambda = 1.0;
    for (int it = 0; it < 200; ++it) {
        std::vector<double> qv(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) qv[i] += q[i][j] * v[j];
        double norm = 0;
        for (const double value : qv) norm += value * value;
        norm = std::sqrt(norm);
        if (norm == 0) break;
        lambda = norm;
        for (size_t i = 0; i < n; ++i) v[i] = qv[i] / norm;
    }
    const double step = 1.0 / lambda;

    std::vector<double> alpha(n, 0.0);
    for (int it = 0; it < 200000; ++it) {
        std::vector<double> grad(n, 1.0);  // 1 - Q alpha
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) grad[i] -= q[i][j] * alpha[j];
        double moved = 0;
        for (size_t i = 0; i < n; ++i) {
            const double next = std::clamp(alpha[i] + step * grad[i], 0.0, C);
            moved = std::max(moved, std::abs(next - alpha[i]));
            alpha[i] = next;
        }
        if (moved < 1e-10) break;
    }

    double linear = 0;
    for (const double a : alpha) linear += a;
    double quad = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) quad += alpha[i] * q[i][j] * alpha[j];
    return linear - 0.5 * quad;
}

} // namespace

TEST_CASE("symmetric 1-D pair puts the boundary at the origin") {
    const auto matrix = matrix_from({{{1.0}, ClassLabel::Yes}, {{-1.0}, ClassLabel::No}});
    TrainConfig cfg;
    cfg.C = 10.0;
    const LinearSvmModel model = svm_train(matrix, cfg);
    CHECK(svm_predict(model, vec({0.5})).label == ClassLabel::Yes);
    CHECK(svm_predict(model, vec({-0.5})).label == ClassLabel::No);
    // decision values flip sign around 0
    const auto up = svm_predict(model, vec({0.5})).scores;
    const auto down = svm_predict(model, vec({-0.5})).scores;
    CHECK(up[0] > down[0]);
    CHECK(up[1] < down[1]);
}

TEST_CASE("separable toy sets reach training accuracy 1.0") {
    std::vector<std::pair<std::vector<double>, ClassLabel>> rows;
    Rng rng(5);
    const std::vector<std::vector<double>> centers = {{4, 0}, {-4, 0}, {0, 4}};
    for (size_t i = 0; i < 18; ++i) {
        const size_t c = i % 3;
        std::vector<double> x = centers[c];
        for (auto& value : x) value += rng.next_double() - 0.5;
        rows.emplace_back(x, static_cast<ClassLabel>(c));
    }
    const auto matrix = matrix_from(rows);
    TrainConfig cfg;
    cfg.C = 100.0;
    cfg.max_epochs = 1000;
    cfg.tol = 1e-6;
    const LinearSvmModel model = svm_train(matrix, cfg);
    for (const auto& row : matrix.rows)
        CHECK(svm_predict(model, row.vec).label == row.label);
}

TEST_CASE("duals stay within the box and the dual objective never decreases") {
    Rng rng(33);
    const auto matrix = random_problem(rng, 30, 5);
    TrainConfig cfg;
    cfg.C = 1.0;
    cfg.max_epochs = 300;
    const LinearSvmModel model = svm_train(matrix, cfg);
    for (size_t c = 0; c < 3; ++c) {
        const auto& meta = model.meta[c];
        REQUIRE_FALSE(meta.alphas.empty());
        for (const double a : meta.alphas) {
            CHECK(a >= 0.0);
            CHECK(a <= cfg.C);
        }
        REQUIRE_FALSE(meta.sweep_dual_objectives.empty());
        for (size_t s = 1; s < meta.sweep_dual_objectives.size(); ++s)
            CHECK(meta.sweep_dual_objectives[s] >=
                  meta.sweep_dual_objectives[s - 1] - 1e-9);
        CHECK(meta.epochs_run >= 1);
    }
}

TEST_CASE("converged dual objective matches the projected-gradient oracle") {
    Rng rng(71);
    for (int trial = 0; trial < 3; ++trial) {
        const auto matrix = random_problem(rng, 30, 5);
        TrainConfig cfg;
        cfg.C = 1.0;
        cfg.tol = 1e-7;
        cfg.max_epochs = 5000;
        const LinearSvmModel model = svm_train(matrix, cfg);
        for (size_t c = 0; c < 3; ++c) {
            const double oracle = oracle_dual_objective(matrix, c, cfg.C);
            const double ours = model.meta[c].sweep_dual_objectives.back();
            CHECK(std::abs(ours - oracle) <= 1e-3);
            CHECK(model.meta[c].duality_gap >= -1e-9);
            CHECK(model.meta[c].duality_gap <= 1e-2);
        }
    }
}

TEST_CASE("prediction breaks ties in label order") {
    LinearSvmModel model;
    model.dimension = 1;
    for (auto& w : model.weights) w.assign(1, 0.0);
    model.bias = {2.0, -1.0, -1.0};
    CHECK(svm_predict(model, vec({0.0})).label == ClassLabel::Yes);
    model.bias = {0.5, 0.5, -1.0};
    CHECK(svm_predict(model, vec({0.0})).label == ClassLabel::Yes);
    model.bias = {0.0, 0.0, 0.0};
    CHECK(svm_predict(model, vec({0.0})).label == ClassLabel::Yes);
    model.bias = {-1.0, 0.5, 0.5};
    CHECK(svm_predict(model, vec({0.0})).label == ClassLabel::No);
}

TEST_CASE("prediction is invariant under uniform positive scaling") {
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        LinearSvmModel model;
        model.dimension = 4;
        for (auto& w : model.weights) {
            w.resize(4);
            for (auto& value : w) value = rng.next_double() * 2 - 1;
        }
        for (auto& b : model.bias) b = rng.next_double() - 0.5;
        std::vector<double> values(4);
        for (auto& value : values) value = rng.next_double() * 3 - 1.5;
        const FeatureVector v = vec(values);
        const ClassLabel before = svm_predict(model, v).label;
        LinearSvmModel scaled = model;
        for (auto& w : scaled.weights)
            for (auto& value : w) value *= 3.7;
        for (auto& b : scaled.bias) b *= 3.7;
        CHECK(svm_predict(scaled, v).label == before);
    }
}

TEST_CASE("contract errors") {
    const auto matrix = matrix_from({{{1.0}, ClassLabel::Yes}, {{2.0}, ClassLabel::Yes}});
    CHECK_THROWS_AS(svm_train(matrix, TrainConfig{}), SingleClassInput);

    const auto ok = matrix_from({{{1.0}, ClassLabel::Yes}, {{-1.0}, ClassLabel::No}});
    const LinearSvmModel model = svm_train(ok, TrainConfig{});
    CHECK_THROWS_AS(svm_predict(model, vec({1.0, 2.0})), DimensionMismatch);
}

TEST_CASE("svm training is deterministic under a fixed seed") {
    Rng rng(3);
    const auto matrix = random_problem(rng, 25, 4);
    TrainConfig cfg;
    cfg.rng_seed = 99;
    const LinearSvmModel a = svm_train(matrix, cfg);
    const LinearSvmModel b = svm_train(matrix, cfg);
    std::ostringstream sa;
    std::ostringstream sb;
    write_svm_model(a, sa);
    write_svm_model(b, sb);
    CHECK(sa.str() == sb.str());
}
